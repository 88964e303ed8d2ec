#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "wigner/diagnostics.hpp"
#include "wigner/lowrank.hpp"
#include "wigner/solver.hpp"
#include "wigner/types.hpp"

namespace wigner {

// Flat key/value settings, keys canonicalised (lower case, '-' -> '_',
// aliases resolved).
using ConfigMap = std::map<std::string, std::string>;

std::string canonical_key(const std::string& key);

// Parses `key = value` lines. Throws ConfigError on syntax errors, unknown
// keys and duplicate keys.
ConfigMap parse_config_map(const std::string& text);

// Layers `over` onto `base`. Setting one of cfl/dt in `over` removes the
// other from `base`.
ConfigMap merge_config(ConfigMap base, const ConfigMap& over);

// Checks required keys and value ranges. Throws ConfigError.
SolverConfig build_config(const ConfigMap& map);

SolverConfig parse_config(const std::string& text);

// Echo that parses back to an identical SolverConfig.
std::string format_config(const SolverConfig& cfg);

std::string problem_name(Problem p);
std::string mode_name(Mode m);

struct Snapshot {
  double t = 0.0;
  double h = 0.0;
  MatrixXd data;
};

void write_snapshot(const MatrixXd& f, double t, double h,
                    const std::filesystem::path& path);
Snapshot read_snapshot(const std::filesystem::path& path);

struct FactorSnapshot {
  double t = 0.0;
  double h = 0.0;
  LowRankFactors<double> factors;
};

void write_factors(const LowRankFactors<double>& f, double t, double h,
                   const std::filesystem::path& path);
FactorSnapshot read_factors(const std::filesystem::path& path);

extern const char* const kDiagnosticsHeader;

std::string format_diagnostics(const std::vector<DiagnosticsRecord>& records);
void write_diagnostics(const std::vector<DiagnosticsRecord>& records,
                       const std::filesystem::path& path);

struct RunResult {
  std::vector<DiagnosticsRecord> history;
  std::optional<double> damping_rate;
  std::vector<std::string> files;
  long steps = 0;
  long max_rank_hits = 0;
};

// Full time loop with snapshots, diagnostics.csv and manifest.json under
// cfg.out (nothing is written when cfg.out is empty). Warnings go to `log`.
RunResult run(const SolverConfig& cfg, std::ostream* log = nullptr);

extern const char* const kVersionTag;

}  // namespace wigner
