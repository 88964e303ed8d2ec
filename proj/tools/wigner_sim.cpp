#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <string_view>

#include <CLI11.hpp>

#include "wigner/errors.hpp"
#include "wigner/io.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw wigner::IoError("cannot open config: " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

int fail(const char* category, const std::string& msg) {
  std::string line = msg;
  for (char& c : line)
    if (c == '\n') c = ' ';
  std::cerr << "error[" << category << "]: " << line << '\n';
  const std::string_view c = category;
  if (c == "config") return 2;
  if (c == "io") return 3;
  if (c == "numerical") return 4;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1D1V Wigner-Poisson solver (full and adaptive rank)"};
  std::string config_path;
  app.add_option("--config", config_path, "key = value config file");

  // Every flag mirrors a config key; only flags given on the command line
  // override the file.
  struct Flag {
    const char* name;
    const char* key;
    const char* help;
  };
  const Flag flags[] = {
      {"--problem", "problem", "two_stream | landau"},
      {"--H", "h", "dimensionless Planck constant"},
      {"--nx", "nx", "grid points in x"},
      {"--nv", "nv", "grid points in v (even)"},
      {"--lx", "lx", "domain length in x"},
      {"--lv", "lv", "velocity bound"},
      {"--cfl", "cfl", "CFL number (dt = cfl*dx/Lv)"},
      {"--dt", "dt", "explicit time step"},
      {"--tfinal", "tfinal", "final time"},
      {"--solver", "solver", "full | adaptive"},
      {"--weno-order", "weno_order", "3 | 5"},
      {"--eps-c", "eps_c", "ACA tolerance"},
      {"--aca-stop", "aca_stop", "absolute | relative ACA stopping norm"},
      {"--eps-s", "eps_s", "SVD truncation threshold"},
      {"--p", "p", "ACA random candidates"},
      {"--max-rank", "max_rank", "rank cap (0: min(nx,nv))"},
      {"--seed", "seed", "RNG seed"},
      {"--snapshot-every", "snapshot_every", "snapshot interval in steps"},
      {"--fit-t0", "fit_t0", "damping fit window start"},
      {"--fit-t1", "fit_t1", "damping fit window end"},
      {"--svd-every", "svd_every", "full mode: rank diagnostics interval"},
      {"--threads", "threads", "OpenMP threads (0: default)"},
      {"--out", "out", "output directory"},
  };
  std::vector<std::string> values(std::size(flags));
  std::vector<CLI::Option*> opts;
  for (std::size_t k = 0; k < std::size(flags); ++k)
    opts.push_back(app.add_option(flags[k].name, values[k], flags[k].help));
  opts[6]->excludes(opts[7]);  // --cfl, --dt

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("config", e.what());
  }

  try {
    wigner::ConfigMap file;
    if (!config_path.empty()) file = wigner::parse_config_map(read_file(config_path));
    wigner::ConfigMap cli;
    for (std::size_t k = 0; k < std::size(flags); ++k)
      if (opts[k]->count() > 0) cli[flags[k].key] = values[k];
    const wigner::SolverConfig cfg =
        wigner::build_config(wigner::merge_config(std::move(file), cli));
    const wigner::RunResult res = wigner::run(cfg, &std::cerr);
    const auto& last = res.history.back();
    std::printf("steps=%ld t=%.6g mass_rel_err=%.3e momentum_err=%.3e rank=%ld",
                res.steps, last.t, last.mass_rel_err, last.momentum_err,
                last.rank);
    if (res.damping_rate)
      std::printf(" gamma=%.6f", *res.damping_rate);
    std::printf("\n");
  } catch (const wigner::ConfigError& e) {
    return fail("config", e.what());
  } catch (const std::invalid_argument& e) {
    return fail("config", e.what());
  } catch (const wigner::IoError& e) {
    return fail("io", e.what());
  } catch (const wigner::NumericalError& e) {
    return fail("numerical", e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return 0;
}
