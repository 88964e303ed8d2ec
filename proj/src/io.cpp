#include "wigner/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wigner/errors.hpp"

namespace wigner {

const char* const kVersionTag = "wigner-sim 0.1.0";

const char* const kDiagnosticsHeader =
    "t,mass,mass_rel_err,momentum,momentum_err,ee_norm,rank,rank95,rank99,"
    "rank9999,rank999999,rank99999999,imag_residual";

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "problem", "h",          "nx",       "nv",       "lx",
      "lv",      "cfl",        "dt",       "tfinal",   "solver",
      "weno_order", "eps_c",   "eps_s",    "p",        "max_rank",
      "seed",    "snapshot_every", "fit_t0", "fit_t1", "svd_every",
      "threads", "out", "aca_stop"};
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string fmt17(double x) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", x);
  return buf.data();
}

double to_double(const std::string& key, const std::string& s) {
  double x = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last || !std::isfinite(x))
    throw ConfigError("invalid number for '" + key + "': '" + s + "'");
  return x;
}

long long to_integer(const std::string& key, const std::string& s) {
  long long x = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last)
    throw ConfigError("invalid integer for '" + key + "': '" + s + "'");
  return x;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& s) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("invalid seed for '" + key + "': '" + s + "'");
  return x;
}

void put_bytes(std::ostream& os, std::uint64_t bits, int n) {
  std::array<char, 8> b{};
  for (int k = 0; k < n; ++k) b[k] = static_cast<char>((bits >> (8 * k)) & 0xff);
  os.write(b.data(), n);
}

void put_u32(std::ostream& os, std::uint32_t x) { put_bytes(os, x, 4); }
void put_u64(std::ostream& os, std::uint64_t x) { put_bytes(os, x, 8); }
void put_f64(std::ostream& os, double x) {
  put_bytes(os, std::bit_cast<std::uint64_t>(x), 8);
}

std::uint64_t get_bytes(std::istream& is, int n,
                        const std::filesystem::path& path) {
  std::array<unsigned char, 8> b{};
  is.read(reinterpret_cast<char*>(b.data()), n);
  if (!is) throw IoError("truncated file: " + path.string());
  std::uint64_t x = 0;
  for (int k = n - 1; k >= 0; --k) x = (x << 8) | b[k];
  return x;
}

double get_f64(std::istream& is, const std::filesystem::path& path) {
  return std::bit_cast<double>(get_bytes(is, 8, path));
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading: " + path.string());
  return is;
}

void finish(std::ofstream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) throw IoError("write failed: " + path.string());
}

void check_magic(std::istream& is, const char* magic,
                 const std::filesystem::path& path) {
  std::array<char, 4> m{};
  is.read(m.data(), 4);
  if (!is || std::memcmp(m.data(), magic, 4) != 0)
    throw IoError("bad magic in " + path.string());
  const auto version = get_bytes(is, 4, path);
  if (version != 1)
    throw IoError("unsupported version " + std::to_string(version) + " in " +
                  path.string());
}

void put_matrix(std::ostream& os, const MatrixXd& a) {
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) put_f64(os, a(i, j));
}

MatrixXd get_matrix(std::istream& is, Index rows, Index cols,
                    const std::filesystem::path& path) {
  MatrixXd a(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) a(i, j) = get_f64(is, path);
  return a;
}

std::string iso_time(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

std::string canonical_key(const std::string& key) {
  std::string k;
  for (char c : trim(key))
    k.push_back(c == '-' ? '_' : static_cast<char>(std::tolower(
                                     static_cast<unsigned char>(c))));
  if (k == "t") return "tfinal";
  if (k == "mode") return "solver";
  if (k == "rng_seed") return "seed";
  if (k == "candidates") return "p";
  return k;
}

ConfigMap parse_config_map(const std::string& text) {
  ConfigMap map;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = canonical_key(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_keys().contains(key))
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" +
                        trim(line.substr(0, eq)) + "'");
    if (value.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty value for '" +
                        key + "'");
    if (!map.emplace(key, value).second)
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" +
                        key + "'");
  }
  return map;
}

ConfigMap merge_config(ConfigMap base, const ConfigMap& over) {
  if (over.contains("cfl")) base.erase("dt");
  if (over.contains("dt")) base.erase("cfl");
  for (const auto& [k, v] : over) base[k] = v;
  return base;
}

SolverConfig build_config(const ConfigMap& map) {
  for (const auto& [k, v] : map)
    if (!known_keys().contains(k)) throw ConfigError("unknown key '" + k + "'");
  for (const char* req : {"problem", "h", "nx", "nv", "tfinal"})
    if (!map.contains(req))
      throw ConfigError(std::string("missing required key '") +
                        (std::string(req) == "h" ? "H" : req) + "'");
  const bool has_cfl = map.contains("cfl");
  const bool has_dt = map.contains("dt");
  if (has_cfl && has_dt) throw ConfigError("cfl and dt are mutually exclusive");
  if (!has_cfl && !has_dt) throw ConfigError("missing required key 'cfl' or 'dt'");

  SolverConfig cfg;
  const auto get = [&](const char* k) -> const std::string& { return map.at(k); };

  const std::string& problem = get("problem");
  if (problem == "two_stream" || problem == "two-stream")
    cfg.problem = Problem::TwoStream;
  else if (problem == "landau")
    cfg.problem = Problem::Landau;
  else
    throw ConfigError("unknown problem '" + problem + "'");

  cfg.h = to_double("H", get("h"));
  if (!(cfg.h > 0.0)) throw ConfigError("H must be positive");
  cfg.nx = to_integer("nx", get("nx"));
  cfg.nv = to_integer("nv", get("nv"));
  if (cfg.nx < 8 || cfg.nv < 8) throw ConfigError("nx and nv must be >= 8");
  if (cfg.nv % 2 != 0) throw ConfigError("nv must be even");
  cfg.t_final = to_double("tfinal", get("tfinal"));
  if (cfg.t_final < 0.0) throw ConfigError("tfinal must be nonnegative");
  if (has_cfl) {
    cfg.cfl = to_double("cfl", get("cfl"));
    if (!(*cfg.cfl > 0.0)) throw ConfigError("cfl must be positive");
  } else {
    cfg.dt = to_double("dt", get("dt"));
    if (!(*cfg.dt > 0.0)) throw ConfigError("dt must be positive");
  }
  if (map.contains("lx")) {
    cfg.lx = to_double("lx", get("lx"));
    if (!(*cfg.lx > 0.0)) throw ConfigError("lx must be positive");
  }
  if (map.contains("lv")) {
    cfg.lv = to_double("lv", get("lv"));
    if (!(*cfg.lv > 0.0)) throw ConfigError("lv must be positive");
  }
  if (map.contains("solver")) {
    const std::string& m = get("solver");
    if (m == "full")
      cfg.mode = Mode::Full;
    else if (m == "adaptive")
      cfg.mode = Mode::Adaptive;
    else
      throw ConfigError("solver must be full or adaptive, got '" + m + "'");
  }
  if (map.contains("weno_order")) {
    cfg.weno_order = static_cast<int>(to_integer("weno_order", get("weno_order")));
    if (cfg.weno_order != 3 && cfg.weno_order != 5)
      throw ConfigError("weno_order must be 3 or 5");
  }
  if (map.contains("eps_c")) {
    cfg.eps_c = to_double("eps_c", get("eps_c"));
    if (!(cfg.eps_c > 0.0)) throw ConfigError("eps_c must be positive");
  }
  if (map.contains("aca_stop")) {
    const std::string& m = get("aca_stop");
    if (m == "absolute")
      cfg.aca_stop = AcaStop::Absolute;
    else if (m == "relative")
      cfg.aca_stop = AcaStop::Relative;
    else
      throw ConfigError("aca_stop must be absolute or relative, got '" + m + "'");
  }
  if (map.contains("eps_s")) {
    cfg.eps_s = to_double("eps_s", get("eps_s"));
    if (cfg.eps_s < 0.0) throw ConfigError("eps_s must be nonnegative");
  }
  if (map.contains("p")) {
    cfg.candidates = static_cast<int>(to_integer("p", get("p")));
    if (cfg.candidates < 1) throw ConfigError("p must be >= 1");
  }
  if (map.contains("max_rank")) {
    cfg.max_rank = to_integer("max_rank", get("max_rank"));
    if (cfg.max_rank < 0) throw ConfigError("max_rank must be >= 0");
  }
  if (map.contains("seed")) cfg.seed = to_unsigned("seed", get("seed"));
  if (map.contains("snapshot_every")) {
    cfg.snapshot_every = to_integer("snapshot_every", get("snapshot_every"));
    if (cfg.snapshot_every < 0) throw ConfigError("snapshot_every must be >= 0");
  }
  if (map.contains("fit_t0")) cfg.fit_t0 = to_double("fit_t0", get("fit_t0"));
  if (map.contains("fit_t1")) cfg.fit_t1 = to_double("fit_t1", get("fit_t1"));
  if (!(cfg.fit_t1 > cfg.fit_t0)) throw ConfigError("fit_t1 must exceed fit_t0");
  if (map.contains("svd_every")) {
    cfg.svd_every = to_integer("svd_every", get("svd_every"));
    if (cfg.svd_every < 0) throw ConfigError("svd_every must be >= 0");
  }
  if (map.contains("threads")) {
    cfg.threads = static_cast<int>(to_integer("threads", get("threads")));
    if (cfg.threads < 0) throw ConfigError("threads must be >= 0");
  }
  if (map.contains("out")) cfg.out = get("out");
  return cfg;
}

SolverConfig parse_config(const std::string& text) {
  return build_config(parse_config_map(text));
}

std::string problem_name(Problem p) {
  return p == Problem::TwoStream ? "two_stream" : "landau";
}

std::string mode_name(Mode m) { return m == Mode::Full ? "full" : "adaptive"; }

std::string format_config(const SolverConfig& cfg) {
  std::ostringstream os;
  os << "problem = " << problem_name(cfg.problem) << '\n'
     << "H = " << fmt17(cfg.h) << '\n'
     << "nx = " << cfg.nx << '\n'
     << "nv = " << cfg.nv << '\n';
  if (cfg.lx) os << "lx = " << fmt17(*cfg.lx) << '\n';
  if (cfg.lv) os << "lv = " << fmt17(*cfg.lv) << '\n';
  if (cfg.cfl) os << "cfl = " << fmt17(*cfg.cfl) << '\n';
  if (cfg.dt) os << "dt = " << fmt17(*cfg.dt) << '\n';
  os << "tfinal = " << fmt17(cfg.t_final) << '\n'
     << "solver = " << mode_name(cfg.mode) << '\n'
     << "weno_order = " << cfg.weno_order << '\n'
     << "eps_c = " << fmt17(cfg.eps_c) << '\n'
     << "aca_stop = "
     << (cfg.aca_stop == AcaStop::Absolute ? "absolute" : "relative") << '\n'
     << "eps_s = " << fmt17(cfg.eps_s) << '\n'
     << "p = " << cfg.candidates << '\n'
     << "max_rank = " << cfg.max_rank << '\n'
     << "seed = " << cfg.seed << '\n'
     << "snapshot_every = " << cfg.snapshot_every << '\n'
     << "fit_t0 = " << fmt17(cfg.fit_t0) << '\n'
     << "fit_t1 = " << fmt17(cfg.fit_t1) << '\n'
     << "svd_every = " << cfg.svd_every << '\n'
     << "threads = " << cfg.threads << '\n';
  if (!cfg.out.empty()) os << "out = " << cfg.out << '\n';
  return os.str();
}

void write_snapshot(const MatrixXd& f, double t, double h,
                    const std::filesystem::path& path) {
  auto os = open_out(path);
  os.write("WPSN", 4);
  put_u32(os, 1);
  put_u64(os, static_cast<std::uint64_t>(f.rows()));
  put_u64(os, static_cast<std::uint64_t>(f.cols()));
  put_f64(os, t);
  put_f64(os, h);
  put_matrix(os, f);
  finish(os, path);
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  auto is = open_in(path);
  check_magic(is, "WPSN", path);
  const auto nx = static_cast<Index>(get_bytes(is, 8, path));
  const auto nv = static_cast<Index>(get_bytes(is, 8, path));
  Snapshot s;
  s.t = get_f64(is, path);
  s.h = get_f64(is, path);
  s.data = get_matrix(is, nx, nv, path);
  return s;
}

void write_factors(const LowRankFactors<double>& f, double t, double h,
                   const std::filesystem::path& path) {
  auto os = open_out(path);
  os.write("WPLR", 4);
  put_u32(os, 1);
  put_u64(os, static_cast<std::uint64_t>(f.u.rows()));
  put_u64(os, static_cast<std::uint64_t>(f.v.rows()));
  put_u64(os, static_cast<std::uint64_t>(f.rank()));
  put_f64(os, t);
  put_f64(os, h);
  put_matrix(os, f.u);
  for (Index m = 0; m < f.sigma.size(); ++m) put_f64(os, f.sigma[m]);
  put_matrix(os, f.v);
  finish(os, path);
}

FactorSnapshot read_factors(const std::filesystem::path& path) {
  auto is = open_in(path);
  check_magic(is, "WPLR", path);
  const auto nx = static_cast<Index>(get_bytes(is, 8, path));
  const auto nv = static_cast<Index>(get_bytes(is, 8, path));
  const auto r = static_cast<Index>(get_bytes(is, 8, path));
  FactorSnapshot s;
  s.t = get_f64(is, path);
  s.h = get_f64(is, path);
  s.factors.u = get_matrix(is, nx, r, path);
  s.factors.sigma.resize(r);
  for (Index m = 0; m < r; ++m) s.factors.sigma[m] = get_f64(is, path);
  s.factors.v = get_matrix(is, nv, r, path);
  return s;
}

std::string format_diagnostics(const std::vector<DiagnosticsRecord>& records) {
  std::string out = kDiagnosticsHeader;
  out += '\n';
  for (const auto& r : records) {
    out += fmt17(r.t) + ',' + fmt17(r.mass) + ',' + fmt17(r.mass_rel_err) + ',' +
           fmt17(r.momentum) + ',' + fmt17(r.momentum_err) + ',' +
           fmt17(r.ee_norm) + ',' + std::to_string(r.rank);
    for (long k : r.ranks_at_thresholds) out += ',' + std::to_string(k);
    out += ',' + fmt17(r.imag_residual) + '\n';
  }
  return out;
}

void write_diagnostics(const std::vector<DiagnosticsRecord>& records,
                       const std::filesystem::path& path) {
  auto os = open_out(path);
  const std::string text = format_diagnostics(records);
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  finish(os, path);
}

RunResult run(const SolverConfig& cfg, std::ostream* log) {
  const auto start = std::chrono::system_clock::now();
  Simulation sim(cfg);
  RunResult result;
  const bool write = !cfg.out.empty();
  const std::filesystem::path dir(cfg.out);
  if (write) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  }

  const auto snapshot = [&] {
    if (!write) return;
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%06ld", sim.steps_taken());
    const auto base = dir / name;
    write_snapshot(sim.dense_solution(), sim.time(), cfg.h,
                   base.string() + ".bin");
    result.files.push_back(std::string(name) + ".bin");
    if (cfg.mode == Mode::Adaptive) {
      write_factors(sim.factors(), sim.time(), cfg.h, base.string() + ".lr");
      result.files.push_back(std::string(name) + ".lr");
    }
  };

  snapshot();
  long last_snap = 0;
  long last_hits = 0;
  while (!sim.done()) {
    sim.advance();
    if (log && sim.max_rank_hits() > last_hits)
      *log << "warning: max_rank reached at step " << sim.steps_taken()
           << " (t = " << sim.time() << ")\n";
    last_hits = sim.max_rank_hits();
    if (cfg.snapshot_every > 0 && sim.steps_taken() % cfg.snapshot_every == 0) {
      snapshot();
      last_snap = sim.steps_taken();
    }
  }
  if (sim.steps_taken() != last_snap) snapshot();

  result.history = sim.history();
  result.steps = sim.steps_taken();
  result.max_rank_hits = sim.max_rank_hits();
  std::vector<double> t, ee;
  for (const auto& r : result.history) {
    t.push_back(r.t);
    ee.push_back(r.ee_norm);
  }
  result.damping_rate = fit_damping_rate(t, ee, cfg.fit_t0, cfg.fit_t1);

  if (write) {
    write_diagnostics(result.history, dir / "diagnostics.csv");
    result.files.push_back("diagnostics.csv");
    const auto end = std::chrono::system_clock::now();
    nlohmann::ordered_json m;
    m["version"] = kVersionTag;
    m["config"] = format_config(cfg);
    m["rng_seed"] = cfg.seed;
    m["start_time"] = iso_time(start);
    m["end_time"] = iso_time(end);
    m["wall_seconds"] = std::chrono::duration<double>(end - start).count();
    m["steps"] = result.steps;
    m["max_rank_hits"] = result.max_rank_hits;
    if (result.damping_rate)
      m["damping_rate"] = *result.damping_rate;
    else
      m["damping_rate"] = nullptr;
    m["files"] = result.files;
    const auto path = dir / "manifest.json";
    auto os = open_out(path);
    os << m.dump(2) << '\n';
    finish(os, path);
  }
  return result;
}

}  // namespace wigner
