#include "kbsyk/runner.hpp"

#include <fftw3.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <Eigen/Core>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "kbsyk/kbsyk.hpp"

namespace kbsyk {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

const std::vector<std::string> kScenarios = {"equilibrium", "quench", "lindblad", "mpc-compare", "threshold-scan"};

const std::vector<std::string> kKeys = {
    "scenario", "out",       "j",          "q",           "beta",        "omega_max", "n_omega",
    "mixing",   "eq_tol",    "beta_init",  "beta_a",      "beta_b",      "baths",     "mu",
    "convention", "lambda_t", "dt",        "tol",         "max_sweeps",  "damping",   "method",
    "trace_stride", "edge_margin", "v_lo", "v_hi",        "bisect_tol",  "t_min",     "deadband"};

double num(const RunConfig& c, const char* key, double fallback) {
  if (!c.contains(key)) return fallback;
  if (!c[key].is_number()) throw ConfigError(std::string("key '") + key + "' must be a number");
  return c[key].get<double>();
}

double req(const RunConfig& c, const char* key) {
  if (!c.contains(key)) throw ConfigError(std::string("missing required key '") + key + "'");
  return num(c, key, 0.0);
}

int integer(const RunConfig& c, const char* key, int fallback) {
  const double v = num(c, key, fallback);
  if (v != std::floor(v)) throw ConfigError(std::string("key '") + key + "' must be an integer");
  return static_cast<int>(v);
}

std::string str(const RunConfig& c, const char* key, const std::string& fallback) {
  if (!c.contains(key)) return fallback;
  if (!c[key].is_string()) throw ConfigError(std::string("key '") + key + "' must be a string");
  return c[key].get<std::string>();
}

struct BathArg {
  double beta, v;
  int n;
};

BathArg parse_bath(const json& spec) {
  BathArg b{0.5, 0.0, 3};
  std::set<std::string> seen;
  auto set = [&](const std::string& k, double v) {
    if (k == "beta")
      b.beta = v;
    else if (k == "v")
      b.v = v;
    else if (k == "n")
      b.n = static_cast<int>(v);
    else
      throw ConfigError("unknown reservoir field '" + k + "' (expected beta, v, n)");
    seen.insert(k);
  };
  if (spec.is_string()) {
    std::stringstream ss(spec.get<std::string>());
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("reservoir entry '" + item + "' is not key=value");
      try {
        set(item.substr(0, eq), std::stod(item.substr(eq + 1)));
      } catch (const std::invalid_argument&) {
        throw ConfigError("reservoir entry '" + item + "' has a non-numeric value");
      }
    }
  } else if (spec.is_object()) {
    for (auto it = spec.begin(); it != spec.end(); ++it) set(it.key(), it.value().get<double>());
  } else {
    throw ConfigError("reservoir must be a string like beta=0.5,v=0.4,n=3 or an object");
  }
  if (!seen.count("beta") || !seen.count("v")) throw ConfigError("reservoir needs at least beta and v");
  return b;
}

std::vector<BathArg> baths_of(const RunConfig& c) {
  std::vector<BathArg> out;
  if (!c.contains("baths")) return out;
  const auto& b = c["baths"];
  if (b.is_array())
    for (const auto& x : b) out.push_back(parse_bath(x));
  else
    out.push_back(parse_bath(b));
  if (out.size() > 2) throw ConfigError("at most two reservoirs");
  return out;
}

TimeLattice lattice_of(const RunConfig& c) { return TimeLattice::make(num(c, "lambda_t", 25.0), num(c, "dt", 0.1)); }

PropagationOptions propagation_of(const RunConfig& c) {
  PropagationOptions p;
  p.tol = num(c, "tol", p.tol);
  p.max_sweeps = integer(c, "max_sweeps", p.max_sweeps);
  p.damping = num(c, "damping", p.damping);
  p.method = parse_method(str(c, "method", "whole-grid"));
  return p;
}

TraceOptions trace_of(const RunConfig& c) {
  TraceOptions t;
  t.stride = integer(c, "trace_stride", t.stride);
  t.edge_margin = num(c, "edge_margin", t.edge_margin);
  return t;
}

CrossingOptions crossing_of(const RunConfig& c) {
  CrossingOptions o;
  o.t_min = num(c, "t_min", 0.0);
  o.deadband = num(c, "deadband", -1.0);
  return o;
}

QuenchConfig quench_of(const RunConfig& c, double beta) {
  QuenchConfig q;
  q.lattice = lattice_of(c);
  q.system = EquilibriumParams::for_lattice(beta, req(c, "j"), q.lattice, integer(c, "q", 4));
  q.propagation = propagation_of(c);
  for (const auto& b : baths_of(c)) q.baths.push_back(BathSpec::make(b.beta, b.v, b.n, q.lattice, q.system.coupling_j));
  return q;
}

json report_json(const PropagationReport& r) {
  return {{"sweeps", r.sweeps}, {"final_update", r.final_update}, {"damping", r.damping}};
}

std::string versions_compiler() {
#if defined(__clang__)
  return "clang " __clang_version__;
#elif defined(__GNUC__)
  return "gcc " __VERSION__;
#else
  return "unknown";
#endif
}

}  // namespace

std::vector<std::string> known_keys() { return kKeys; }

std::vector<std::string> required_keys(const std::string& scenario) {
  if (scenario == "equilibrium") return {"scenario", "beta", "j"};
  if (scenario == "quench") return {"scenario", "j", "beta_init", "baths", "lambda_t", "dt"};
  if (scenario == "lindblad") return {"scenario", "j", "beta_init", "mu", "lambda_t", "dt"};
  if (scenario == "mpc-compare") return {"scenario", "j", "beta_a", "beta_b", "baths", "lambda_t", "dt"};
  if (scenario == "threshold-scan")
    return {"scenario", "j", "beta_a", "beta_b", "baths", "lambda_t", "dt", "v_lo", "v_hi"};
  return {"scenario"};
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  RunConfig c;
  try {
    is >> c;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  if (c.is_object() && c.contains("config") && c.contains("versions")) return c["config"];
  if (!c.is_object()) throw ConfigError("config file must hold a flat JSON object");
  return c;
}

void validate_config(const RunConfig& c) {
  if (!c.is_object()) throw ConfigError("config must be a flat object");
  std::vector<std::string> unknown, missing;
  for (auto it = c.begin(); it != c.end(); ++it)
    if (std::find(kKeys.begin(), kKeys.end(), it.key()) == kKeys.end()) unknown.push_back(it.key());
  const std::string scenario = c.contains("scenario") && c["scenario"].is_string() ? c["scenario"].get<std::string>() : "";
  for (const auto& k : required_keys(scenario))
    if (!c.contains(k)) missing.push_back(k);
  std::ostringstream os;
  if (!unknown.empty()) {
    os << "unknown keys:";
    for (const auto& k : unknown) os << ' ' << k;
    os << ". ";
  }
  if (!missing.empty()) {
    os << "missing required keys:";
    for (const auto& k : missing) os << ' ' << k;
    os << ". ";
  }
  if (!scenario.empty() && std::find(kScenarios.begin(), kScenarios.end(), scenario) == kScenarios.end())
    os << "unknown scenario '" << scenario << "'. ";
  if (!os.str().empty()) throw ConfigError(os.str());
}

void apply_override(RunConfig& c, const std::string& a) {
  const auto eq = a.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + a + "' is not key=value");
  const std::string key = a.substr(0, eq), value = a.substr(eq + 1);
  try {
    c[key] = json::parse(value);
  } catch (const nlohmann::json::parse_error&) {
    c[key] = value;
  }
}

int configure_threads() {
  const char* env = std::getenv("KBSYK_THREADS");
  if (!env) return Eigen::nbThreads();
  const int n = std::atoi(env);
  if (n < 1) throw ConfigError("KBSYK_THREADS must be a positive integer");
  Eigen::setNbThreads(n);
#ifdef _OPENMP
  omp_set_num_threads(n);
#endif
  return n;
}

RunOutcome run(const RunConfig& cfg, std::ostream& log) {
  validate_config(cfg);
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const std::string scenario = cfg["scenario"].get<std::string>();
  const fs::path out = str(cfg, "out", "run_" + scenario);
  fs::create_directories(out);
  RunOutcome res;
  json timings = json::object();
  auto lap = [&](const char* name, clock::time_point since) {
    timings[name] = std::chrono::duration<double>(clock::now() - since).count();
  };
  auto emit = [&](const fs::path& p) { res.files.push_back(p.string()); };

  if (scenario == "equilibrium") {
    const double j = req(cfg, "j"), beta = req(cfg, "beta");
    EquilibriumParams p = EquilibriumParams::defaults(beta, j, integer(cfg, "q", 4));
    if (cfg.contains("dt")) {
      p = EquilibriumParams::for_lattice(beta, j, lattice_of(cfg), p.q_body);
    }
    p.omega_max = num(cfg, "omega_max", p.omega_max);
    p.n_omega = integer(cfg, "n_omega", p.n_omega);
    p.mixing = num(cfg, "mixing", p.mixing);
    p.tol = num(cfg, "eq_tol", p.tol);
    auto s = solve_equilibrium(p);
    lap("solve", t0);
    std::ofstream csv(out / "spectral.csv");
    csv << "omega,re_gr,im_gr,a\n";
    for (std::size_t k = 0; k < s.omega.size(); ++k)
      csv << format_double(s.omega[k]) << ',' << format_double(s.retarded[k].real()) << ','
          << format_double(s.retarded[k].imag()) << ',' << format_double(s.spectral[k]) << '\n';
    emit(out / "spectral.csv");
    const int pts = std::min(500, p.n_omega / 4) / 2 * 2;
    const double dt = s.time_step();
    const TimeLattice lat = cfg.contains("lambda_t") && cfg.contains("dt") ? lattice_of(cfg)
                                                                          : TimeLattice{dt, 0.5 * pts * dt, pts};
    write_snapshot(lay_initial_condition(s, lat), (out / "greater.snap").string());
    emit(out / "greater.snap");
    res.summary = {{"iterations", s.iterations}, {"kms_residual", s.kms_residual()}, {"sum_rule", s.sum_rule()}};
  } else if (scenario == "quench") {
    const QuenchConfig q = quench_of(cfg, req(cfg, "beta_init"));
    const auto t1 = clock::now();
    auto r = evolve_quench(q);
    lap("evolve", t1);
    const auto t2 = clock::now();
    const auto tr = beta_trace(r.green, q.system.coupling_j, trace_of(cfg));
    lap("observables", t2);
    tr.write_csv((out / "trace.csv").string());
    emit(out / "trace.csv");
    write_snapshot(r.green, (out / "greater.snap").string());
    emit(out / "greater.snap");
    res.summary = {{"propagation", report_json(r.report)}};
  } else if (scenario == "lindblad") {
    LindbladConfig l;
    l.lattice = lattice_of(cfg);
    l.system = EquilibriumParams::for_lattice(req(cfg, "beta_init"), req(cfg, "j"), l.lattice, integer(cfg, "q", 4));
    l.mu = req(cfg, "mu");
    l.propagation = propagation_of(cfg);
    const std::string conv = str(cfg, "convention", "liouvillian");
    if (conv == "liouvillian")
      l.convention = LindbladConvention::Liouvillian;
    else if (conv == "isolated")
      l.convention = LindbladConvention::Isolated;
    else
      throw ConfigError("convention must be liouvillian or isolated");
    const auto t1 = clock::now();
    auto r = evolve_lindblad(l);
    lap("evolve", t1);
    const auto t2 = clock::now();
    const auto tr = beta_trace_liouvillian(r.green, l.system.coupling_j, trace_of(cfg));
    lap("observables", t2);
    tr.write_csv((out / "trace.csv").string());
    emit(out / "trace.csv");
    const std::pair<const char*, const CMatrix*> comps[] = {{"plus_plus", &r.green.plus_plus},
                                                            {"plus_minus", &r.green.plus_minus},
                                                            {"minus_plus", &r.green.minus_plus},
                                                            {"minus_minus", &r.green.minus_minus}};
    for (const auto& [name, m] : comps) {
      const fs::path p = out / (std::string(name) + ".snap");
      write_snapshot(*m, l.lattice, p.string());
      emit(p);
    }
    res.summary = {{"propagation", report_json(r.report)}};
  } else if (scenario == "mpc-compare" || scenario == "threshold-scan") {
    MpcSetup s;
    s.base = quench_of(cfg, req(cfg, "beta_a"));
    s.beta_init_a = req(cfg, "beta_a");
    s.beta_init_b = req(cfg, "beta_b");
    s.trace = trace_of(cfg);
    s.crossing = crossing_of(cfg);
    const auto t1 = clock::now();
    if (scenario == "mpc-compare") {
      auto m = mpc_compare(s);
      lap("compare", t1);
      m.trace_a.write_csv((out / "trace_a.csv").string());
      m.trace_b.write_csv((out / "trace_b.csv").string());
      std::ofstream((out / "crossings.json").string()) << m.report.to_json() << '\n';
      emit(out / "trace_a.csv");
      emit(out / "trace_b.csv");
      emit(out / "crossings.json");
      res.summary = json::parse(m.report.to_json());
    } else {
      auto t = threshold_scan(s, req(cfg, "v_lo"), req(cfg, "v_hi"), num(cfg, "bisect_tol", 0.01));
      lap("scan", t1);
      json j = {{"v_threshold", t.v_threshold}, {"v_low", t.v_low}, {"v_high", t.v_high}};
      j["probes"] = json::array();
      for (const auto& p : t.probes) j["probes"].push_back({{"v", p.v}, {"crossings", p.crossings}});
      std::ofstream((out / "threshold.json").string()) << j.dump(2) << '\n';
      emit(out / "threshold.json");
      res.summary = j;
    }
  }
  lap("total", t0);

  json manifest;
  manifest["scenario"] = scenario;
  manifest["config"] = cfg;
  manifest["seedless"] = true;
  json versions;
  versions["kbsyk"] = KBSYK_VERSION;
  versions["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION);
  versions["fftw"] = std::string(fftw_version);
  versions["compiler"] = versions_compiler();
  manifest["versions"] = versions;
  manifest["timings"] = timings;
  manifest["outputs"] = res.files;
  manifest["summary"] = res.summary;
  std::ofstream((out / "manifest.json").string()) << manifest.dump(2) << '\n';
  res.files.push_back((out / "manifest.json").string());
  log << scenario << " finished in " << timings["total"].get<double>() << " s; outputs in " << out.string() << '\n';
  return res;
}

json compare_runs(const std::vector<std::string>& dirs, const CrossingOptions& opts, std::ostream& log) {
  if (dirs.size() < 2) throw ConfigError("mpc-compare needs at least two run directories");
  struct Loaded {
    std::string dir;
    double lambda_t, dt;
    BetaTrace trace;
  };
  std::vector<Loaded> runs;
  for (const auto& d : dirs) {
    const fs::path m = fs::path(d) / "manifest.json";
    const RunConfig cfg = load_config(m.string());
    const std::string scenario = str(cfg, "scenario", "");
    if (scenario != "quench" && scenario != "lindblad")
      throw ConfigError(d + " is a '" + scenario + "' run; only quench and lindblad runs carry a single trace");
    runs.push_back({d, req(cfg, "lambda_t"), req(cfg, "dt"), read_beta_trace((fs::path(d) / "trace.csv").string())});
  }
  for (const auto& r : runs)
    if (r.lambda_t != runs[0].lambda_t || r.dt != runs[0].dt)
      throw DomainError("run " + r.dir + " uses another lattice than " + runs[0].dir);

  json out;
  out["pairs"] = json::array();
  log << "run_a\trun_b\tcrossings\tparity\tmin_separation\n";
  for (std::size_t a = 0; a < runs.size(); ++a)
    for (std::size_t b = a + 1; b < runs.size(); ++b) {
      const auto rep = detect_crossings(runs[a].trace, runs[b].trace, opts);
      json p = {{"a", runs[a].dir}, {"b", runs[b].dir}};
      const json r = json::parse(rep.to_json());
      for (auto it = r.begin(); it != r.end(); ++it) p[it.key()] = it.value();
      out["pairs"].push_back(p);
      log << runs[a].dir << '\t' << runs[b].dir << '\t' << rep.count() << '\t' << rep.parity << '\t'
          << rep.min_separation << '\n';
    }
  return out;
}

int report_exception(std::ostream& err) {
  try {
    throw;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NonConvergenceError& e) {
    err << "not converged: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const BracketError& e) {
    err << "bracket error: " << e.what() << '\n';
    return kExitBracket;
  } catch (const DomainError& e) {
    err << "invalid parameters: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace kbsyk
