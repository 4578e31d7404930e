// Command-line front end. Every subcommand builds a flat run config and hands
// it to the runner, so flag runs and config-file runs share one code path.
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kbsyk/errors.hpp"
#include "kbsyk/runner.hpp"
#include "kbsyk/snapshot.hpp"

namespace {

struct Common {
  std::optional<double> j, lambda_t, dt, tol, damping;
  std::optional<int> q, max_sweeps, trace_stride;
  std::optional<std::string> method, out;
};

void add_common(CLI::App* app, Common& c, bool lattice) {
  app->add_option("--j", c.j, "Interaction strength J");
  app->add_option("--q", c.q, "Body number q");
  app->add_option("--out", c.out, "Output directory");
  if (!lattice) return;
  app->add_option("--lambda-t", c.lambda_t, "Half-width of the time window");
  app->add_option("--dt", c.dt, "Time step");
  app->add_option("--tol", c.tol, "Fixed-point tolerance");
  app->add_option("--max-sweeps", c.max_sweeps, "Sweep budget");
  app->add_option("--damping", c.damping, "Whole-grid update damping");
  app->add_option("--method", c.method, "whole-grid or causal");
  app->add_option("--trace-stride", c.trace_stride, "Lattice steps between trace samples");
}

template <class T>
void put(kbsyk::RunConfig& cfg, const char* key, const std::optional<T>& v) {
  if (v) cfg[key] = *v;
}

void put_common(kbsyk::RunConfig& cfg, const Common& c) {
  put(cfg, "j", c.j);
  put(cfg, "q", c.q);
  put(cfg, "out", c.out);
  put(cfg, "lambda_t", c.lambda_t);
  put(cfg, "dt", c.dt);
  put(cfg, "tol", c.tol);
  put(cfg, "max_sweeps", c.max_sweeps);
  put(cfg, "damping", c.damping);
  put(cfg, "method", c.method);
  put(cfg, "trace_stride", c.trace_stride);
}

// Lattice keys get their documented defaults when driven from flags.
void lattice_defaults(kbsyk::RunConfig& cfg) {
  if (!cfg.contains("lambda_t")) cfg["lambda_t"] = 25.0;
  if (!cfg.contains("dt")) cfg["dt"] = 0.1;
  if (!cfg.contains("j")) cfg["j"] = 0.5;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-time Kadanoff-Baym solver for quenched SYK systems"};
  app.require_subcommand(1);

  Common common;
  kbsyk::RunConfig cfg = kbsyk::RunConfig::object();

  std::string config_path;
  std::vector<std::string> overrides;
  auto* run = app.add_subcommand("run", "Run a flat JSON config or a previous manifest");
  run->add_option("config", config_path, "Config or manifest file")->required();
  run->add_option("--set", overrides, "key=value override (repeatable)");

  double beta = 1.0;
  std::optional<double> omega_max, mixing;
  std::optional<int> n_omega;
  auto* eq = app.add_subcommand("equilibrium", "Solve the thermal Schwinger-Dyson equations");
  add_common(eq, common, false);
  eq->add_option("--beta", beta, "Inverse temperature")->required();
  eq->add_option("--omega-max", omega_max, "Frequency cutoff");
  eq->add_option("--n-omega", n_omega, "Frequency points (power of two)");
  eq->add_option("--mixing", mixing, "Update mixing");

  double beta_init = 1.0;
  std::vector<std::string> baths;
  auto* qu = app.add_subcommand("quench", "Couple a thermal system to reservoirs at t = 0");
  add_common(qu, common, true);
  qu->add_option("--beta-init", beta_init, "Initial inverse temperature")->required();
  qu->add_option("--bath", baths, "Reservoir as beta=..,v=..,n=.. (up to two)");

  double mu = 0.0;
  std::string convention = "liouvillian";
  auto* li = app.add_subcommand("lindblad", "Evolve under the single-fermion Lindblad dissipator");
  add_common(li, common, true);
  li->add_option("--beta-init", beta_init, "Initial inverse temperature")->required();
  li->add_option("--mu", mu, "Dissipation rate")->required();
  li->add_option("--convention", convention, "liouvillian or isolated");

  double beta_a = 2.4, beta_b = 1.2, v_lo = 0.0, v_hi = 1.0, bisect_tol = 0.01;
  auto* mpc = app.add_subcommand("mpc-compare", "Compare two initial temperatures and report crossings");
  add_common(mpc, common, true);
  mpc->add_option("--beta-a", beta_a, "First initial inverse temperature");
  mpc->add_option("--beta-b", beta_b, "Second initial inverse temperature");
  mpc->add_option("--bath", baths, "Reservoir as beta=..,v=..,n=.. (up to two)");
  std::vector<std::string> run_dirs;
  std::optional<double> t_min, deadband;
  mpc->add_option("--runs", run_dirs, "Compare the traces of finished quench or lindblad runs instead");
  mpc->add_option("--t-min", t_min, "Ignore crossings before this time");
  mpc->add_option("--deadband", deadband, "Hysteresis band (default from the fit noise)");

  auto* scan = app.add_subcommand("threshold-scan", "Bisect the reservoir coupling for the crossing threshold");
  add_common(scan, common, true);
  scan->add_option("--beta-a", beta_a, "First initial inverse temperature");
  scan->add_option("--beta-b", beta_b, "Second initial inverse temperature");
  scan->add_option("--bath", baths, "Reservoir as beta=..,n=.. (v is scanned)")->required();
  scan->add_option("--v-lo", v_lo, "Lower coupling")->required();
  scan->add_option("--v-hi", v_hi, "Upper coupling")->required();
  scan->add_option("--bisect-tol", bisect_tol, "Bracket width to stop at");

  std::string snap_in, csv_out;
  int stride = 1;
  auto* dump = app.add_subcommand("snapshot-dump", "Convert a binary snapshot to t1,t2,re,im CSV");
  dump->add_option("snapshot", snap_in, "Snapshot file")->required();
  dump->add_option("csv", csv_out, "Output CSV")->required();
  dump->add_option("--stride", stride, "Keep every stride-th point on both axes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kbsyk::kExitConfig;
  }

  try {
    kbsyk::configure_threads();
    if (dump->parsed()) {
      kbsyk::write_csv(kbsyk::read_snapshot(snap_in), csv_out, stride);
      return kbsyk::kExitOk;
    }
    if (mpc->parsed() && !run_dirs.empty()) {
      if (!baths.empty()) throw kbsyk::ConfigError("--runs and --bath are mutually exclusive");
      kbsyk::CrossingOptions o;
      if (t_min) o.t_min = *t_min;
      if (deadband) o.deadband = *deadband;
      const auto j = kbsyk::compare_runs(run_dirs, o, std::cout);
      if (common.out) {
        std::ofstream os(*common.out);
        if (!os) throw kbsyk::Error("cannot open " + *common.out + " for writing");
        os << j.dump(2) << '\n';
      } else {
        std::cout << j.dump(2) << '\n';
      }
      return kbsyk::kExitOk;
    }
    if (mpc->parsed() && baths.empty()) throw kbsyk::ConfigError("mpc-compare needs --bath or --runs");
    if (run->parsed()) {
      cfg = kbsyk::load_config(config_path);
      for (const auto& o : overrides) kbsyk::apply_override(cfg, o);
    } else if (eq->parsed()) {
      cfg["scenario"] = "equilibrium";
      cfg["beta"] = beta;
      if (!common.j) common.j = 0.5;
      put_common(cfg, common);
      put(cfg, "omega_max", omega_max);
      put(cfg, "n_omega", n_omega);
      put(cfg, "mixing", mixing);
    } else {
      put_common(cfg, common);
      lattice_defaults(cfg);
      auto bath_list = kbsyk::RunConfig::array();
      for (const auto& b : baths) bath_list.push_back(b);
      if (qu->parsed()) {
        cfg["scenario"] = "quench";
        cfg["beta_init"] = beta_init;
        cfg["baths"] = bath_list;
      } else if (li->parsed()) {
        cfg["scenario"] = "lindblad";
        cfg["beta_init"] = beta_init;
        cfg["mu"] = mu;
        cfg["convention"] = convention;
      } else {
        cfg["scenario"] = mpc->parsed() ? "mpc-compare" : "threshold-scan";
        cfg["beta_a"] = beta_a;
        cfg["beta_b"] = beta_b;
        if (scan->parsed()) {
          // The scanned coupling overrides any v given with the reservoir.
          for (auto& b : bath_list)
            if (b.get<std::string>().find("v=") == std::string::npos) b = b.get<std::string>() + ",v=0";
          cfg["v_lo"] = v_lo;
          cfg["v_hi"] = v_hi;
          cfg["bisect_tol"] = bisect_tol;
        }
        cfg["baths"] = bath_list;
        put(cfg, "t_min", t_min);
        put(cfg, "deadband", deadband);
      }
    }
    kbsyk::run(cfg, std::cout);
    return kbsyk::kExitOk;
  } catch (...) {
    return kbsyk::report_exception(std::cerr);
  }
}
