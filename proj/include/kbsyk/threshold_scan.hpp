#pragma once

#include <vector>

#include "kbsyk/observables.hpp"

namespace kbsyk {

// Two quenches that differ only in the initial temperature, compared through
// their effective-temperature traces.
struct MpcSetup {
  QuenchConfig base;  // system.beta is ignored; reservoirs carry their own couplings
  double beta_init_a = 2.4;
  double beta_init_b = 1.2;
  TraceOptions trace;
  CrossingOptions crossing;
};

struct MpcComparison {
  BetaTrace trace_a, trace_b;
  CrossingReport report;
  PropagationReport report_a, report_b;
};

MpcComparison mpc_compare(const MpcSetup& setup);
// Same comparison with precomputed initial states.
MpcComparison mpc_compare(const MpcSetup& setup, const ContourGreen& initial_a,
                          const ContourGreen& initial_b);

struct ScanProbe {
  double v;
  int crossings;
};

struct ThresholdResult {
  double v_threshold = 0.0;
  double v_low = 0.0;   // largest probed coupling without a crossing
  double v_high = 0.0;  // smallest probed coupling with one
  std::vector<ScanProbe> probes;
};

// Every reservoir coupling is set to v. Bisects on the presence of a crossing.
ThresholdResult threshold_scan(const MpcSetup& setup, double v_lo, double v_hi, double bisect_tol);

}  // namespace kbsyk
