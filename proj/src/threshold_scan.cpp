#include "kbsyk/threshold_scan.hpp"

#include <cmath>
#include <sstream>

#include "kbsyk/errors.hpp"

namespace kbsyk {

namespace {

ContourGreen initial_state(const MpcSetup& s, double beta) {
  const auto& sys = s.base.system;
  const auto eq = solve_equilibrium(EquilibriumParams::for_lattice(beta, sys.coupling_j, s.base.lattice, sys.q_body));
  return lay_initial_condition(eq, s.base.lattice);
}

}  // namespace

MpcComparison mpc_compare(const MpcSetup& s, const ContourGreen& ia, const ContourGreen& ib) {
  MpcComparison out;
  auto ra = evolve_quench(s.base, ia);
  out.trace_a = beta_trace(ra.green, s.base.system.coupling_j, s.trace);
  out.report_a = ra.report;
  auto rb = evolve_quench(s.base, ib);
  out.trace_b = beta_trace(rb.green, s.base.system.coupling_j, s.trace);
  out.report_b = rb.report;
  out.report = detect_crossings(out.trace_a, out.trace_b, s.crossing);
  return out;
}

MpcComparison mpc_compare(const MpcSetup& s) {
  return mpc_compare(s, initial_state(s, s.beta_init_a), initial_state(s, s.beta_init_b));
}

ThresholdResult threshold_scan(const MpcSetup& setup, double v_lo, double v_hi, double bisect_tol) {
  if (!(v_lo >= 0.0) || !(v_hi > v_lo) || !(bisect_tol > 0.0))
    throw DomainError("threshold scan needs 0 <= v_lo < v_hi and a positive tolerance");
  if (setup.base.baths.empty()) throw DomainError("threshold scan needs at least one reservoir");
  const ContourGreen ia = initial_state(setup, setup.beta_init_a);
  const ContourGreen ib = initial_state(setup, setup.beta_init_b);
  ThresholdResult res;
  auto probe = [&](double v) {
    MpcSetup s = setup;
    for (auto& b : s.base.baths) b.coupling_v = v;
    const int c = static_cast<int>(mpc_compare(s, ia, ib).report.count());
    res.probes.push_back({v, c});
    return c > 0;
  };
  const bool lo_cross = probe(v_lo);
  const bool hi_cross = probe(v_hi);
  if (lo_cross == hi_cross) {
    std::ostringstream os;
    os << "crossing status is the same (" << (lo_cross ? "present" : "absent") << ") at V = " << v_lo
       << " and V = " << v_hi;
    throw BracketError(os.str());
  }
  double a = v_lo, b = v_hi;
  while (b - a > bisect_tol) {
    const double mid = 0.5 * (a + b);
    if (probe(mid) == hi_cross)
      b = mid;
    else
      a = mid;
  }
  res.v_low = hi_cross ? a : b;
  res.v_high = hi_cross ? b : a;
  res.v_threshold = 0.5 * (a + b);
  return res;
}

}  // namespace kbsyk
