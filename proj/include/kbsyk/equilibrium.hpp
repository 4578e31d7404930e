#pragma once

#include <vector>

#include "kbsyk/contour_green.hpp"

namespace kbsyk {

struct EquilibriumParams {
  double beta = 1.0;
  double coupling_j = 0.5;
  int q_body = 4;
  double omega_max = 8.0;
  int n_omega = 4096;
  double mixing = 0.3;
  double tol = 1e-10;
  int max_iters = 5000;

  // omega_max = 16 J, or 8 for J = 0.
  static EquilibriumParams defaults(double beta, double coupling_j, int q_body = 4);
  // Frequency grid whose time step equals the lattice step and whose time
  // window covers every lattice separation with room to spare.
  static EquilibriumParams for_lattice(double beta, double coupling_j, const TimeLattice& lattice,
                                       int q_body = 4);
  void validate() const;

  double d_omega() const { return 2.0 * omega_max / n_omega; }
  double time_step() const;
};

struct EquilibriumState {
  EquilibriumParams params;
  std::vector<double> omega;       // ascending, omega_k = (k - N/2) d_omega
  std::vector<cplx> retarded;      // G_R(omega)
  std::vector<double> spectral;    // A = -2 Im G_R
  std::vector<double> time;        // t_m = (m - N/2) dt
  std::vector<cplx> greater_time;  // g>(t)
  int iterations = 0;
  std::vector<double> residual_history;

  double time_step() const { return params.time_step(); }
  // g>(k dt) for |k| < N/2.
  cplx greater_at_offset(long k) const;
  // max |G>(w) + exp(beta w) G<(w)| / max |G>| over |w| <= min(omega_max, 16 J) / 2
  // and beta |w| <= ln(tol / eps). G<(w) is built from g<(t) = -g>(-t) in the time domain.
  double kms_residual() const;
  double sum_rule() const;
  // -i times the inverse transform of A, i.e. G_R(t) for t > 0.
  std::vector<cplx> retarded_time_from_spectral() const;
};

// Low-temperature power-law seed, or a Lorentzian when beta = 0.
std::vector<cplx> conformal_seed(const EquilibriumParams& params);
double conformal_prefactor(double coupling_j, int q_body);
// Closed-form conformal G_R(t) for t > 0 at beta > 0.
cplx conformal_retarded(double beta, double coupling_j, int q_body, double t);

EquilibriumState solve_equilibrium(const EquilibriumParams& params);

// G(t1,t2) = c g>(t1 - t2) on every lattice point, with the constant c chosen
// so that the diagonal is exactly -i/2.
ContourGreen lay_initial_condition(const EquilibriumState& state, const TimeLattice& lattice);

}  // namespace kbsyk
