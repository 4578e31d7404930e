#pragma once

#include <vector>

#include "kbsyk/contour_green.hpp"

namespace kbsyk {

// Retarded and Keldysh components at fixed centre time, transformed over the
// relative time. omega ascends over [-pi/tau, pi/tau) with tau the relative
// time step of the slice.
struct KeldyshSlice {
  double center_time = 0.0;
  double relative_step = 0.0;
  double relative_span = 0.0;
  std::vector<double> omega;
  std::vector<cplx> retarded;
  std::vector<cplx> keldysh;
  // Largest |G_R| over the last 10% of the relative-time window divided by
  // |G_R| at zero separation. Near 1 means the correlator never decayed.
  double tail_ratio = 0.0;
  // Quadrature-weighted samples behind the transform, at relative times
  // sample_time[k].
  std::vector<double> sample_time;
  std::vector<cplx> retarded_samples, keldysh_samples;

  int zero_bin() const { return static_cast<int>(omega.size() / 2); }
  double bin_spacing() const { return omega.size() > 1 ? omega[1] - omega[0] : 0.0; }
  // The same discrete transform at an arbitrary frequency.
  void evaluate(double w, cplx& retarded_w, cplx& keldysh_w) const;
};

inline constexpr int kSlicePadding = 4;

// Half-line transform over t' >= 0 of G(t + t'/2, t - t'/2).
KeldyshSlice wigner_slice(const ContourGreen& g, double t);

// Full-line transform of theta(t') G(t - t', t) + theta(-t') G(t, t + t').
// Uses only times up to t. In equilibrium Im retarded matches the Wigner slice
// and Im keldysh is -2 times the Wigner value.
KeldyshSlice corner_slice(const ContourGreen& g, double t);

// Wigner slice of a Green's function stored in the Liouvillian convention,
// where g(t2,t1) = conj g(t1,t2) and the lesser part is -g(t2,t1).
KeldyshSlice wigner_slice_liouvillian(const CMatrix& g_greater, const TimeLattice& lattice, double t);

}  // namespace kbsyk
