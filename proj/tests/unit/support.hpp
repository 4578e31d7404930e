#pragma once

#include <complex>
#include <map>
#include <random>

#include "kbsyk/kbsyk.hpp"

namespace testing {

using kbsyk::cplx;

// Equilibrium states are reused across test cases; solves are keyed by
// (beta, lattice step, lattice span).
inline const kbsyk::EquilibriumState& thermal(double beta, const kbsyk::TimeLattice& lat) {
  static std::map<std::tuple<double, double, double>, kbsyk::EquilibriumState> cache;
  const auto key = std::make_tuple(beta, lat.delta_t, lat.lambda_t);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, kbsyk::solve_equilibrium(kbsyk::EquilibriumParams::for_lattice(beta, 0.5, lat))).first;
  return it->second;
}

inline kbsyk::ContourGreen thermal_grid(double beta, const kbsyk::TimeLattice& lat) {
  return kbsyk::lay_initial_condition(thermal(beta, lat), lat);
}

inline kbsyk::ContourGreen constant_grid(const kbsyk::TimeLattice& lat, cplx value) {
  return kbsyk::ContourGreen(lat, kbsyk::CMatrix::Constant(lat.n_points, lat.n_points, value));
}

inline kbsyk::CMatrix random_matrix(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> d;
  kbsyk::CMatrix m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) m(i, j) = cplx(d(rng), d(rng));
  return m;
}

inline double max_abs(const kbsyk::CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testing
