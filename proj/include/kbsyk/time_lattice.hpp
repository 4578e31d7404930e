#pragma once

#include <cstddef>

namespace kbsyk {

// Uniform lattice t_k = (k - n_points/2) delta_t = -lambda_t + k delta_t. The quench
// happens at t = 0, which sits on index n_points/2.
struct TimeLattice {
  double delta_t = 0.1;
  double lambda_t = 25.0;
  int n_points = 500;

  static TimeLattice make(double lambda_t, double delta_t);

  double time(int k) const { return (k - n_points / 2) * delta_t; }
  int zero_index() const { return n_points / 2; }
  // Index of an on-lattice time; throws DomainError otherwise.
  int index_of(double t) const;
  bool contains(double t) const;
  bool operator==(const TimeLattice& o) const;
};

}  // namespace kbsyk
