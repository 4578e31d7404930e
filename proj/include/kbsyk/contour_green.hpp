#pragma once

#include <complex>

#include <Eigen/Dense>

#include "kbsyk/time_lattice.hpp"

namespace kbsyk {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

// Majorana Green's function stored as its greater component on a square
// two-time lattice. The lesser component follows from g<(t1,t2) = -g>(t2,t1).
class ContourGreen {
 public:
  ContourGreen() = default;
  explicit ContourGreen(const TimeLattice& lattice);
  ContourGreen(const TimeLattice& lattice, CMatrix greater);

  const TimeLattice& lattice() const { return lattice_; }
  int size() const { return lattice_.n_points; }

  cplx greater(int i, int j) const { return g_(i, j); }
  cplx lesser(int i, int j) const { return -g_(j, i); }
  CMatrix& data() { return g_; }
  const CMatrix& data() const { return g_; }

 private:
  TimeLattice lattice_;
  CMatrix g_;
};

struct Components {
  cplx greater, lesser, retarded, advanced, keldysh;
};

inline constexpr double kThetaZero = 0.5;
inline double step(int i, int j) { return i > j ? 1.0 : (i == j ? kThetaZero : 0.0); }

Components derive_components(const ContourGreen& g, double t1, double t2);
Components derive_components_at(const ContourGreen& g, int i, int j);

// Projects onto g(t2,t1) = -conj g(t1,t2) via g <- (g - g^dagger) / 2. The
// diagonal keeps only its imaginary part.
void symmetrize(ContourGreen& g);
void mirror_lower(CMatrix& g, double sign, cplx diagonal);

double antisymmetry_residual(const ContourGreen& g);
double diagonal_residual(const ContourGreen& g);

}  // namespace kbsyk
