#include "kbsyk/contour_green.hpp"

#include <algorithm>

#include "kbsyk/errors.hpp"

namespace kbsyk {

ContourGreen::ContourGreen(const TimeLattice& lattice)
    : lattice_(lattice), g_(CMatrix::Zero(lattice.n_points, lattice.n_points)) {}

ContourGreen::ContourGreen(const TimeLattice& lattice, CMatrix greater)
    : lattice_(lattice), g_(std::move(greater)) {
  if (g_.rows() != lattice.n_points || g_.cols() != lattice.n_points)
    throw DomainError("matrix shape does not match the lattice");
}

Components derive_components_at(const ContourGreen& g, int i, int j) {
  const int n = g.size();
  if (i < 0 || j < 0 || i >= n || j >= n) throw DomainError("index outside the lattice");
  Components c;
  c.greater = g.greater(i, j);
  c.lesser = g.lesser(i, j);
  c.retarded = step(i, j) * (c.greater - c.lesser);
  c.advanced = step(j, i) * (c.lesser - c.greater);
  c.keldysh = c.greater + c.lesser;
  return c;
}

Components derive_components(const ContourGreen& g, double t1, double t2) {
  return derive_components_at(g, g.lattice().index_of(t1), g.lattice().index_of(t2));
}

void mirror_lower(CMatrix& g, double sign, cplx diagonal) {
  const Eigen::Index n = g.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    g(j, j) = diagonal;
    for (Eigen::Index i = j + 1; i < n; ++i) g(j, i) = sign * std::conj(g(i, j));
  }
}

void symmetrize(ContourGreen& g) {
  CMatrix& m = g.data();
  m = (0.5 * (m - m.adjoint())).eval();
}

double antisymmetry_residual(const ContourGreen& g) {
  const CMatrix& m = g.data();
  double r = 0.0;
  for (int j = 0; j < g.size(); ++j)
    for (int i = j; i < g.size(); ++i) r = std::max(r, std::abs(m(i, j) + std::conj(m(j, i))));
  return r;
}

double diagonal_residual(const ContourGreen& g) {
  double r = 0.0;
  for (int i = 0; i < g.size(); ++i) r = std::max(r, std::abs(g.greater(i, i) - cplx(0.0, -0.5)));
  return r;
}

}  // namespace kbsyk
