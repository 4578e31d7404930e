#include "kbsyk/lindblad.hpp"

#include <cmath>

#include "kbsyk/errors.hpp"

namespace kbsyk {

namespace {

cplx ipow(int n) {
  static const cplx table[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
  return table[((n % 4) + 4) % 4];
}

cplx power(cplx x, int n) {
  cplx r = 1.0;
  for (int k = 0; k < n; ++k) r *= x;
  return r;
}

double switch_on(int i, int zero) { return i > zero ? 1.0 : (i == zero ? 0.5 : 0.0); }

const cplx I(0.0, 1.0);

void validate(const LindbladConfig& cfg) {
  cfg.system.validate();
  if (!(cfg.mu >= 0.0) || !std::isfinite(cfg.mu)) throw DomainError("mu must be finite and >= 0");
}

}  // namespace

CMatrix map_initial_condition(const ContourGreen& g) { return -I * g.data(); }

ContourGreen unmap_to_isolated(const CMatrix& g, const TimeLattice& lattice) {
  return ContourGreen(lattice, I * g);
}

LiouvillianGreen contour_components(const CMatrix& g, const TimeLattice& lattice) {
  const int n = lattice.n_points;
  LiouvillianGreen out;
  out.lattice = lattice;
  out.minus_plus = g;
  out.plus_minus = -g.transpose();
  out.plus_plus.resize(n, n);
  out.minus_minus.resize(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const cplx gt = I * g(i, j), lt = -I * g(j, i);
      out.plus_plus(i, j) = step(i, j) * gt + step(j, i) * lt;
      out.minus_minus(i, j) = -(step(j, i) * gt + step(i, j) * lt);
    }
  return out;
}

ContourSelfEnergy lindblad_self_energy(const LiouvillianGreen& g, double coupling_j, int q_body, double mu,
                                       double t1, double t2) {
  const TimeLattice& lat = g.lattice;
  const int i = lat.index_of(t1), j = lat.index_of(t2), zero = lat.zero_index();
  const cplx pre = -ipow(q_body) * coupling_j * coupling_j;
  const cplx gt = I * g.minus_plus(i, j), lt = I * g.plus_minus(i, j);
  cplx sg = pre * power(gt, q_body - 1);
  cplx sl = pre * power(lt, q_body - 1);
  if (i == j) {
    const double d = mu * switch_on(i, zero) * switch_on(j, zero) / lat.delta_t;
    sg += -I * d;
    sl += I * d;
  }
  const cplx st = step(i, j) * sg + step(j, i) * sl;
  const cplx sa = step(j, i) * sg + step(i, j) * sl;
  return ContourSelfEnergy{st, -I * sl, -I * sg, -sa};
}

ContourKernel::ContourKernel(double coupling_j, int q_body, double mu, const TimeLattice& lattice,
                             LindbladConvention convention)
    : j2_(coupling_j * coupling_j),
      q_(q_body),
      mu_(mu),
      dt_(lattice.delta_t),
      zero_(lattice.zero_index()),
      conv_(convention),
      w_(memory_weights(lattice.n_points)) {
  if (conv_ == LindbladConvention::Liouvillian) {
    factor = -I;
    mirror_sign = 1.0;
    diagonal = cplx(-0.5, 0.0);
  } else {
    factor = I;
    mirror_sign = -1.0;
    diagonal = cplx(0.0, -0.5);
  }
}

// In the Liouvillian convention the stored function is -i g>, and the
// branch components carry the factors (++: 1, --: -1) relative to g^T and g^T~.
cplx ContourKernel::time_ordered(const CMatrix& g, int i, int j) const {
  const cplx c = conv_ == LindbladConvention::Liouvillian ? I : cplx(1.0);
  return step(i, j) * c * g(i, j) - step(j, i) * c * g(j, i);
}

cplx ContourKernel::anti_time_ordered(const CMatrix& g, int i, int j) const {
  const cplx c = conv_ == LindbladConvention::Liouvillian ? I : cplx(1.0);
  const double s = conv_ == LindbladConvention::Liouvillian ? -1.0 : 1.0;
  return s * (step(j, i) * c * g(i, j) - step(i, j) * c * g(j, i));
}

cplx ContourKernel::sigma_mp(cplx x) const {
  const cplx pre = conv_ == LindbladConvention::Liouvillian ? ipow(2 * q_) : ipow(q_);
  return pre * j2_ * power(x, q_ - 1);
}

cplx ContourKernel::sigma_mm(cplx y) const {
  const cplx pre = conv_ == LindbladConvention::Liouvillian ? ipow(q_) * ((q_ - 1) % 2 ? -1.0 : 1.0)
                                                            : -ipow(q_);
  return pre * j2_ * power(y, q_ - 1);
}

double ContourKernel::dissipator(int i) const {
  const double th = i > zero_ ? 1.0 : (i == zero_ ? 0.5 : 0.0);
  return mu_ * th * th / dt_;
}

void ContourKernel::rows(const CMatrix& g, int row_begin, CMatrix& out) {
  const int n = static_cast<int>(g.rows());
  const int m = n - row_begin;
  const cplx diss = conv_ == LindbladConvention::Liouvillian ? cplx(-1.0) : I;
  CMatrix a = CMatrix::Zero(m, n), c = CMatrix::Zero(m, n);
  gpp_.resize(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) gpp_(i, j) = time_ordered(g, i, j);
  for (int k = 0; k < n; ++k)
    for (int r = std::max(0, k - row_begin); r < m; ++r) {
      const int i = row_begin + r;
      a(r, k) = w_(k) * sigma_mp(g(i, k));
      c(r, k) = w_(k) * sigma_mm(anti_time_ordered(g, i, k));
    }
  for (int r = 0; r < m; ++r) a(r, row_begin + r) += w_(row_begin + r) * diss * dissipator(row_begin + r);
  out.bottomRows(m).noalias() = dt_ * (a * gpp_);
  out.bottomRows(m).noalias() += dt_ * (c * g);
}

void ContourKernel::begin_causal(const CMatrix& g, int) {
  const int n = static_cast<int>(g.rows());
  gpp_.resize(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) gpp_(i, j) = time_ordered(g, i, j);
}

void ContourKernel::row(const CMatrix& g, int m, Eigen::VectorXcd& out) {
  const cplx diss = conv_ == LindbladConvention::Liouvillian ? cplx(-1.0) : I;
  Eigen::VectorXcd a(m + 1), c(m + 1);
  for (int k = 0; k <= m; ++k) {
    a(k) = w_(k) * sigma_mp(g(m, k));
    c(k) = w_(k) * sigma_mm(anti_time_ordered(g, m, k));
    gpp_(k, m) = time_ordered(g, k, m);
    gpp_(m, k) = time_ordered(g, m, k);
  }
  a(m) += w_(m) * diss * dissipator(m);
  out.head(m + 1).noalias() = dt_ * (gpp_.topLeftCorner(m + 1, m + 1).transpose() * a);
  out.head(m + 1).noalias() += dt_ * (g.topLeftCorner(m + 1, m + 1).transpose() * c);
}

void ContourKernel::commit_row(const CMatrix& g, int m) {
  for (int k = 0; k <= m; ++k) {
    gpp_(k, m) = time_ordered(g, k, m);
    gpp_(m, k) = time_ordered(g, m, k);
  }
}

LindbladResult evolve_lindblad(const LindbladConfig& cfg, const ContourGreen& initial) {
  validate(cfg);
  if (!(initial.lattice() == cfg.lattice)) throw DomainError("initial state is on another lattice");
  ContourKernel kernel(cfg.system.coupling_j, cfg.system.q_body, cfg.mu, cfg.lattice, cfg.convention);
  CMatrix g = cfg.convention == LindbladConvention::Liouvillian ? map_initial_condition(initial) : initial.data();
  LindbladResult r;
  r.report = propagate(kernel, g, cfg.lattice.zero_index(), cfg.lattice.delta_t, cfg.propagation);
  if (cfg.convention == LindbladConvention::Isolated) g = map_initial_condition(ContourGreen(cfg.lattice, g));
  r.green = contour_components(g, cfg.lattice);
  return r;
}

LindbladResult evolve_lindblad(const LindbladConfig& cfg) {
  validate(cfg);
  const auto eq = solve_equilibrium(
      EquilibriumParams::for_lattice(cfg.system.beta, cfg.system.coupling_j, cfg.lattice, cfg.system.q_body));
  return evolve_lindblad(cfg, lay_initial_condition(eq, cfg.lattice));
}

}  // namespace kbsyk
