#include "kbsyk/quench.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

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

// theta(t) on the lattice with theta(0) = 1/2.
double switch_on(int i, int zero) { return i > zero ? 1.0 : (i == zero ? 0.5 : 0.0); }

void validate(const QuenchConfig& cfg) {
  cfg.system.validate();
  if (cfg.baths.size() > 2) throw DomainError("at most two reservoirs are supported");
  for (const auto& b : cfg.baths) {
    if (!(b.coupling_v >= 0.0)) throw DomainError("reservoir coupling must be >= 0");
    if (b.n_bath < 1 || b.n_bath % 2 == 0) throw DomainError("n_bath must be odd");
    if (!(b.green.lattice() == cfg.lattice)) throw DomainError("reservoir Green's function is on another lattice");
  }
}

}  // namespace

BathSpec BathSpec::make(double beta_bath, double coupling_v, int n_bath, const TimeLattice& lattice,
                        double coupling_j) {
  if (n_bath != 1 && n_bath != 3) throw DomainError("n_bath must be 1 or 3");
  if (!(coupling_v >= 0.0)) throw DomainError("reservoir coupling must be >= 0");
  BathSpec b;
  b.beta_bath = beta_bath;
  b.coupling_v = coupling_v;
  b.n_bath = n_bath;
  b.coupling_j = coupling_j;
  const auto eq = solve_equilibrium(EquilibriumParams::for_lattice(beta_bath, coupling_j, lattice));
  b.green = lay_initial_condition(eq, lattice);
  return b;
}

SelfEnergyGrid bath_self_energy_grid(const std::vector<BathSpec>& baths, const TimeLattice& lat) {
  const int n = lat.n_points;
  const int zero = lat.zero_index();
  SelfEnergyGrid s{CMatrix::Zero(n, n), CMatrix::Zero(n, n)};
  for (const auto& b : baths) {
    if (b.coupling_v == 0.0) continue;
    const cplx pre = -b.coupling_v * b.coupling_v * ipow(b.n_bath + 1);
    const CMatrix& gp = b.green.data();
    for (int j = zero; j < n; ++j)
      for (int i = zero; i < n; ++i) {
        const double on = switch_on(i, zero) * switch_on(j, zero);
        s.greater(i, j) += on * pre * power(gp(i, j), b.n_bath);
        s.lesser(i, j) += on * pre * power(-gp(j, i), b.n_bath);
      }
  }
  return s;
}

SelfEnergyPair assemble_self_energy(const ContourGreen& g, const QuenchConfig& cfg, double t1, double t2) {
  const TimeLattice& lat = g.lattice();
  const int i = lat.index_of(t1), j = lat.index_of(t2), zero = lat.zero_index();
  const int qm1 = cfg.system.q_body - 1;
  const cplx pre = -ipow(cfg.system.q_body) * cfg.system.coupling_j * cfg.system.coupling_j;
  SelfEnergyPair s{pre * power(g.greater(i, j), qm1), pre * power(g.lesser(i, j), qm1)};
  const double on = switch_on(i, zero) * switch_on(j, zero);
  for (const auto& b : cfg.baths) {
    const cplx bp = -b.coupling_v * b.coupling_v * ipow(b.n_bath + 1) * on;
    s.greater += bp * power(b.green.greater(i, j), b.n_bath);
    s.lesser += bp * power(b.green.lesser(i, j), b.n_bath);
  }
  return s;
}

SelfEnergyGrid assemble_self_energy_grid(const ContourGreen& g, const QuenchConfig& cfg) {
  SelfEnergyGrid s = bath_self_energy_grid(cfg.baths, g.lattice());
  const int n = g.size();
  const int qm1 = cfg.system.q_body - 1;
  const cplx pre = -ipow(cfg.system.q_body) * cfg.system.coupling_j * cfg.system.coupling_j;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      s.greater(i, j) += pre * power(g.greater(i, j), qm1);
      s.lesser(i, j) += pre * power(g.lesser(i, j), qm1);
    }
  return s;
}

LangrethKernel::LangrethKernel(double coupling_j, int q_body, double delta_t, SelfEnergyGrid extra)
    : j2_(coupling_j * coupling_j),
      q_(q_body),
      dt_(delta_t),
      sys_prefactor_(-ipow(q_body) * coupling_j * coupling_j),
      extra_(std::move(extra)) {
  has_extra_ = extra_.greater.size() > 0 &&
               (extra_.greater.cwiseAbs().maxCoeff() > 0 || extra_.lesser.cwiseAbs().maxCoeff() > 0);
  factor = cplx(0.0, -1.0);
  mirror_sign = -1.0;
  diagonal = cplx(0.0, -0.5);
}

cplx LangrethKernel::interaction(cplx x) const { return sys_prefactor_ * power(x, q_ - 1); }

void LangrethKernel::build(const CMatrix& g) {
  const int n = static_cast<int>(g.rows());
  if (w_.size() != n) w_ = memory_weights(n);
  sr_.resize(n, n);
  sg_.resize(n, n);
  ga_.resize(n, n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      cplx sg = interaction(g(i, k));
      cplx sl = interaction(-g(k, i));
      if (has_extra_) {
        sg += extra_.greater(i, k);
        sl += extra_.lesser(i, k);
      }
      sg_(i, k) = w_(k) * sg;
      sr_(i, k) = w_(k) * step(i, k) * (sg - sl);
      // Column k of G_A holds entries (k', k) with k' <= k.
      ga_(i, k) = step(k, i) * (-g(k, i) - g(i, k));
    }
}

void LangrethKernel::rows(const CMatrix& g, int row_begin, CMatrix& out) {
  build(g);
  const int n = static_cast<int>(g.rows());
  const int m = n - row_begin;
  out.bottomRows(m).noalias() = dt_ * (sr_.bottomRows(m) * g);
  out.bottomRows(m).noalias() += dt_ * (sg_.bottomRows(m) * ga_);
}

CMatrix LangrethKernel::full(const CMatrix& g) {
  CMatrix out(g.rows(), g.cols());
  rows(g, 0, out);
  return out;
}

void LangrethKernel::begin_causal(const CMatrix& g, int) {
  build(g);
}

void LangrethKernel::row(const CMatrix& g, int m, Eigen::VectorXcd& out) {
  Eigen::VectorXcd sr(m + 1), sg(m + 1);
  for (int k = 0; k <= m; ++k) {
    cplx a = interaction(g(m, k));
    cplx b = interaction(-g(k, m));
    if (has_extra_) {
      a += extra_.greater(m, k);
      b += extra_.lesser(m, k);
    }
    sg(k) = w_(k) * a;
    sr(k) = w_(k) * step(m, k) * (a - b);
    ga_(k, m) = step(m, k) * (-g(m, k) - g(k, m));
  }
  out.head(m + 1).noalias() = dt_ * (g.topLeftCorner(m + 1, m + 1).transpose() * sr);
  out.head(m + 1).noalias() += dt_ * (ga_.topLeftCorner(m + 1, m + 1).transpose() * sg);
}

void LangrethKernel::commit_row(const CMatrix& g, int m) {
  for (int k = 0; k <= m; ++k) ga_(k, m) = step(m, k) * (-g(m, k) - g(k, m));
}

CMatrix kb_residual(const ContourGreen& g, const QuenchConfig& cfg) {
  validate(cfg);
  const TimeLattice& lat = g.lattice();
  if (!(lat == cfg.lattice)) throw DomainError("Green's function lattice differs from the configuration");
  const int n = g.size(), zero = lat.zero_index();
  LangrethKernel kernel(cfg.system.coupling_j, cfg.system.q_body, lat.delta_t,
                        bath_self_energy_grid(cfg.baths, lat));
  const CMatrix integral = kernel.full(g.data());
  const CMatrix& m = g.data();
  const double h = lat.delta_t;
  CMatrix res = CMatrix::Zero(n, n);
  const cplx I(0.0, 1.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (i <= zero || i < j) continue;
      cplx d;
      if (i == n - 1)
        d = (3.0 * m(i, j) - 4.0 * m(i - 1, j) + m(i - 2, j)) / (2.0 * h);
      else
        d = (m(i + 1, j) - m(i - 1, j)) / (2.0 * h);
      res(i, j) = I * d - integral(i, j);
    }
  return res;
}

double kb_residual_norm(const ContourGreen& g, const QuenchConfig& cfg) {
  return kb_residual(g, cfg).cwiseAbs().maxCoeff();
}

QuenchResult evolve_quench(const QuenchConfig& cfg, const ContourGreen& initial) {
  validate(cfg);
  if (!(initial.lattice() == cfg.lattice)) throw DomainError("initial state is on another lattice");
  LangrethKernel kernel(cfg.system.coupling_j, cfg.system.q_body, cfg.lattice.delta_t,
                        bath_self_energy_grid(cfg.baths, cfg.lattice));
  QuenchResult r{initial, {}};
  r.report = propagate(kernel, r.green.data(), cfg.lattice.zero_index(), cfg.lattice.delta_t, cfg.propagation);
  return r;
}

QuenchResult evolve_quench(const QuenchConfig& cfg) {
  validate(cfg);
  const auto eq = solve_equilibrium(
      EquilibriumParams::for_lattice(cfg.system.beta, cfg.system.coupling_j, cfg.lattice, cfg.system.q_body));
  return evolve_quench(cfg, lay_initial_condition(eq, cfg.lattice));
}

}  // namespace kbsyk
