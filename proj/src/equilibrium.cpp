#include "kbsyk/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "kbsyk/errors.hpp"
#include "kbsyk/fourier.hpp"

namespace kbsyk {

namespace {

constexpr double kPi = std::numbers::pi;

double fermi(double beta, double w) {
  const double x = beta * w;
  if (x > 0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

cplx ipow(int n) {
  static const cplx table[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
  return table[((n % 4) + 4) % 4];
}

// Occupied and empty spectral weights in the time domain:
// lesser(t) = i * occ(t), greater(t) = -i * emp(t).
void time_weights(const EquilibriumParams& p, const std::vector<double>& omega,
                  const std::vector<double>& a, fourier::cvec& occ, fourier::cvec& emp) {
  const long n = p.n_omega;
  fourier::cvec xo(n), xe(n);
  for (long k = 0; k < n; ++k) {
    xo[k] = a[k] * fermi(p.beta, omega[k]);
    xe[k] = a[k] * fermi(p.beta, -omega[k]);
  }
  const double norm = p.d_omega() / (2.0 * kPi);
  occ = fourier::centered_dft(xo, -1);
  emp = fourier::centered_dft(xe, -1);
  for (long k = 0; k < n; ++k) {
    occ[k] *= norm;
    emp[k] *= norm;
  }
}

std::vector<cplx> retarded_self_energy(const EquilibriumParams& p, const std::vector<double>& omega,
                                       const std::vector<double>& a) {
  fourier::cvec occ, emp;
  time_weights(p, omega, a, occ, emp);
  const long n = p.n_omega;
  const int qm1 = p.q_body - 1;
  const double j2 = p.coupling_j * p.coupling_j;
  const cplx pre = -ipow(p.q_body) * j2;
  const cplx gt_phase = ipow(-qm1);  // (-i)^(q-1)
  const cplx lt_phase = ipow(qm1);   // i^(q-1)
  fourier::cvec h(n, 0.0);
  const double dt = p.time_step();
  for (long m = n / 2; m < n; ++m) {
    const cplx sg = pre * gt_phase * std::pow(emp[m], qm1);
    const cplx sl = pre * lt_phase * std::pow(occ[m], qm1);
    h[m] = (m == n / 2 ? 0.5 : 1.0) * dt * (sg - sl);
  }
  return fourier::centered_dft(h, +1);
}

}  // namespace

double EquilibriumParams::time_step() const { return kPi / omega_max; }

EquilibriumParams EquilibriumParams::defaults(double beta, double coupling_j, int q_body) {
  EquilibriumParams p;
  p.beta = beta;
  p.coupling_j = coupling_j;
  p.q_body = q_body;
  p.omega_max = coupling_j > 0 ? 16.0 * coupling_j : 8.0;
  p.n_omega = 4096;
  return p;
}

EquilibriumParams EquilibriumParams::for_lattice(double beta, double coupling_j, const TimeLattice& lattice,
                                                 int q_body) {
  EquilibriumParams p = defaults(beta, coupling_j, q_body);
  p.omega_max = kPi / lattice.delta_t;
  p.n_omega = static_cast<int>(std::max<long>(8192, fourier::next_power_of_two(4L * lattice.n_points)));
  return p;
}

void EquilibriumParams::validate() const {
  std::ostringstream os;
  if (!(beta >= 0.0) || !std::isfinite(beta)) os << "beta must be finite and >= 0; ";
  if (!(coupling_j >= 0.0) || !std::isfinite(coupling_j)) os << "J must be finite and >= 0; ";
  if (q_body < 2 || q_body % 2 != 0) os << "q must be an even integer >= 2; ";
  if (!(omega_max > 0.0)) os << "omega_max must be positive; ";
  if (n_omega < 16 || !fourier::is_power_of_two(n_omega)) os << "n_omega must be a power of two >= 16; ";
  if (!(mixing > 0.0 && mixing <= 1.0)) os << "mixing must lie in (0, 1]; ";
  if (!(tol > 0.0)) os << "tol must be positive; ";
  if (max_iters < 1) os << "max_iters must be positive; ";
  if (!os.str().empty()) throw DomainError(os.str());
}

double conformal_prefactor(double coupling_j, int q_body) {
  const double q = q_body;
  return std::pow((0.5 - 1.0 / q) * std::tan(kPi / q) / (kPi * coupling_j * coupling_j), 1.0 / q);
}

cplx conformal_retarded(double beta, double coupling_j, int q_body, double t) {
  if (!(beta > 0.0) || !(coupling_j > 0.0) || !(t > 0.0))
    throw DomainError("conformal form needs beta > 0, J > 0 and t > 0");
  const double b = conformal_prefactor(coupling_j, q_body);
  const double x = kPi / (beta * std::sinh(kPi * t / beta));
  return cplx(0.0, -2.0 * b * std::cos(kPi / q_body) * std::pow(x, 2.0 / q_body));
}

std::vector<cplx> conformal_seed(const EquilibriumParams& p) {
  p.validate();
  const long n = p.n_omega;
  const double dw = p.d_omega();
  std::vector<cplx> g(n);
  const double width = p.coupling_j > 0 ? p.coupling_j : 1.0;
  if (p.beta * p.coupling_j < 1.0 || p.coupling_j == 0.0) {
    for (long k = 0; k < n; ++k) g[k] = 1.0 / cplx((k - n / 2) * dw, width);
    return g;
  }
  // Regularised at t = 0 by evaluating at dt/2.
  const double dt = p.time_step();
  fourier::cvec h(n, 0.0);
  for (long m = n / 2; m < n; ++m) {
    const double t = m == n / 2 ? 0.5 * dt : (m - n / 2) * dt;
    h[m] = (m == n / 2 ? 0.5 : 1.0) * dt * conformal_retarded(p.beta, p.coupling_j, p.q_body, t);
  }
  auto out = fourier::centered_dft(h, +1);
  for (long k = 0; k < n; ++k) g[k] = out[k];
  return g;
}

EquilibriumState solve_equilibrium(const EquilibriumParams& p) {
  p.validate();
  const long n = p.n_omega;
  const double dw = p.d_omega();
  EquilibriumState s;
  s.params = p;
  s.omega.resize(n);
  for (long k = 0; k < n; ++k) s.omega[k] = (k - n / 2) * dw;

  if (p.coupling_j == 0.0) {
    // All spectral weight in the zero-frequency bin.
    s.retarded.resize(n);
    for (long k = 0; k < n; ++k) s.retarded[k] = k == n / 2 ? cplx(0.0, -kPi / dw) : 1.0 / s.omega[k];
  } else {
    s.retarded = conformal_seed(p);
    std::vector<double> a(n);
    for (int it = 0; it < p.max_iters; ++it) {
      for (long k = 0; k < n; ++k) a[k] = -2.0 * s.retarded[k].imag();
      const auto sigma = retarded_self_energy(p, s.omega, a);
      double res = 0.0;
      for (long k = 0; k < n; ++k) {
        const cplx gnew = 1.0 / (s.omega[k] - sigma[k]);
        res = std::max(res, std::abs(gnew - s.retarded[k]));
        s.retarded[k] += p.mixing * (gnew - s.retarded[k]);
      }
      s.residual_history.push_back(res);
      s.iterations = it + 1;
      if (!std::isfinite(res)) throw DivergenceError("equilibrium iteration produced non-finite values");
      if (res < p.tol) break;
    }
    if (s.residual_history.back() >= p.tol) {
      std::ostringstream os;
      os << "equilibrium solve did not reach tol " << p.tol << " in " << p.max_iters
         << " iterations (last residual " << s.residual_history.back() << ")";
      throw NonConvergenceError(os.str(), s.residual_history);
    }
  }

  s.spectral.resize(n);
  for (long k = 0; k < n; ++k) s.spectral[k] = -2.0 * s.retarded[k].imag();
  fourier::cvec occ, emp;
  time_weights(p, s.omega, s.spectral, occ, emp);
  s.time.resize(n);
  s.greater_time.resize(n);
  for (long m = 0; m < n; ++m) {
    s.time[m] = (m - n / 2) * p.time_step();
    s.greater_time[m] = cplx(0.0, -1.0) * emp[m];
  }
  return s;
}

cplx EquilibriumState::greater_at_offset(long k) const {
  const long n = params.n_omega;
  if (k <= -n / 2 || k >= n / 2) throw DomainError("offset outside the equilibrium time window");
  return greater_time[n / 2 + k];
}

double EquilibriumState::sum_rule() const {
  double s = 0.0;
  for (double a : spectral) s += a;
  return s * params.d_omega() / (2.0 * kPi);
}

double EquilibriumState::kms_residual() const {
  const long n = params.n_omega;
  const double dt = time_step();
  fourier::cvec gt(n), lt(n);
  for (long m = 0; m < n; ++m) {
    gt[m] = dt * greater_time[m];
    lt[m] = -dt * greater_time[(n - m) % n];
  }
  const auto gtw = fourier::centered_dft(gt, +1);
  const auto ltw = fourier::centered_dft(lt, +1);
  const double default_cut = params.coupling_j > 0 ? 16.0 * params.coupling_j : 8.0;
  const double window = 0.5 * std::min(params.omega_max, default_cut);
  // exp(beta w) amplifies rounding in G<(w); once that amplified rounding
  // reaches tol the comparison measures only floating-point noise.
  const double noise_cap = std::log(params.tol / std::numeric_limits<double>::epsilon());
  double scale = 0.0, worst = 0.0;
  for (long k = 0; k < n; ++k) scale = std::max(scale, std::abs(gtw[k]));
  for (long k = 0; k < n; ++k) {
    if (std::abs(omega[k]) > window || params.beta * std::abs(omega[k]) > noise_cap) continue;
    worst = std::max(worst, std::abs(gtw[k] + std::exp(params.beta * omega[k]) * ltw[k]));
  }
  return scale > 0 ? worst / scale : worst;
}

std::vector<cplx> EquilibriumState::retarded_time_from_spectral() const {
  fourier::cvec x(spectral.begin(), spectral.end());
  auto out = fourier::centered_dft(x, -1);
  const double norm = params.d_omega() / (2.0 * kPi);
  for (auto& v : out) v *= cplx(0.0, -norm);
  return out;
}

ContourGreen lay_initial_condition(const EquilibriumState& s, const TimeLattice& lattice) {
  if (std::abs(s.time_step() - lattice.delta_t) > 1e-9 * lattice.delta_t) {
    std::ostringstream os;
    os << "equilibrium time step " << s.time_step() << " differs from lattice step " << lattice.delta_t;
    throw DomainError(os.str());
  }
  if (s.params.n_omega / 2 <= lattice.n_points)
    throw DomainError("equilibrium time window shorter than the lattice");
  const int n = lattice.n_points;
  // Rescale so the equal-time value is exactly -i/2 instead of overwriting
  // only the diagonal, which would leave a kink of the size of the sum-rule defect.
  const cplx g0 = s.greater_at_offset(0);
  const cplx scale = std::abs(g0) > 0 ? cplx(0.0, -0.5) / g0 : cplx(1.0, 0.0);
  CMatrix g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = i == j ? cplx(0.0, -0.5) : scale * s.greater_at_offset(i - j);
  return ContourGreen(lattice, std::move(g));
}

}  // namespace kbsyk
