#include "kbsyk/kb_propagator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kbsyk/errors.hpp"

namespace kbsyk {

Method parse_method(const std::string& name) {
  if (name == "whole-grid" || name == "whole_grid") return Method::WholeGrid;
  if (name == "causal") return Method::Causal;
  throw ConfigError("unknown method '" + name + "' (expected whole-grid or causal)");
}

std::string method_name(Method m) { return m == Method::WholeGrid ? "whole-grid" : "causal"; }

Eigen::VectorXd memory_weights(int n) {
  Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
  w(0) = 0.5;
  return w;
}

namespace {

// |G| never exceeds 1/2 for a physical state; far beyond that is a blow-up.
constexpr double kBlowUp = 1e3;

bool finite_and_bounded(const CMatrix& g) {
  const double m = g.cwiseAbs().maxCoeff();
  return std::isfinite(m) && m < kBlowUp;
}

// Integrates every column forward from its start row with the trapezoid rule.
void integrate_columns(const CMatrix& g, const CMatrix& rhs, int zero, cplx step, CMatrix& out) {
  const int n = static_cast<int>(g.rows());
  for (int j = 0; j < n; ++j) {
    const int s = std::max(zero, j);
    cplx acc = g(s, j);
    for (int i = s + 1; i < n; ++i) {
      acc += step * (rhs(i - 1, j) + rhs(i, j));
      out(i, j) = acc;
    }
  }
}

PropagationReport whole_grid(KbKernel& k, CMatrix& g, int zero, double dt, const PropagationOptions& o) {
  const int n = static_cast<int>(g.rows());
  const cplx step = 0.5 * dt * k.factor;
  PropagationReport rep;
  double eta = o.damping;
  const CMatrix start = g;
  CMatrix rhs = CMatrix::Zero(n, n);
  CMatrix next = g;
  double prev = INFINITY;
  int rising = 0;
  for (int sweep = 0; sweep < o.max_sweeps; ++sweep) {
    k.rows(g, zero, rhs);
    integrate_columns(g, rhs, zero, step, next);
    double upd = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = std::max(zero, j) + 1; i < n; ++i) upd = std::max(upd, std::abs(next(i, j) - g(i, j)));
    rep.update_history.push_back(upd);
    rep.sweeps = sweep + 1;
    rising = upd > prev ? rising + 1 : 0;
    prev = upd;
    if (!std::isfinite(upd) || !finite_and_bounded(next) || rising > 25) {
      eta *= 0.5;
      if (eta < o.min_damping) {
        std::ostringstream os;
        os << "whole-grid iteration diverged even at damping " << 2 * eta << "; try a smaller damping";
        throw DivergenceError(os.str());
      }
      g = start;
      prev = INFINITY;
      rising = 0;
      continue;
    }
    for (int j = 0; j < n; ++j)
      for (int i = std::max(zero, j) + 1; i < n; ++i) g(i, j) += eta * (next(i, j) - g(i, j));
    mirror_lower(g, k.mirror_sign, k.diagonal);
    rep.final_update = upd;
    rep.damping = eta;
    if (upd < o.tol) return rep;
  }
  std::ostringstream os;
  os << "whole-grid iteration did not reach tol " << o.tol << " in " << o.max_sweeps
     << " sweeps (last update " << rep.final_update << ")";
  throw NonConvergenceError(os.str(), rep.update_history);
}

void set_row(CMatrix& g, int m, const Eigen::VectorXcd& row, const KbKernel& k) {
  for (int j = 0; j < m; ++j) {
    g(m, j) = row(j);
    g(j, m) = k.mirror_sign * std::conj(row(j));
  }
  g(m, m) = k.diagonal;
}

PropagationReport causal(KbKernel& k, CMatrix& g, int zero, double dt, const PropagationOptions& o) {
  const int n = static_cast<int>(g.rows());
  const cplx step = 0.5 * dt * k.factor;
  PropagationReport rep;
  rep.damping = 1.0;
  mirror_lower(g, k.mirror_sign, k.diagonal);
  k.begin_causal(g, zero + 1);
  Eigen::VectorXcd prev(n), cur(n), row(n);
  k.row(g, zero, prev);
  double worst = 0.0;
  for (int m = zero + 1; m < n; ++m) {
    // Euler predictor from the previous row.
    for (int j = 0; j < m; ++j) row(j) = g(m - 1, j) + 2.0 * step * prev(j);
    row(m - 1) = k.diagonal + 2.0 * step * prev(m - 1);
    set_row(g, m, row, k);
    int it = 0;
    double change = INFINITY;
    for (; it < o.max_corrector && change >= o.tol; ++it) {
      k.row(g, m, cur);
      change = 0.0;
      for (int j = 0; j < m; ++j) {
        const cplx base = j == m - 1 ? k.diagonal : g(m - 1, j);
        const cplx v = base + step * (prev(j) + cur(j));
        change = std::max(change, std::abs(v - row(j)));
        row(j) = v;
      }
      if (!std::isfinite(change) || row.head(m).cwiseAbs().maxCoeff() > kBlowUp)
        throw DivergenceError("causal marching diverged; try a smaller time step");
      set_row(g, m, row, k);
    }
    if (change >= o.tol) {
      std::ostringstream os;
      os << "corrector did not converge at t1 index " << m << " (last change " << change << ")";
      throw NonConvergenceError(os.str(), rep.update_history);
    }
    k.row(g, m, cur);
    k.commit_row(g, m);
    prev.head(m + 1) = cur.head(m + 1);
    worst = std::max(worst, change);
    rep.update_history.push_back(change);
    rep.sweeps = std::max(rep.sweeps, it);
  }
  rep.final_update = worst;
  return rep;
}

}  // namespace

PropagationReport propagate(KbKernel& kernel, CMatrix& g, int zero, double dt, const PropagationOptions& o) {
  if (g.rows() != g.cols()) throw DomainError("propagation needs a square grid");
  if (zero < 0 || zero >= g.rows()) throw DomainError("quench index outside the lattice");
  if (!(o.tol > 0.0) || o.max_sweeps < 1 || !(o.damping > 0.0 && o.damping <= 1.0))
    throw DomainError("propagation options need tol > 0, max_sweeps >= 1 and damping in (0, 1]");
  return o.method == Method::WholeGrid ? whole_grid(kernel, g, zero, dt, o) : causal(kernel, g, zero, dt, o);
}

}  // namespace kbsyk
