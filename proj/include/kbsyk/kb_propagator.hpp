#pragma once

#include <string>
#include <vector>

#include "kbsyk/contour_green.hpp"

namespace kbsyk {

enum class Method { WholeGrid, Causal };

Method parse_method(const std::string& name);
std::string method_name(Method m);

struct PropagationOptions {
  double tol = 1e-9;
  int max_sweeps = 500;
  double damping = 0.5;
  double min_damping = 1.0 / 64.0;
  Method method = Method::WholeGrid;
  // Corrector iterations per row in causal mode.
  int max_corrector = 100;
};

struct PropagationReport {
  int sweeps = 0;
  double final_update = 0.0;
  double damping = 0.0;
  std::vector<double> update_history;
};

// Collision integral of a two-time equation d/dt1 g(t1,t2) = factor * I(t1,t2)
// discretised with trapezoid weights. Only the entries with t1 >= t2 are used.
class KbKernel {
 public:
  virtual ~KbKernel() = default;

  // I(i, j) for i >= row_begin and j <= i. out must be n x n.
  virtual void rows(const CMatrix& g, int row_begin, CMatrix& out) = 0;

  // Causal marching: rows and columns below first_row are final.
  virtual void begin_causal(const CMatrix& g, int first_row) = 0;
  // I(m, j) for j <= m given the current guess for row and column m.
  virtual void row(const CMatrix& g, int m, Eigen::VectorXcd& out) = 0;
  virtual void commit_row(const CMatrix& g, int m) = 0;

  cplx factor = cplx(0.0, -1.0);
  // g(t2,t1) = mirror_sign * conj g(t1,t2).
  double mirror_sign = -1.0;
  cplx diagonal = cplx(0.0, -0.5);
};

// Evolves every entry with t1 > 0 or t2 > 0 from the fixed block t1, t2 <= 0.
// Columns with t2 <= 0 start from row t1 = 0, the others from the diagonal.
PropagationReport propagate(KbKernel& kernel, CMatrix& g, int zero_index, double delta_t,
                            const PropagationOptions& opts);

// Trapezoid weights along the memory axis: 1/2 at the lattice origin.
Eigen::VectorXd memory_weights(int n);

}  // namespace kbsyk
