#pragma once

#include "kbsyk/equilibrium.hpp"
#include "kbsyk/kb_propagator.hpp"

namespace kbsyk {

// Which form of the vectorised equations is integrated.
//  Liouvillian: g_l> = -i g>, g_l(t2,t1) = conj g_l(t1,t2), g_l(t,t) = -1/2.
//  Isolated:    the stored function is g> itself with the component-sign
//               factors moved into the derivative and the dissipator.
enum class LindbladConvention { Liouvillian, Isolated };

struct LindbladConfig {
  EquilibriumParams system;
  double mu = 0.05;
  TimeLattice lattice;
  PropagationOptions propagation;
  LindbladConvention convention = LindbladConvention::Liouvillian;
};

// Four contour components in the Liouvillian convention, indexed (alpha, beta)
// with + the forward and - the backward branch.
struct LiouvillianGreen {
  TimeLattice lattice;
  CMatrix plus_plus, plus_minus, minus_plus, minus_minus;

  // g_l> is the minus_plus block.
  const CMatrix& greater() const { return minus_plus; }
};

// g_l = -i g_i on every entry.
CMatrix map_initial_condition(const ContourGreen& g);
ContourGreen unmap_to_isolated(const CMatrix& g_liouvillian, const TimeLattice& lattice);

LiouvillianGreen contour_components(const CMatrix& g_liouvillian, const TimeLattice& lattice);

struct ContourSelfEnergy {
  cplx plus_plus, plus_minus, minus_plus, minus_minus;
};
// Interaction plus dissipator at one lattice point of a Liouvillian-convention
// function. The dissipator is an on-lattice delta of weight mu / delta_t.
ContourSelfEnergy lindblad_self_energy(const LiouvillianGreen& g, double coupling_j, int q_body,
                                       double mu, double t1, double t2);

struct LindbladResult {
  LiouvillianGreen green;  // always Liouvillian convention
  PropagationReport report;
};

LindbladResult evolve_lindblad(const LindbladConfig& cfg);
LindbladResult evolve_lindblad(const LindbladConfig& cfg, const ContourGreen& initial);

class ContourKernel : public KbKernel {
 public:
  ContourKernel(double coupling_j, int q_body, double mu, const TimeLattice& lattice,
                LindbladConvention convention);
  void rows(const CMatrix& g, int row_begin, CMatrix& out) override;
  void begin_causal(const CMatrix& g, int first_row) override;
  void row(const CMatrix& g, int m, Eigen::VectorXcd& out) override;
  void commit_row(const CMatrix& g, int m) override;

 private:
  cplx time_ordered(const CMatrix& g, int i, int j) const;
  cplx anti_time_ordered(const CMatrix& g, int i, int j) const;
  cplx sigma_mp(cplx x) const;
  cplx sigma_mm(cplx x) const;
  double dissipator(int i) const;

  double j2_;
  int q_;
  double mu_;
  double dt_;
  int zero_;
  LindbladConvention conv_;
  Eigen::VectorXd w_;
  CMatrix gpp_;
};

}  // namespace kbsyk
