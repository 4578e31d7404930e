#pragma once

#include <vector>

#include "kbsyk/equilibrium.hpp"
#include "kbsyk/kb_propagator.hpp"

namespace kbsyk {

// Equilibrium SYK_n reservoir coupled at t = 0 with strength coupling_v.
struct BathSpec {
  double beta_bath = 0.5;
  double coupling_v = 0.0;
  int n_bath = 3;
  double coupling_j = 0.5;  // internal coupling of the reservoir
  ContourGreen green;       // laid out on the run lattice

  // Solves the reservoir SYK_4 equilibrium at beta_bath and lays it out.
  static BathSpec make(double beta_bath, double coupling_v, int n_bath, const TimeLattice& lattice,
                       double coupling_j = 0.5);
};

struct QuenchConfig {
  EquilibriumParams system;  // beta is the pre-quench temperature
  std::vector<BathSpec> baths;
  TimeLattice lattice;
  PropagationOptions propagation;
};

struct SelfEnergyPair {
  cplx greater, lesser;
};

// Interaction plus reservoir self-energy at one lattice point.
SelfEnergyPair assemble_self_energy(const ContourGreen& g, const QuenchConfig& cfg, double t1,
                                    double t2);

struct SelfEnergyGrid {
  CMatrix greater, lesser;
};
SelfEnergyGrid assemble_self_energy_grid(const ContourGreen& g, const QuenchConfig& cfg);
SelfEnergyGrid bath_self_energy_grid(const std::vector<BathSpec>& baths, const TimeLattice& lattice);

// i d/dt1 g - I on the points the propagator produces, t1 > 0 and t1 >= t2
// (zero elsewhere). Central differences inside, second-order one-sided on the
// last row.
CMatrix kb_residual(const ContourGreen& g, const QuenchConfig& cfg);
double kb_residual_norm(const ContourGreen& g, const QuenchConfig& cfg);

struct QuenchResult {
  ContourGreen green;
  PropagationReport report;
};

QuenchResult evolve_quench(const QuenchConfig& cfg);
QuenchResult evolve_quench(const QuenchConfig& cfg, const ContourGreen& initial);

// Langreth-form collision integral for an isolated-convention g with fixed
// extra self-energies (reservoirs, Markov terms).
class LangrethKernel : public KbKernel {
 public:
  LangrethKernel(double coupling_j, int q_body, double delta_t, SelfEnergyGrid extra);
  void rows(const CMatrix& g, int row_begin, CMatrix& out) override;
  void begin_causal(const CMatrix& g, int first_row) override;
  void row(const CMatrix& g, int m, Eigen::VectorXcd& out) override;
  void commit_row(const CMatrix& g, int m) override;
  // Full I on all points, including t1 < t2.
  CMatrix full(const CMatrix& g);

 private:
  cplx interaction(cplx x) const;
  void build(const CMatrix& g);
  double j2_;
  int q_;
  double dt_;
  cplx sys_prefactor_;
  SelfEnergyGrid extra_;
  bool has_extra_;
  Eigen::VectorXd w_;
  CMatrix sr_, sg_, ga_;
};

}  // namespace kbsyk
