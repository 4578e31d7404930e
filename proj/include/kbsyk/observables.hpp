#pragma once

#include <string>
#include <vector>

#include "kbsyk/keldysh_slice.hpp"
#include "kbsyk/lindblad.hpp"
#include "kbsyk/quench.hpp"

namespace kbsyk {

struct BetaEstimate {
  double beta = 0.0;
  double fit_quality = 0.0;  // rms scatter of the low-frequency ratios about the fit
  bool used_tanh_fit = false;
  double tail_ratio = 0.0;  // of the slice the estimate came from
};

struct ExtractionOptions {
  int fit_points = 4;
  // Fit frequencies are m * min(slice bin spacing, max_fit_spacing), m = 1..fit_points.
  double max_fit_spacing = 0.05;
  // Scatter above this switches to the tanh fit over |omega| < omega_fit.
  double linear_threshold = 0.05;
  double omega_fit = 0.5;
  // Correlators whose tail ratio exceeds this have no usable low-frequency limit.
  double max_tail_ratio = 0.2;
};

// From the Wigner slice: beta = lim 2 Im G_K / (omega Im G_R).
BetaEstimate effective_beta_fdt(const ContourGreen& g, double t, const ExtractionOptions& opts = {});
// From the corner slice: beta = lim -Im G_K / (omega Im G_R).
BetaEstimate effective_beta_corner(const ContourGreen& g, double t, const ExtractionOptions& opts = {});
// Liouvillian-convention Wigner slice: beta = lim 2 Re G_K / (omega Re G_R).
BetaEstimate effective_beta_liouvillian(const CMatrix& g_liouvillian, const TimeLattice& lattice,
                                        double t, const ExtractionOptions& opts = {});
BetaEstimate beta_from_slice(const KeldyshSlice& s, double sign, const ExtractionOptions& opts);

// Interaction energy per fermion, -(i J^2 / 4) int dt' [g>(t,t')^4 - g<(t,t')^4]
// from the lattice origin to t. Negative at any finite temperature.
double total_energy(const ContourGreen& g, double coupling_j, double t);

struct BetaTrace {
  std::vector<double> t, beta_fdt, beta_corner, energy, fit_quality;
  std::vector<char> reliable;

  std::size_t size() const { return t.size(); }
  void write_csv(std::ostream& out) const;
  void write_csv(const std::string& path) const;
};

struct TraceOptions {
  // Samples at t = k * stride * delta_t for k >= 1.
  int stride = 5;
  // Samples this close to either lattice edge are flagged unreliable; default lambda_t / 5.
  double edge_margin = -1.0;
  // Samples whose Wigner window cut off more than this fraction of G_R are
  // flagged unreliable: the low-frequency limit weights the tail by t'.
  double max_reliable_tail = 0.003;
  bool with_corner = true;
  ExtractionOptions extraction;
};

// Reads the CSV written by BetaTrace::write_csv.
BetaTrace read_beta_trace(std::istream& in);
BetaTrace read_beta_trace(const std::string& path);

BetaTrace beta_trace(const ContourGreen& g, double coupling_j, const TraceOptions& opts = {});
BetaTrace beta_trace_liouvillian(const LiouvillianGreen& g, double coupling_j,
                                 const TraceOptions& opts = {});

struct Crossing {
  double time;
  int direction;  // +1 when (a - b) goes from negative to positive
};

struct CrossingReport {
  std::vector<Crossing> crossings;
  int parity = 0;
  double min_separation = 0.0;
  double deadband = 0.0;

  std::size_t count() const { return crossings.size(); }
  std::string to_json() const;
};

struct CrossingOptions {
  double t_min = 0.0;
  double t_max = 1e300;
  // Negative: three times the per-point noise estimated from fit_quality.
  double deadband = -1.0;
  bool reliable_only = true;
};

CrossingReport detect_crossings(const BetaTrace& a, const BetaTrace& b, const CrossingOptions& opts = {});

}  // namespace kbsyk
