#include "kbsyk/observables.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "kbsyk/errors.hpp"
#include "kbsyk/snapshot.hpp"

namespace kbsyk {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct RatioSample {
  double omega, ratio, weight;  // ratio -> 2 tanh(beta omega / 2)
};

std::vector<RatioSample> low_frequency_ratios(const KeldyshSlice& s, double factor, bool use_real,
                                              const ExtractionOptions& o, int min_points) {
  double scale = 0.0;
  for (const auto& r : s.retarded) scale = std::max(scale, std::abs(r));
  const double dw = std::min(s.bin_spacing(), o.max_fit_spacing);
  const int count = std::max(min_points, static_cast<int>(std::floor(o.omega_fit / dw)));
  std::vector<RatioSample> out;
  for (int m = 1; m <= count; ++m) {
    const double w = m * dw;
    cplx rw, kw;
    s.evaluate(w, rw, kw);
    const double den = use_real ? rw.real() : rw.imag();
    const double num = use_real ? kw.real() : kw.imag();
    if (std::abs(den) <= 1e-12 * scale) throw UndefinedTemperatureError("no spectral weight at low frequency");
    out.push_back({w, factor * num / den, std::abs(den)});
  }
  return out;
}

// Least squares r = a + b w^2 on the ratio divided by omega.
void even_fit(const std::vector<RatioSample>& v, int count, double& a, double& rms) {
  double s0 = 0, s1 = 0, s2 = 0, y0 = 0, y1 = 0;
  for (int k = 0; k < count; ++k) {
    const double x = v[k].omega * v[k].omega, y = v[k].ratio / v[k].omega;
    s0 += 1;
    s1 += x;
    s2 += x * x;
    y0 += y;
    y1 += x * y;
  }
  const double det = s0 * s2 - s1 * s1;
  double b;
  if (count < 2 || std::abs(det) < 1e-300) {
    a = y0 / s0;
    b = 0;
  } else {
    a = (s2 * y0 - s1 * y1) / det;
    b = (s0 * y1 - s1 * y0) / det;
  }
  double ss = 0;
  for (int k = 0; k < count; ++k) {
    const double x = v[k].omega * v[k].omega;
    const double e = v[k].ratio / v[k].omega - (a + b * x);
    ss += e * e;
  }
  rms = std::sqrt(ss / count);
}

double tanh_cost(const std::vector<RatioSample>& v, double beta) {
  double c = 0;
  for (const auto& s : v) {
    const double e = s.ratio - 2.0 * std::tanh(0.5 * beta * s.omega);
    c += s.weight * e * e;
  }
  return c;
}

double tanh_fit(const std::vector<RatioSample>& v, double guess, double& rms) {
  // Coarse scan, then golden-section refinement around the best cell.
  double lo = std::min(-1.0, 3.0 * guess) - 10.0, hi = std::max(1.0, 3.0 * guess) + 10.0;
  const int cells = 400;
  double best = lo, best_c = INFINITY;
  for (int k = 0; k <= cells; ++k) {
    const double b = lo + (hi - lo) * k / cells;
    const double c = tanh_cost(v, b);
    if (c < best_c) best_c = c, best = b;
  }
  const double h = (hi - lo) / cells;
  double a = best - h, b = best + h;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = tanh_cost(v, x1), f2 = tanh_cost(v, x2);
  for (int it = 0; it < 100 && b - a > 1e-12; ++it) {
    if (f1 < f2) {
      b = x2, x2 = x1, f2 = f1, x1 = b - gr * (b - a), f1 = tanh_cost(v, x1);
    } else {
      a = x1, x1 = x2, f1 = f2, x2 = a + gr * (b - a), f2 = tanh_cost(v, x2);
    }
  }
  const double beta = 0.5 * (a + b);
  double ss = 0;
  for (const auto& s : v) {
    const double e = (s.ratio - 2.0 * std::tanh(0.5 * beta * s.omega)) / s.omega;
    ss += e * e;
  }
  rms = std::sqrt(ss / v.size());
  return beta;
}

BetaEstimate estimate(const KeldyshSlice& s, double factor, bool use_real, const ExtractionOptions& o) {
  if (s.tail_ratio > o.max_tail_ratio) {
    std::ostringstream os;
    os << "correlator has not decayed within the slice window (tail ratio " << s.tail_ratio << ")";
    throw UndefinedTemperatureError(os.str());
  }
  const int npts = std::max(2, o.fit_points);
  const auto v = low_frequency_ratios(s, factor, use_real, o, npts);
  BetaEstimate e;
  e.tail_ratio = s.tail_ratio;
  even_fit(v, npts, e.beta, e.fit_quality);
  if (e.fit_quality > o.linear_threshold) {
    double rms;
    const double b = tanh_fit(v, e.beta, rms);
    e.beta = b;
    e.fit_quality = rms;
    e.used_tanh_fit = true;
  }
  if (!std::isfinite(e.beta)) throw UndefinedTemperatureError("non-finite temperature estimate");
  return e;
}

}  // namespace

BetaEstimate beta_from_slice(const KeldyshSlice& s, double factor, const ExtractionOptions& o) {
  return estimate(s, factor, false, o);
}

BetaEstimate effective_beta_fdt(const ContourGreen& g, double t, const ExtractionOptions& o) {
  return estimate(wigner_slice(g, t), 2.0, false, o);
}

BetaEstimate effective_beta_corner(const ContourGreen& g, double t, const ExtractionOptions& o) {
  return estimate(corner_slice(g, t), -1.0, false, o);
}

BetaEstimate effective_beta_liouvillian(const CMatrix& g, const TimeLattice& lattice, double t,
                                        const ExtractionOptions& o) {
  return estimate(wigner_slice_liouvillian(g, lattice, t), 2.0, true, o);
}

double total_energy(const ContourGreen& g, double coupling_j, double t) {
  const int i = g.lattice().index_of(t);
  if (i == 0) return 0.0;
  const CMatrix& m = g.data();
  cplx acc = 0.0;
  for (int k = 0; k <= i; ++k) {
    const double w = (k == 0 || k == i) ? 0.5 : 1.0;
    const cplx gt = m(i, k), lt = -m(k, i);
    const cplx gt2 = gt * gt, lt2 = lt * lt;
    acc += w * (gt2 * gt2 - lt2 * lt2);
  }
  const cplx e = cplx(0.0, -0.25 * coupling_j * coupling_j * g.lattice().delta_t) * acc;
  if (std::abs(e.imag()) > 1e-8) {
    std::ostringstream os;
    os << "energy has an imaginary part " << e.imag() << " at t = " << t;
    throw ConventionViolation(os.str());
  }
  return e.real();
}

void BetaTrace::write_csv(std::ostream& out) const {
  out << "t,beta_fdt,beta_corner,energy,fit_quality,reliable\n";
  for (std::size_t k = 0; k < t.size(); ++k)
    out << format_double(t[k]) << ',' << format_double(beta_fdt[k]) << ',' << format_double(beta_corner[k]) << ','
        << format_double(energy[k]) << ',' << format_double(fit_quality[k]) << ',' << (reliable[k] ? 1 : 0)
        << '\n';
}

void BetaTrace::write_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_csv(os);
}

BetaTrace read_beta_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,beta_fdt,beta_corner,energy,fit_quality,reliable", 0) != 0)
    throw DomainError("not a beta trace: unexpected header");
  BetaTrace tr;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    double v[6];
    int n = 0;
    while (n < 6 && std::getline(ss, cell, ',')) {
      char* end = nullptr;
      v[n] = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw DomainError("beta trace row " + std::to_string(row) + " is malformed");
      ++n;
    }
    if (n != 6) throw DomainError("beta trace row " + std::to_string(row) + " has too few columns");
    tr.t.push_back(v[0]);
    tr.beta_fdt.push_back(v[1]);
    tr.beta_corner.push_back(v[2]);
    tr.energy.push_back(v[3]);
    tr.fit_quality.push_back(v[4]);
    tr.reliable.push_back(v[5] != 0.0);
  }
  return tr;
}

BetaTrace read_beta_trace(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DomainError("cannot open " + path);
  return read_beta_trace(is);
}

namespace {

template <class Fdt, class Corner, class Energy>
BetaTrace trace_impl(const TimeLattice& lat, const TraceOptions& o, Fdt fdt, Corner corner, Energy energy) {
  if (o.stride < 1) throw DomainError("trace stride must be positive");
  const double margin = o.edge_margin >= 0 ? o.edge_margin : lat.lambda_t / 5.0;
  const int zero = lat.zero_index();
  BetaTrace tr;
  for (int k = zero + o.stride; k < lat.n_points; k += o.stride) {
    const int reach = std::min(k, lat.n_points - 1 - k);
    if (reach < 2) continue;
    const double t = lat.time(k);
    double b = kNaN, bc = kNaN, q = kNaN, tail = 1.0;
    try {
      const auto e = fdt(t);
      b = e.beta;
      q = e.fit_quality;
      tail = e.tail_ratio;
    } catch (const UndefinedTemperatureError&) {
    }
    if (o.with_corner) try {
        bc = corner(t).beta;
      } catch (const UndefinedTemperatureError&) {
      }
    const bool inside = t + lat.lambda_t >= margin - 1e-9 && lat.lambda_t - t >= margin - 1e-9;
    tr.t.push_back(t);
    tr.beta_fdt.push_back(b);
    tr.beta_corner.push_back(bc);
    tr.energy.push_back(energy(t));
    tr.fit_quality.push_back(q);
    tr.reliable.push_back(inside && std::isfinite(b) && tail <= o.max_reliable_tail ? 1 : 0);
  }
  return tr;
}

}  // namespace

BetaTrace beta_trace(const ContourGreen& g, double coupling_j, const TraceOptions& o) {
  return trace_impl(
      g.lattice(), o, [&](double t) { return effective_beta_fdt(g, t, o.extraction); },
      [&](double t) { return effective_beta_corner(g, t, o.extraction); },
      [&](double t) { return total_energy(g, coupling_j, t); });
}

BetaTrace beta_trace_liouvillian(const LiouvillianGreen& g, double coupling_j, const TraceOptions& o) {
  const ContourGreen iso = unmap_to_isolated(g.greater(), g.lattice);
  return trace_impl(
      g.lattice, o, [&](double t) { return effective_beta_liouvillian(g.greater(), g.lattice, t, o.extraction); },
      [&](double t) { return effective_beta_corner(iso, t, o.extraction); },
      [&](double t) { return total_energy(iso, coupling_j, t); });
}

std::string CrossingReport::to_json() const {
  nlohmann::ordered_json j;
  j["crossings"] = nlohmann::ordered_json::array();
  for (const auto& c : crossings) j["crossings"].push_back({{"time", c.time}, {"direction", c.direction}});
  j["parity"] = parity;
  j["min_separation"] = min_separation;
  j["deadband"] = deadband;
  return j.dump(2);
}

CrossingReport detect_crossings(const BetaTrace& a, const BetaTrace& b, const CrossingOptions& o) {
  if (a.size() != b.size()) throw DomainError("traces have different lengths");
  std::vector<double> t, d, quality;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a.t[k] - b.t[k]) > 1e-9) throw DomainError("traces are sampled at different times");
    if (a.t[k] < o.t_min - 1e-12 || a.t[k] > o.t_max + 1e-12) continue;
    if (!std::isfinite(a.beta_fdt[k]) || !std::isfinite(b.beta_fdt[k])) continue;
    if (o.reliable_only && !(a.reliable[k] && b.reliable[k])) continue;
    t.push_back(a.t[k]);
    d.push_back(a.beta_fdt[k] - b.beta_fdt[k]);
    const double qa = std::isfinite(a.fit_quality[k]) ? a.fit_quality[k] : 0.0;
    const double qb = std::isfinite(b.fit_quality[k]) ? b.fit_quality[k] : 0.0;
    quality.push_back(std::max(qa, qb));
  }
  CrossingReport rep;
  if (o.deadband >= 0) {
    rep.deadband = o.deadband;
  } else if (!quality.empty()) {
    std::vector<double> q = quality;
    std::nth_element(q.begin(), q.begin() + q.size() / 2, q.end());
    rep.deadband = std::max(3.0 * q[q.size() / 2], 1e-6);
  } else {
    rep.deadband = 1e-6;
  }
  rep.min_separation = INFINITY;
  for (double x : d) rep.min_separation = std::min(rep.min_separation, std::abs(x));
  if (d.empty()) rep.min_separation = kNaN;

  int state = 0;
  std::size_t last = 0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (std::abs(d[k]) <= rep.deadband) continue;
    const int s = d[k] > 0 ? 1 : -1;
    if (state != 0 && s != state) {
      std::size_t p = k - 1;
      while (p > last && !(d[p] * d[p + 1] <= 0)) --p;
      double tc = t[k];
      if (d[p] * d[p + 1] <= 0 && d[p] != d[p + 1]) tc = t[p] + (t[p + 1] - t[p]) * d[p] / (d[p] - d[p + 1]);
      rep.crossings.push_back({tc, s});
    }
    state = s;
    last = k;
  }
  rep.parity = static_cast<int>(rep.crossings.size() % 2);
  return rep;
}

}  // namespace kbsyk
