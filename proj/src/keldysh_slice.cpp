#include "kbsyk/keldysh_slice.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "kbsyk/errors.hpp"
#include "kbsyk/fourier.hpp"

namespace kbsyk {

namespace {

using Sampler = std::function<void(int k, cplx& retarded, cplx& keldysh)>;

long padded_length(long samples) {
  long n = kSlicePadding * samples;
  return n % 2 == 0 ? n : n + 1;
}

// Transforms samples at relative times k*tau, k in [k_lo, k_hi], with
// trapezoid end weights. Negative k wrap around the DFT buffer.
KeldyshSlice transform(double center, double tau, int k_lo, int k_hi, const Sampler& sample) {
  const long samples = k_hi - k_lo + 1;
  const long n = padded_length(samples);
  fourier::cvec r(n, 0.0), kk(n, 0.0);
  KeldyshSlice s;
  double ref = 0.0, tail = 0.0;
  const int tail_start = static_cast<int>(std::ceil(0.9 * std::max(k_hi, -k_lo)));
  for (int k = k_lo; k <= k_hi; ++k) {
    cplx gr, gk;
    sample(k, gr, gk);
    const double w = (k == k_lo || k == k_hi) ? 0.5 * tau : tau;
    const long pos = ((k % n) + n) % n;
    r[pos] = w * gr;
    kk[pos] = w * gk;
    s.sample_time.push_back(k * tau);
    s.retarded_samples.push_back(w * gr);
    s.keldysh_samples.push_back(w * gk);
    if (std::abs(k) <= 1) ref = std::max(ref, std::abs(gr));
    if (std::abs(k) >= tail_start) tail = std::max(tail, std::abs(gr));
  }
  const auto rf = fourier::dft(r, +1);
  const auto kf = fourier::dft(kk, +1);
  s.center_time = center;
  s.relative_step = tau;
  s.relative_span = tau * (k_hi - k_lo);
  s.tail_ratio = ref > 0.0 ? tail / ref : 1.0;
  const double dw = 2.0 * std::numbers::pi / (n * tau);
  s.omega.resize(n);
  s.retarded.resize(n);
  s.keldysh.resize(n);
  for (long m = 0; m < n; ++m) {
    const long src = (m + n / 2) % n;
    s.omega[m] = (m - n / 2) * dw;
    s.retarded[m] = rf[src];
    s.keldysh[m] = kf[src];
  }
  return s;
}

int wigner_reach(const TimeLattice& lat, int c) {
  const int reach = std::min(c, lat.n_points - 1 - c);
  if (reach < 2) {
    std::ostringstream os;
    os << "centre time " << lat.time(c) << " is too close to the lattice edge for a Wigner slice";
    throw InsufficientWindowError(os.str());
  }
  return reach;
}

}  // namespace

void KeldyshSlice::evaluate(double w, cplx& rw, cplx& kw) const {
  rw = 0.0;
  kw = 0.0;
  for (std::size_t k = 0; k < sample_time.size(); ++k) {
    const cplx ph = std::polar(1.0, w * sample_time[k]);
    rw += ph * retarded_samples[k];
    kw += ph * keldysh_samples[k];
  }
}

KeldyshSlice wigner_slice(const ContourGreen& g, double t) {
  const TimeLattice& lat = g.lattice();
  const int c = lat.index_of(t);
  const int reach = wigner_reach(lat, c);
  const CMatrix& m = g.data();
  // The t' = 0 end of the half-line integral takes the t' -> 0+ limit of G_R.
  return transform(t, 2.0 * lat.delta_t, 0, reach, [&](int k, cplx& gr, cplx& gk) {
    const cplx gt = m(c + k, c - k);
    const cplx lt = -m(c - k, c + k);
    gr = gt - lt;
    gk = gt + lt;
  });
}

KeldyshSlice wigner_slice_liouvillian(const CMatrix& g, const TimeLattice& lat, double t) {
  const int c = lat.index_of(t);
  const int reach = wigner_reach(lat, c);
  return transform(t, 2.0 * lat.delta_t, 0, reach, [&](int k, cplx& gr, cplx& gk) {
    const cplx gt = g(c + k, c - k);
    const cplx lt = -g(c - k, c + k);
    gr = gt - lt;
    gk = gt + lt;
  });
}

KeldyshSlice corner_slice(const ContourGreen& g, double t) {
  const TimeLattice& lat = g.lattice();
  const int c = lat.index_of(t);
  const int reach = c;
  if (reach < 2) throw InsufficientWindowError("centre time too close to the lattice start for a corner slice");
  return transform(t, lat.delta_t, -reach, reach, [&](int k, cplx& gr, cplx& gk) {
    const int i = k > 0 ? c - k : c;
    const int j = k > 0 ? c : c + k;
    const Components x = derive_components_at(g, i, j);
    gr = x.retarded;
    gk = x.keldysh;
  });
}

}  // namespace kbsyk
