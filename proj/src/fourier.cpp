#include "kbsyk/fourier.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

namespace kbsyk::fourier {

namespace {

// Planning is not thread-safe in FFTW; execution with new-array calls is.
std::mutex plan_mutex;

struct PlanCache {
  std::map<std::pair<long, int>, fftw_plan> plans;
  ~PlanCache() {
    for (auto& kv : plans) fftw_destroy_plan(kv.second);
  }
};

fftw_plan plan_for(long n, int sign) {
  static PlanCache cache;
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto key = std::make_pair(n, sign);
  auto it = cache.plans.find(key);
  if (it != cache.plans.end()) return it->second;
  auto* a = fftw_alloc_complex(n);
  auto* b = fftw_alloc_complex(n);
  // FFTW_ESTIMATE picks the same algorithm on every run.
  fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), a, b, sign > 0 ? FFTW_BACKWARD : FFTW_FORWARD,
                                 FFTW_ESTIMATE);
  fftw_free(a);
  fftw_free(b);
  cache.plans.emplace(key, p);
  return p;
}

}  // namespace

cvec dft(const cvec& in, int sign) {
  const long n = static_cast<long>(in.size());
  if (n == 0) return {};
  auto* a = fftw_alloc_complex(n);
  auto* b = fftw_alloc_complex(n);
  std::memcpy(a, in.data(), sizeof(fftw_complex) * n);
  fftw_execute_dft(plan_for(n, sign), a, b);
  cvec out(n);
  std::memcpy(static_cast<void*>(out.data()), b, sizeof(fftw_complex) * n);
  fftw_free(a);
  fftw_free(b);
  return out;
}

cvec centered_dft(const cvec& in, int sign) {
  const long n = static_cast<long>(in.size());
  if (n % 2 != 0) throw std::invalid_argument("centered_dft needs an even length");
  const long h = n / 2;
  cvec shifted(n);
  for (long k = 0; k < n; ++k) shifted[k] = in[(k + h) % n];
  cvec out = dft(shifted, sign);
  cvec res(n);
  for (long m = 0; m < n; ++m) res[m] = out[(m + h) % n];
  return res;
}

bool is_power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }

long next_power_of_two(long n) {
  long p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace kbsyk::fourier
