#pragma once

#include <complex>
#include <vector>

namespace kbsyk::fourier {

using cvec = std::vector<std::complex<double>>;

// out[m] = sum_k in[k] exp(sign * 2 pi i k m / n), sign = +1 or -1.
cvec dft(const cvec& in, int sign);

// Same sum with both indices centred: k, m run over -n/2..n/2-1 and are stored
// at position index + n/2. n must be even.
cvec centered_dft(const cvec& in, int sign);

bool is_power_of_two(long n);
long next_power_of_two(long n);

}  // namespace kbsyk::fourier
