#include "kbsyk/time_lattice.hpp"

#include <cmath>
#include <sstream>

#include "kbsyk/errors.hpp"

namespace kbsyk {

TimeLattice TimeLattice::make(double lambda_t, double delta_t) {
  if (!(lambda_t > 0.0) || !(delta_t > 0.0) || !std::isfinite(lambda_t) || !std::isfinite(delta_t))
    throw DomainError("lattice needs positive finite lambda_t and delta_t");
  const double ratio = 2.0 * lambda_t / delta_t;
  const long n = std::lround(ratio);
  if (std::abs(ratio - n) > 1e-9 * ratio) {
    std::ostringstream os;
    os << "2*lambda_t/delta_t = " << ratio << " is not an integer";
    throw DomainError(os.str());
  }
  if (n < 4 || n % 2 != 0) throw DomainError("lattice needs an even number of points, at least 4");
  if (n > 20000) throw DomainError("lattice larger than 20000 points per axis");
  return TimeLattice{delta_t, lambda_t, static_cast<int>(n)};
}

int TimeLattice::index_of(double t) const {
  const double x = t / delta_t + n_points / 2;
  const long k = std::lround(x);
  if (std::abs(x - k) > 1e-6 || k < 0 || k >= n_points) {
    std::ostringstream os;
    os << "time " << t << " is not on the lattice";
    throw DomainError(os.str());
  }
  return static_cast<int>(k);
}

bool TimeLattice::contains(double t) const {
  const double x = t / delta_t + n_points / 2;
  const long k = std::lround(x);
  return std::abs(x - k) <= 1e-6 && k >= 0 && k < n_points;
}

bool TimeLattice::operator==(const TimeLattice& o) const {
  return n_points == o.n_points && std::abs(delta_t - o.delta_t) <= 1e-12 * delta_t &&
         std::abs(lambda_t - o.lambda_t) <= 1e-12 * lambda_t;
}

}  // namespace kbsyk
