#include <doctest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "support.hpp"

using namespace kbsyk;
using testing::cplx;

namespace {

BetaTrace line_trace(double (*f)(double)) {
  BetaTrace tr;
  for (int k = 1; k <= 100; ++k) {
    const double t = 0.1 * k;
    tr.t.push_back(t);
    tr.beta_fdt.push_back(f(t));
    tr.beta_corner.push_back(f(t));
    tr.energy.push_back(-0.1);
    tr.fit_quality.push_back(0.0);
    tr.reliable.push_back(1);
  }
  return tr;
}

BetaTrace zero_trace() {
  return line_trace([](double) { return 0.0; });
}

}  // namespace

TEST_CASE("both temperature definitions agree in equilibrium") {
  const auto lat = TimeLattice::make(25.0, 0.1);
  for (double beta : {0.5, 1.0, 2.4}) {
    CAPTURE(beta);
    const auto g = testing::thermal_grid(beta, lat);
    // The corner slice reaches back t + lambda_t, so early times truncate it.
    for (double t : {0.0, 5.0, 10.0}) {
      CAPTURE(t);
      const auto f = effective_beta_fdt(g, t);
      const auto c = effective_beta_corner(g, t);
      CHECK(f.beta == doctest::Approx(beta).epsilon(0.02));
      CHECK(c.beta == doctest::Approx(beta).epsilon(0.02));
      CHECK(std::abs(f.beta - c.beta) < 0.03 * std::abs(f.beta));
      CHECK(f.fit_quality >= 0.0);
    }
  }
}

TEST_CASE("infinite temperature reads as zero") {
  const auto lat = TimeLattice::make(25.0, 0.1);
  const auto g = testing::thermal_grid(0.0, lat);
  CHECK(std::abs(effective_beta_fdt(g, -5.0).beta) < 0.05);
  CHECK(std::abs(effective_beta_corner(g, 0.0).beta) < 0.05);
}

TEST_CASE("free theory has no temperature") {
  const auto lat = TimeLattice::make(10.0, 0.1);
  const auto g = testing::constant_grid(lat, cplx(0.0, -0.5));
  CHECK_THROWS_AS(effective_beta_corner(g, 0.0), UndefinedTemperatureError);
  CHECK_THROWS_AS(effective_beta_fdt(g, 0.0), UndefinedTemperatureError);
}

TEST_CASE("energy") {
  const auto lat = TimeLattice::make(25.0, 0.1);
  SUBCASE("vanishes without interactions") {
    const auto g = testing::constant_grid(lat, cplx(0.0, -0.5));
    for (double t : {-20.0, 0.0, 10.0}) CHECK(total_energy(g, 0.0, t) == 0.0);
  }
  SUBCASE("is constant and negative in equilibrium") {
    const auto g = testing::thermal_grid(2.4, lat);
    const double e0 = total_energy(g, 0.5, 0.0);
    CHECK(e0 < 0.0);
    for (double t : {-5.0, 5.0, 10.0, 20.0}) CHECK(total_energy(g, 0.5, t) == doctest::Approx(e0).epsilon(1e-6));
    // Colder states sit lower.
    CHECK(total_energy(testing::thermal_grid(0.5, lat), 0.5, 0.0) > e0);
  }
  SUBCASE("rejects a function with the wrong symmetry") {
    const ContourGreen g(lat, testing::random_matrix(lat.n_points, 3));
    CHECK_THROWS_AS(total_energy(g, 0.5, 0.0), ConventionViolation);
  }
}

TEST_CASE("crossing detection on synthetic traces") {
  CrossingOptions o;
  o.deadband = 0.01;

  const auto flat = detect_crossings(line_trace([](double) { return 1.0; }), zero_trace(), o);
  CHECK(flat.count() == 0);
  CHECK(flat.min_separation == doctest::Approx(1.0));

  const auto ramp = line_trace([](double t) { return t - 5.0; });
  const auto one = detect_crossings(ramp, zero_trace(), o);
  REQUIRE(one.count() == 1);
  CHECK(one.crossings[0].time == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(one.crossings[0].direction == 1);
  CHECK(one.parity == 1);

  const auto swapped = detect_crossings(zero_trace(), ramp, o);
  REQUIRE(swapped.count() == 1);
  CHECK(swapped.crossings[0].time == one.crossings[0].time);
  CHECK(swapped.crossings[0].direction == -1);

  SUBCASE("chatter inside the deadband is ignored") {
    const auto noisy = line_trace([](double t) { return 0.005 * std::sin(37.0 * t); });
    CHECK(detect_crossings(noisy, zero_trace(), o).count() == 0);
    o.deadband = 0.0;
    CHECK(detect_crossings(noisy, zero_trace(), o).count() > 2);
  }
  SUBCASE("window and reliability masks") {
    o.t_min = 6.0;
    CHECK(detect_crossings(ramp, zero_trace(), o).count() == 0);
    o.t_min = 0.0;
    auto masked = ramp;
    for (std::size_t k = 0; k < masked.size(); ++k)
      if (masked.t[k] > 3.0 && masked.t[k] < 7.0) masked.reliable[k] = 0;
    const auto r = detect_crossings(masked, zero_trace(), o);
    REQUIRE(r.count() == 1);
    CHECK(r.crossings[0].time > 3.0);
    CHECK(r.crossings[0].time < 7.0);
  }
  SUBCASE("two crossings have even parity") {
    const auto bump = line_trace([](double t) { return (t - 3.0) * (7.0 - t); });
    const auto r = detect_crossings(bump, zero_trace(), o);
    REQUIRE(r.count() == 2);
    CHECK(r.parity == 0);
    CHECK(r.crossings[0].time == doctest::Approx(3.0));
    CHECK(r.crossings[1].time == doctest::Approx(7.0));
  }
  SUBCASE("mismatched grids") {
    auto shorter = zero_trace();
    shorter.t.pop_back();
    CHECK_THROWS_AS(detect_crossings(ramp, shorter, o), DomainError);
    auto shifted = zero_trace();
    shifted.t[4] += 0.05;
    CHECK_THROWS_AS(detect_crossings(ramp, shifted, o), DomainError);
  }
}

TEST_CASE("crossing report serialises") {
  CrossingOptions o;
  o.deadband = 0.01;
  const auto j = nlohmann::json::parse(
      detect_crossings(line_trace([](double t) { return t - 5.0; }), zero_trace(), o).to_json());
  CHECK(j["crossings"].size() == 1);
  CHECK(j["parity"] == 1);
  CHECK(j.contains("min_separation"));
}

TEST_CASE("trace CSV round trip") {
  auto tr = line_trace([](double t) { return std::sin(t) / 3.0; });
  tr.beta_corner[3] = std::nan("");
  tr.reliable[7] = 0;
  std::stringstream ss;
  tr.write_csv(ss);
  const auto back = read_beta_trace(ss);
  REQUIRE(back.size() == tr.size());
  for (std::size_t k = 0; k < tr.size(); ++k) {
    CHECK(back.t[k] == tr.t[k]);
    CHECK(back.beta_fdt[k] == tr.beta_fdt[k]);
    CHECK(back.reliable[k] == tr.reliable[k]);
  }
  CHECK(std::isnan(back.beta_corner[3]));

  std::stringstream bad("t,beta\n1,2\n");
  CHECK_THROWS_AS(read_beta_trace(bad), DomainError);
}

TEST_CASE("trace of an equilibrium state") {
  const auto lat = TimeLattice::make(25.0, 0.1);
  TraceOptions o;
  o.stride = 25;
  const auto tr = beta_trace(testing::thermal_grid(1.0, lat), 0.5, o);
  REQUIRE(tr.size() > 3);
  int reliable = 0;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    CHECK(tr.t[k] > 0.0);
    if (!tr.reliable[k]) continue;
    ++reliable;
    CHECK(tr.beta_fdt[k] == doctest::Approx(1.0).epsilon(0.02));
  }
  CHECK(reliable >= 3);
  // Samples near the far edge lose their window.
  CHECK_FALSE(tr.reliable.back());
}

TEST_CASE("threshold scan needs a bracket") {
  const auto lat = TimeLattice::make(5.0, 0.1);
  MpcSetup s;
  s.base.system = EquilibriumParams::for_lattice(2.4, 0.5, lat);
  s.base.lattice = lat;
  s.base.propagation.method = Method::Causal;
  s.base.baths = {BathSpec::make(0.5, 0.0, 3, lat)};
  CHECK_THROWS_AS(threshold_scan(s, 0.0, 0.02, 0.01), BracketError);
  CHECK_THROWS_AS(threshold_scan(s, 0.3, 0.2, 0.01), DomainError);
  s.base.baths.clear();
  CHECK_THROWS_AS(threshold_scan(s, 0.0, 0.5, 0.01), DomainError);
}
