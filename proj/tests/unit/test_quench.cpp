#include <doctest.h>

#include <cmath>

#include "support.hpp"

using namespace kbsyk;
using testing::cplx;

namespace {

const cplx I(0.0, 1.0);

QuenchConfig config(const TimeLattice& lat, double beta_init, std::vector<BathSpec> baths = {}) {
  QuenchConfig c;
  c.system = EquilibriumParams::for_lattice(beta_init, 0.5, lat);
  c.lattice = lat;
  c.baths = std::move(baths);
  return c;
}

}  // namespace

TEST_CASE("self-energy at a single point against a scalar evaluation") {
  const auto lat = TimeLattice::make(5.0, 0.1);
  const double j = 0.5, v = 0.525;
  const auto cfg = config(lat, 2.4, {BathSpec::make(0.5, v, 3, lat)});
  const auto g = testing::thermal_grid(2.4, lat);

  // Scalar formula: -J^2 g^3 - V^2 (-1)^((n+1)/2) theta theta g_bath^n, with n = 3.
  auto expected = [&](int i, int k) {
    const double th = (lat.time(i) > 0 ? 1.0 : lat.time(i) == 0 ? 0.5 : 0.0) *
                      (lat.time(k) > 0 ? 1.0 : lat.time(k) == 0 ? 0.5 : 0.0);
    const cplx gs = g.greater(i, k), gb = cfg.baths[0].green.greater(i, k);
    return -j * j * gs * gs * gs - v * v * th * gb * gb * gb;
  };

  const auto s = assemble_self_energy(g, cfg, 1.0, 1.0);
  const int k = lat.index_of(1.0);
  CHECK(std::abs(s.greater - expected(k, k)) < 1e-15);
  // Equal times: both functions are -i/2 there.
  CHECK(std::abs(s.greater - (-(j * j + v * v) * I / 8.0)) < 1e-15);

  const int a = lat.index_of(1.5), b = lat.index_of(0.3);
  const auto off = assemble_self_energy(g, cfg, 1.5, 0.3);
  CHECK(std::abs(off.greater - expected(a, b)) < 1e-15);
  const cplx gl = g.lesser(a, b), bl = cfg.baths[0].green.lesser(a, b);
  CHECK(std::abs(off.lesser - (-j * j * gl * gl * gl - v * v * bl * bl * bl)) < 1e-15);

  SUBCASE("switch-on edge carries theta(0) = 1/2") {
    const int z = lat.zero_index();
    const auto e = assemble_self_energy(g, cfg, 0.0, 1.0);
    CHECK(std::abs(e.greater - expected(z, lat.index_of(1.0))) < 1e-15);
  }
}

TEST_CASE("reservoir term vanishes before the quench") {
  const auto lat = TimeLattice::make(5.0, 0.1);
  const auto cfg = config(lat, 2.4, {BathSpec::make(0.5, 2.0, 3, lat), BathSpec::make(1.0, 1.0, 1, lat)});
  const auto g = testing::thermal_grid(2.4, lat);
  for (auto [t1, t2] : {std::pair{-1.0, 2.0}, {2.0, -0.1}, {-3.0, -3.0}}) {
    const auto s = assemble_self_energy(g, cfg, t1, t2);
    const cplx x = g.greater(lat.index_of(t1), lat.index_of(t2));
    CHECK(std::abs(s.greater + 0.25 * x * x * x) < 1e-16);
  }
}

TEST_CASE("zero coupling leaves only the SYK term") {
  const auto lat = TimeLattice::make(5.0, 0.1);
  const auto cfg = config(lat, 2.4, {BathSpec::make(0.5, 0.0, 3, lat)});
  const auto g = testing::thermal_grid(2.4, lat);
  const auto grid = assemble_self_energy_grid(g, cfg);
  for (int i = 0; i < lat.n_points; i += 7)
    for (int k = 0; k < lat.n_points; k += 5) {
      const cplx x = g.greater(i, k);
      CHECK(std::abs(grid.greater(i, k) + 0.25 * x * x * x) < 1e-16);
    }
}

TEST_CASE("free theory satisfies the discretised equations exactly") {
  const auto lat = TimeLattice::make(3.0, 0.1);
  QuenchConfig cfg = config(lat, 1.0);
  cfg.system.coupling_j = 0.0;
  const auto g = testing::constant_grid(lat, cplx(0.0, -0.5));
  CHECK(kb_residual_norm(g, cfg) == 0.0);
}

TEST_CASE("thermal state solves the isolated equations to second order") {
  double last = 0.0;
  // The memory starts at -lambda_t, so the window must hold the decay of g.
  for (double dt : {0.2, 0.1}) {
    const auto lat = TimeLattice::make(25.0, dt);
    const auto cfg = config(lat, 2.4);
    const auto r = kb_residual(testing::thermal_grid(2.4, lat), cfg);
    const double norm = testing::max_abs(r);
    CHECK(norm < 5 * dt * dt);
    // Defined as zero on the laid-out region.
    CHECK(r.topLeftCorner(lat.zero_index() + 1, lat.n_points).cwiseAbs().maxCoeff() == 0.0);
    if (last > 0) CHECK(last / norm == doctest::Approx(4.0).epsilon(0.1));
    last = norm;
  }
}

TEST_CASE("isolated evolution keeps the thermal state") {
  const auto lat = TimeLattice::make(12.5, 0.1);
  auto cfg = config(lat, 1.2);
  const auto init = testing::thermal_grid(1.2, lat);
  const auto out = evolve_quench(cfg, init).green;
  CHECK(diagonal_residual(out) < 1e-8);
  CHECK(antisymmetry_residual(out) < 1e-8);
  // Time-translation invariance along diagonals in the propagated region.
  const int z = lat.zero_index();
  double worst = 0.0;
  for (int d = -20; d <= 20; ++d)
    for (int i = z; i + std::max(d, 0) < lat.n_points; i += 3)
      if (i - std::min(d, 0) >= 0 && i - d >= 0 && i - d < lat.n_points)
        worst = std::max(worst, std::abs(out.greater(i, i - d) - init.greater(i, i - d)));
  CHECK(worst < 1e-4);
}

TEST_CASE("quench with reservoirs") {
  const auto lat = TimeLattice::make(5.0, 0.1);
  auto cfg = config(lat, 2.4, {BathSpec::make(0.5, 0.525, 3, lat)});
  const auto init = testing::thermal_grid(2.4, lat);
  const auto whole = evolve_quench(cfg, init);
  const int z = lat.zero_index();

  CHECK(diagonal_residual(whole.green) < 1e-8);
  CHECK(antisymmetry_residual(whole.green) < 1e-8);
  CHECK(testing::max_abs(whole.green.data().topLeftCorner(z + 1, z + 1) - init.data().topLeftCorner(z + 1, z + 1)) <
        cfg.propagation.tol);
  CHECK(whole.report.final_update < cfg.propagation.tol);
  // The reservoir does change the state after the quench.
  CHECK(std::abs(whole.green.greater(lat.n_points - 1, z) - init.greater(lat.n_points - 1, z)) > 1e-3);

  SUBCASE("causal marching reaches the same fixed point") {
    cfg.propagation.method = Method::Causal;
    const auto causal = evolve_quench(cfg, init);
    CHECK(testing::max_abs(causal.green.data() - whole.green.data()) < 1e-7);
  }
  SUBCASE("sweep budget exhaustion reports its history") {
    cfg.propagation.max_sweeps = 2;
    try {
      evolve_quench(cfg, init);
      FAIL("expected NonConvergenceError");
    } catch (const NonConvergenceError& e) {
      CHECK(e.residual_history.size() == 2);
    }
  }
}

TEST_CASE("reservoir validation") {
  const auto lat = TimeLattice::make(5.0, 0.1);
  CHECK_THROWS_AS(BathSpec::make(0.5, 0.5, 2, lat), DomainError);
  CHECK_THROWS_AS(BathSpec::make(0.5, -0.1, 3, lat), DomainError);

  const auto init = testing::thermal_grid(2.4, lat);
  auto b = BathSpec::make(0.5, 0.5, 3, lat);
  CHECK_THROWS_AS(evolve_quench(config(lat, 2.4, {b, b, b}), init), DomainError);
  auto other = BathSpec::make(0.5, 0.5, 3, TimeLattice::make(4.0, 0.1));
  CHECK_THROWS_AS(evolve_quench(config(lat, 2.4, {other}), init), DomainError);
  CHECK_THROWS_AS(evolve_quench(config(lat, 2.4), testing::thermal_grid(2.4, TimeLattice::make(4.0, 0.1))),
                  DomainError);
}
