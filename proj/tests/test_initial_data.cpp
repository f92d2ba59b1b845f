#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nemaflow/director_terms.hpp"
#include "nemaflow/errors.hpp"
#include "nemaflow/initial_data.hpp"
#include "nemaflow/norms.hpp"
#include "nemaflow/spectral.hpp"

using namespace nemaflow;

namespace {
constexpr double pi = std::numbers::pi;

InitialData taylor_green_data(const Grid& g, double rho = 1.0) {
  return {ScalarField(g, rho), gen_velocity(g, {VelocityMode::taylor_green, 1.0, {}, 0}),
          VectorField(g, {0.0, 0.0, 1.0}), {0.0, 0.0, 1.0}, rho, rho};
}
}  // namespace

TEST_CASE("density generator") {
  const Grid g = make_grid(48, 2 * pi);
  SUBCASE("equal bounds give a constant") {
    const ScalarField rho = gen_density(g, 1.0, 1.0, {});
    CHECK(rho.min() == 1.0);
    CHECK(rho.max() == 1.0);
  }
  SUBCASE("bump stays within the bounds and reaches the peak") {
    const ScalarField rho = gen_density(g, 0.5, 2.0, {{std::nullopt, 0.35}, std::nullopt, std::nullopt});
    CHECK(rho.min() >= 0.5);
    CHECK(rho.max() <= 2.0);
    CHECK(rho.max() == doctest::Approx(2.0).epsilon(1e-12));
    // far field is the reference value exactly
    CHECK(rho.at(0, 0, 0) == 0.5);
  }
  SUBCASE("bad parameters") {
    CHECK_THROWS_AS(gen_density(g, 0.0, 1.0, {}), ConfigurationError);
    CHECK_THROWS_AS(gen_density(g, 1.0, 0.5, {}), ConfigurationError);
    CHECK_THROWS_AS(gen_density(g, 0.5, 2.0, {{std::nullopt, 0.2}, {}, {}}), ResolutionError);
    CHECK_THROWS_AS(gen_density(g, 0.5, 2.0, {{std::nullopt, 0.4}, {}, {}}), ConfigurationError);
    CHECK_THROWS_AS(gen_density(g, 0.5, 2.0, {{std::nullopt, 0.35}, 3.0, {}}), ConfigurationError);
  }
}

TEST_CASE("bump profile is compactly supported on the torus") {
  const Grid g = make_grid(48, 2 * pi);
  const BumpShape shape{Vec3{0.0, 0.0, 0.0}, 0.35};
  const ScalarField b = bump_profile(g, shape);
  CHECK(b.at(0, 0, 0) == 1.0);
  // the wrap-around image is used: x = L - h is at distance h
  CHECK(b.at(47, 0, 0) == doctest::Approx(std::exp(-g.spacing() * g.spacing() / (2 * 0.35 * 0.35))));
  CHECK(b.at(24, 24, 24) == 0.0);
  CHECK(b.at(24, 0, 0) == 0.0);
  CHECK(bump_cutoff_radius(1.0) == doctest::Approx(std::sqrt(2 * 15 * std::log(10.0))));
}

TEST_CASE("velocity generator") {
  const Grid g = make_grid(48, 2 * pi);
  SUBCASE("taylor-green closed form") {
    const VectorField u = gen_velocity(g, {VelocityMode::taylor_green, 2.0, {}, 0});
    CHECK(max_abs(divergence(u)) <= 1e-12);
    const double x = g.coordinate(3), y = g.coordinate(5);
    CHECK(u[0].at(3, 5, 7) == doctest::Approx(2 * std::sin(x) * std::cos(y)));
    CHECK(u[1].at(3, 5, 7) == doctest::Approx(-2 * std::cos(x) * std::sin(y)));
    CHECK(u[2].at(3, 5, 7) == 0.0);
  }
  SUBCASE("random bump is solenoidal, seeded and scaled") {
    const VelocityRecipe recipe{VelocityMode::random_bump, 0.7, {std::nullopt, 0.35}, 99};
    const VectorField u = gen_velocity(g, recipe);
    CHECK(max_abs(divergence(u)) <= 1e-11);
    CHECK(max_abs(u) == doctest::Approx(0.7));
    CHECK(max_abs(u - gen_velocity(g, recipe)) == 0.0);
    VelocityRecipe other = recipe;
    other.seed = 100;
    CHECK(max_abs(u - gen_velocity(g, other)) > 1e-3);
  }
  SUBCASE("zero amplitude") {
    CHECK(max_abs(gen_velocity(g, {VelocityMode::random_bump, 0.0, {std::nullopt, 0.35}, 1})) == 0.0);
    CHECK(max_abs(gen_velocity(g, {VelocityMode::taylor_green, 0.0, {}, 0})) == 0.0);
  }
}

TEST_CASE("director generator") {
  const Grid g = make_grid(48, 2 * pi);
  const Vec3 e3{0.0, 0.0, 1.0};
  SUBCASE("zero angle") {
    const VectorField d = gen_director(g, e3, {});
    CHECK(max_abs(d - VectorField(g, e3)) == 0.0);
  }
  SUBCASE("quarter turn about e1 maps e3 to e2 at the center") {
    const VectorField d = gen_director(g, e3, {{1.0, 0.0, 0.0}, pi / 2, {std::nullopt, 0.35}});
    const Vec3 c = d.at(g.index(24, 24, 24));
    CHECK(std::abs(c[0]) <= 1e-12);
    CHECK(std::abs(c[1] - 1.0) <= 1e-12);
    CHECK(std::abs(c[2]) <= 1e-12);
    CHECK(d.at(0) == e3);
  }
  SUBCASE("unit length for arbitrary parameters") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int t = 0; t < 10; ++t) {
      Vec3 ds{uni(rng), uni(rng), uni(rng)};
      ds = (1.0 / norm(ds)) * ds;
      const DirectorTilt tilt{{uni(rng), uni(rng), uni(rng)}, 3 * uni(rng), {Vec3{3.0, 2.0, 1.0}, 0.35}};
      CHECK(unit_drift(gen_director(g, ds, tilt)) <= 1e-12);
    }
  }
  SUBCASE("non-unit far field") {
    CHECK_THROWS_AS(gen_director(g, {0.0, 0.0, 1.1}, {}), ConfigurationError);
  }
}

TEST_CASE("generated data satisfy the invariants") {
  const Grid g = make_grid(48, 2 * pi);
  const BumpShape shape{std::nullopt, 0.35};
  InitialData data{gen_density(g, 0.5, 2.0, {shape, {}, {}}),
                   gen_velocity(g, {VelocityMode::random_bump, 1.0, shape, 3}),
                   gen_director(g, {0.0, 0.0, 1.0}, {{1.0, 0.0, 0.0}, 1.0, shape}),
                   {0.0, 0.0, 1.0},
                   0.5,
                   2.0};
  CHECK_NOTHROW(validate(data));
  data.d0[2][10] = 1.01;
  CHECK_THROWS_AS(validate(data), ConstraintViolation);
}

TEST_CASE("mollification") {
  const Grid g = make_grid(48, 2 * pi);
  SUBCASE("two-mode velocity: delta equals the filter attenuation") {
    const InitialData data = taylor_green_data(g);
    // every mode has |k|^2 = 2, so u_eps - u0 = -(1 - exp(-sigma^2)) u0
    for (double eps : {1e-1, 1e-2, 1e-3}) {
      const MollifiedData m = mollify_initial_data(data, eps);
      const double att = 1.0 - std::exp(-std::sqrt(eps));
      const double u2 = std::sqrt(std::pow(2 * pi, 3) / 2);
      const double expected = att * 2.0 * u2;
      CHECK(m.delta == doctest::Approx(expected).epsilon(1e-12));
      CHECK(m.length_scale == doctest::Approx(std::pow(eps, 0.25)));
    }
  }
  SUBCASE("delta decreases with epsilon") {
    const BumpShape shape{std::nullopt, 0.35};
    const InitialData data{ScalarField(g, 1.0), gen_velocity(g, {VelocityMode::random_bump, 1.0, shape, 8}),
                           VectorField(g, {0.0, 0.0, 1.0}), {0.0, 0.0, 1.0}, 1.0, 1.0};
    double previous = INFINITY;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
      const MollifiedData m = mollify_initial_data(data, eps);
      CHECK(m.delta < previous);
      previous = m.delta;
      CHECK(max_abs(divergence(m.data.u0)) <= 1e-11);
      CHECK(max_abs(m.data.d0 - data.d0) == 0.0);
    }
  }
  SUBCASE("additive lift") {
    const MollifiedData m = mollify_initial_data(taylor_green_data(g), 0.5);
    CHECK(m.data.rho0.min() >= 1.5);
    CHECK(m.data.rho_lower == doctest::Approx(1.5 + m.delta));
  }
  SUBCASE("epsilon range") {
    CHECK_THROWS_AS(mollify_initial_data(taylor_green_data(g), 0.0), ConfigurationError);
    CHECK_THROWS_AS(mollify_initial_data(taylor_green_data(g), 1.0), ConfigurationError);
  }
}

TEST_CASE("compatibility pair") {
  const Grid g = make_grid(48, 2 * pi);
  SUBCASE("rest state") {
    const InitialData data{ScalarField(g, 1.0), VectorField(g), VectorField(g, {0.0, 0.0, 1.0}), {0.0, 0.0, 1.0},
                           1.0, 1.0};
    const auto pair = compute_compatibility(data);
    CHECK(max_abs(pair.P0) == 0.0);
    CHECK(max_abs(pair.g0) == 0.0);
    CHECK(pair.g0_l2 == 0.0);
  }
  SUBCASE("taylor-green with a constant director") {
    const InitialData data = taylor_green_data(g);
    const auto pair = compute_compatibility(data);
    // Laplace u0 = -2 u0 is already solenoidal
    CHECK(max_abs(pair.g0 - (-2.0) * data.u0) <= 1e-11);
    CHECK(max_abs(pair.P0) <= 1e-11);
    CHECK(compatibility_residual(data, pair) <= 1e-11);
  }
  SUBCASE("unit density: sqrt(rho) g0 is the projected force") {
    std::mt19937_64 rng(4);
    const InitialData data{ScalarField(g, 1.0), random_solenoidal_field(g, rng, 3, 1.0),
                           random_unit_director(g, rng, 2, 0.5), {0.0, 0.0, 1.0}, 1.0, 1.0};
    const auto pair = compute_compatibility(data);
    VectorField force = laplacian(data.u0);
    force -= divergence(elastic_stress(data.d0));
    CHECK(max_abs(pair.g0 - leray_project(force)) <= 1e-11 * (1.0 + max_abs(force)));
    CHECK(compatibility_residual(data, pair) <= 1e-11);
    CHECK(std::abs(mean(pair.P0)) <= 1e-13);
  }
  SUBCASE("variable density reassembles") {
    const BumpShape shape{std::nullopt, 0.35};
    const InitialData data{gen_density(g, 0.5, 2.0, {shape, {}, {}}),
                           gen_velocity(g, {VelocityMode::random_bump, 1.0, shape, 3}),
                           gen_director(g, {0.0, 0.0, 1.0}, {{1.0, 0.0, 0.0}, 1.0, shape}),
                           {0.0, 0.0, 1.0},
                           0.5,
                           2.0};
    const auto pair = compute_compatibility(data);
    CHECK(pair.g0.all_finite());
    CHECK(compatibility_residual(data, pair) <= 1e-10);
  }
  SUBCASE("vacuum") {
    InitialData data = taylor_green_data(g);
    data.rho0[7] = 0.0;
    CHECK_THROWS_AS(compute_compatibility(data), UnsupportedInput);
  }
}
