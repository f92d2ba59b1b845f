#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nemaflow/diagnostics.hpp"
#include "nemaflow/director_terms.hpp"
#include "nemaflow/errors.hpp"
#include "nemaflow/initial_data.hpp"
#include "nemaflow/norms.hpp"
#include "nemaflow/spectral.hpp"

using namespace nemaflow;

namespace {
constexpr double pi = std::numbers::pi;

State rest_state(const Grid& g) {
  return {0.0, 0, ScalarField(g, 1.0), VectorField(g), VectorField(g, {0.0, 0.0, 1.0}), ScalarField(g)};
}

VectorField planar_director(const Grid& g, double a) {
  return VectorField::from_function(g, [a](double x, double, double) {
    return Vec3{std::cos(a * std::sin(x)), std::sin(a * std::sin(x)), 0.0};
  });
}

std::vector<DiagnosticsRecord> synthetic(double dt, int count) {
  std::vector<DiagnosticsRecord> recs(count);
  for (int k = 0; k < count; ++k) {
    recs[k].t = k * dt;
    recs[k].energy = std::exp(-recs[k].t);
    recs[k].dissipation = std::exp(-recs[k].t);
  }
  return recs;
}

double max_relative(const std::vector<BalanceResidual>& r) {
  double m = 0.0;
  for (const auto& x : r) m = std::max(m, x.relative);
  return m;
}

std::vector<DiagnosticsRecord> simulate(State s, SolverConfig cfg, double t_end) {
  const double floor = s.rho.min();
  ImexStepper stepper(cfg, 1.0 / floor, floor);
  std::vector<DiagnosticsRecord> recs;
  const long steps = std::lround(t_end / cfg.dt);
  for (long k = 0; k <= steps; ++k) {
    const Tendencies t = evaluate_tendencies(s, cfg, floor);
    recs.push_back(compute_record(s, t, cfg.epsilon, stepper.last_unit_drift()));
    if (k < steps) stepper.step(s, t);
  }
  fill_f_eps(recs);
  return recs;
}
}  // namespace

TEST_CASE("energy and dissipation closed forms") {
  const Grid g = make_grid(16, 2 * pi);
  const double L = 2 * pi;
  SUBCASE("rest") {
    State s = rest_state(g);
    s.rho = ScalarField::from_function(g, [](double x, double, double) { return 2.0 + std::sin(x); });
    const auto ed = energy_and_dissipation(s, 0.1);
    CHECK(ed.energy == 0.0);
    CHECK(ed.dissipation == 0.0);
  }
  SUBCASE("taylor-green: |u|^2 averages to a^2/2, |grad u|^2 to a^2") {
    State s = rest_state(g);
    const double a = 1.7;
    s.u = VectorField::from_function(g, [a](double x, double y, double) {
      return Vec3{a * std::sin(x) * std::cos(y), -a * std::cos(x) * std::sin(y), 0.0};
    });
    const double eps = 1e-2;
    const auto ed = energy_and_dissipation(s, eps);
    const double volume = L * L * L;
    CHECK(ed.energy == doctest::Approx(a * a * volume / 4).epsilon(1e-12));
    CHECK(ed.dissipation == doctest::Approx(a * a * volume + 2 * eps * a * a * volume).epsilon(1e-12));
  }
  SUBCASE("planar director: 1/2 int theta'^2 and int theta''^2") {
    State s = rest_state(g);
    const double a = 0.3;
    s.d = planar_director(make_grid(32, L), a);
    s.rho = ScalarField(s.d.grid(), 1.0);
    s.u = VectorField(s.d.grid());
    const auto ed = energy_and_dissipation(s, 0.0);
    // theta = a sin x: int theta'^2 = int theta''^2 = a^2 pi over one period, times L^2 from y, z
    CHECK(ed.energy == doctest::Approx(0.5 * L * L * a * a * pi).epsilon(1e-10));
    CHECK(ed.dissipation == doctest::Approx(L * L * a * a * pi).epsilon(1e-10));
  }
}

TEST_CASE("energy balance residual") {
  SUBCASE("second-order differencing on a synthetic balance") {
    const double coarse = max_relative(energy_balance_residual(synthetic(0.02, 11)));
    const double fine = max_relative(energy_balance_residual(synthetic(0.01, 21)));
    CHECK(coarse > 0.0);
    CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.05));
  }
  SUBCASE("equilibrium run") {
    const Grid g = make_grid(16, 2 * pi);
    SolverConfig cfg;
    cfg.dt = 1e-2;
    const auto recs = simulate(rest_state(g), cfg, 0.05);
    for (const auto& r : energy_balance_residual(recs)) CHECK(std::abs(r.raw) <= 1e-12);
    for (const auto& r : recs) CHECK(r.f_eps == 0.0);
  }
  SUBCASE("window checks") {
    CHECK_THROWS_AS(energy_balance_residual(synthetic(0.1, 2)), UsageError);
    auto recs = synthetic(0.1, 5);
    recs[3].t += 0.01;
    CHECK_THROWS_AS(energy_balance_residual(recs), UsageError);
  }
  SUBCASE("director heat flow satisfies the reduced law at second order") {
    const Grid g = make_grid(16, 2 * pi);
    State s = rest_state(g);
    s.d = planar_director(g, 0.1);
    std::vector<double> worst;
    for (double dt : {2e-3, 1e-3}) {
      SolverConfig cfg;
      cfg.dt = dt;
      cfg.decouple = DecoupleMode::director_only;
      const auto recs = simulate(s, cfg, 0.04);
      for (const auto& r : recs) CHECK(std::pow(r.norm("grad_u"), 2) == 0.0);
      worst.push_back(max_relative(energy_balance_residual(recs)));
    }
    CHECK(worst[0] / worst[1] >= 3.5);
    CHECK(worst[0] / worst[1] <= 4.5);
  }
}

TEST_CASE("identity residuals") {
  SUBCASE("constant director and zero flow give exact zeros") {
    const Grid g = make_grid(16, 2 * pi);
    const auto r = identity_residuals(VectorField(g, {0.3, 0.0, 0.0}), VectorField(g, {0.0, 0.6, 0.8}));
    for (double v : r.raw) CHECK(v == 0.0);
    for (double v : r.relative) CHECK(v == 0.0);
  }
  SUBCASE("resolved random fields") {
    const Grid g = make_grid(48, 2 * pi);
    std::mt19937_64 rng(21);
    for (int t = 0; t < 3; ++t) {
      const VectorField d = random_unit_director(g, rng, 2, 0.6);
      const VectorField u = random_solenoidal_field(g, rng, 2, 1.0);
      const auto r = identity_residuals(u, d);
      for (auto name : kResidualNames) CHECK_MESSAGE(r.get(name) <= 1e-8, name);
      CHECK(r.get("nl1", false) > 0.0);
    }
  }
  SUBCASE("negative control: a varying modulus breaks d . Laplace d = -|grad d|^2") {
    const Grid g = make_grid(32, 2 * pi);
    std::mt19937_64 rng(22);
    VectorField d = random_unit_director(g, rng, 2, 0.6);
    const VectorField u = random_solenoidal_field(g, rng, 2, 1.0);
    const double clean = identity_residuals(u, d).get("d_dot_lapd");
    ScalarField phi = random_trig_field(g, rng, 2);
    phi *= 1.0 / max_abs(phi);
    for (int c = 0; c < 3; ++c) {
      for (std::size_t p = 0; p < g.size(); ++p) d[c][p] *= 1.0 + 0.01 * phi[p];
    }
    const double perturbed = identity_residuals_unchecked(u, d).get("d_dot_lapd");
    CHECK(perturbed > 1e-3);
    CHECK(perturbed > 1e4 * clean);
    CHECK_THROWS_AS(identity_residuals(u, d), ConstraintViolation);
  }
}

TEST_CASE("coupling cancellation on resolved states") {
  const Grid g = make_grid(32, 2 * pi);
  std::mt19937_64 rng(23);
  for (int t = 0; t < 3; ++t) {
    const VectorField d = random_unit_director(g, rng, 2, 0.6);
    const VectorField u = random_solenoidal_field(g, rng, 2, 1.0);
    const auto c = coupling_cancellation(u, d);
    CHECK(c.relative() <= 1e-8);
    // the two integrals are individually large
    CHECK(std::abs(inner_product(elastic_stress(d), jacobian(u))) > 1e3 * c.raw);
  }
}

TEST_CASE("time derivatives") {
  const Grid g = make_grid(16, 2 * pi);
  SolverConfig cfg;
  SUBCASE("equilibrium") {
    const auto td = time_derivative_fields(rest_state(g), cfg, 1.0);
    CHECK(max_abs(td.rho) == 0.0);
    CHECK(max_abs(td.u) == 0.0);
    CHECK(max_abs(td.d) == 0.0);
  }
  SUBCASE("uniform transport") {
    State s = rest_state(g);
    s.u = VectorField(g, {0.5, 0.0, 0.0});
    s.rho = ScalarField::from_function(g, [](double x, double, double) { return 1.0 + 0.2 * std::sin(x); });
    const auto td = time_derivative_fields(s, cfg, 0.5);
    const ScalarField expected =
        ScalarField::from_function(g, [](double x, double, double) { return -0.1 * std::cos(x); });
    CHECK(max_abs(td.rho - expected) <= 1e-12);
    CHECK(max_abs(td.u) <= 1e-12);
  }
  SUBCASE("two evaluations of sqrt(rho0) u_t at t = 0") {
    std::mt19937_64 rng(24);
    const Grid h = make_grid(32, 2 * pi);
    ScalarField rho = random_trig_field(h, rng, 2);
    rho *= 0.4 / max_abs(rho);
    rho += 1.0;
    const InitialData data{rho, random_solenoidal_field(h, rng, 2, 1.0), random_unit_director(h, rng, 2, 0.5),
                           {0.0, 0.0, 1.0}, rho.min(), rho.max()};
    const auto pair = compute_compatibility(data);
    const VectorField direct = time_derivative_fields(make_state(data), cfg, data.rho_lower).u;
    const VectorField rebuilt = velocity_rate_from_compatibility(data, pair);
    const double scale = weighted_l2(data.rho0, direct);
    CHECK(weighted_l2(data.rho0, direct - rebuilt) <= 1e-9 * scale);
  }
}

TEST_CASE("f_eps functional") {
  const Grid g = make_grid(16, 2 * pi);
  std::mt19937_64 rng(25);
  State s = rest_state(g);
  s.u = random_solenoidal_field(g, rng, 2, 0.5);
  s.d = random_unit_director(g, rng, 1, 0.3);
  SolverConfig cfg;
  cfg.epsilon = 1e-2;
  std::vector<double> f0;
  for (double dt : {2e-3, 1e-3}) {
    cfg.dt = dt;
    const auto recs = simulate(s, cfg, 0.01);
    f0.push_back(recs.front().f_eps);
    double previous = -1.0;
    for (const auto& r : recs) {
      const double integral_part = r.f_eps - r.f_instant;
      CHECK(integral_part >= previous);
      previous = integral_part;
    }
  }
  CHECK(std::isfinite(f0[0]));
  CHECK(std::abs(f0[0] - f0[1]) <= 0.01 * f0[1]);
  CHECK_THROWS_AS(f_eps_functional({}), UsageError);
  std::vector<DiagnosticsRecord> broken(2);
  broken[1].f_integrand = std::nan("");
  CHECK_THROWS_AS(f_eps_functional(broken), UsageError);
}

TEST_CASE("gronwall quantity") {
  const Grid g = make_grid(16, 2 * pi);
  std::mt19937_64 rng(26);
  State a = rest_state(g);
  a.u = random_solenoidal_field(g, rng, 2, 1.0);
  a.d = random_unit_director(g, rng, 2, 0.4);
  CHECK(gronwall_quantity(a, a) == 0.0);
  State b = a;
  const double delta = 1e-3;
  b.u *= 1.0 + delta;
  const double norm_u = lp_norm(a.u, 2);
  CHECK(gronwall_quantity(a, b) == doctest::Approx(delta * delta * norm_u * norm_u).epsilon(1e-10));
  CHECK(gronwall_quantity(b, a) == doctest::Approx(gronwall_quantity(a, b)).epsilon(1e-12));
  State c = a;
  c.rho += 0.5;
  // constant density offset: ||0.5||_{L^{3/2}}^2 = 0.25 |T^3|^{4/3}
  CHECK(gronwall_quantity(a, c) == doctest::Approx(0.25 * std::pow(g.measure(), 4.0 / 3.0)).epsilon(1e-12));
  CHECK_THROWS_AS(gronwall_quantity(a, rest_state(make_grid(8, 2 * pi))), DimensionError);
}
