#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include "nemaflow/director_terms.hpp"
#include "nemaflow/errors.hpp"
#include "nemaflow/experiments.hpp"
#include "nemaflow/norms.hpp"
#include "nemaflow/spectral.hpp"

using namespace nemaflow;

namespace {
constexpr double pi = std::numbers::pi;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

bool identical(const ScalarField& a, const ScalarField& b) {
  return std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

SolverConfig small(int n, double dt, double t_end) {
  SolverConfig c;
  c.n = n;
  c.dt = dt;
  c.t_end = t_end;
  return c;
}

ExperimentSpec quick_spec(ExperimentKind kind, const std::string& dir) {
  ExperimentSpec s;
  s.kind = kind;
  s.solver = small(8, 1e-3, 0.005);
  s.output.directory = std::filesystem::temp_directory_path() / dir;
  std::filesystem::remove_all(s.output.directory);
  return s;
}
}  // namespace

TEST_CASE("standard datum") {
  const Grid g = make_grid(16, 2 * pi);
  const InitialData a = standard_smooth_datum(g, 7);
  CHECK(a.rho0.min() >= 0.7 - 1e-12);
  CHECK(a.rho0.max() <= 1.3 + 1e-12);
  CHECK(std::min(std::abs(a.rho0.min() - 0.7), std::abs(a.rho0.max() - 1.3)) <= 1e-12);
  CHECK(max_abs(a.u0) == doctest::Approx(0.2));
  CHECK(max_abs(divergence(a.u0)) <= 1e-12);
  CHECK(unit_drift(a.d0) <= 1e-14);
  const InitialData b = standard_smooth_datum(g, 7);
  CHECK(identical(a.rho0, b.rho0));
  CHECK(identical(a.u0[1], b.u0[1]));
  CHECK_FALSE(identical(a.u0[1], standard_smooth_datum(g, 8).u0[1]));
}

TEST_CASE("config-driven data") {
  const Grid g = make_grid(16, 2 * pi);
  ExperimentSpec s;
  s.initial.velocity.mode = "zero";
  s.initial.director.mode = "constant";
  s.initial.director.d_star = {0.0, 3.0, 4.0};
  InitialData d = build_initial_data(s, g);
  CHECK(max_abs(d.u0) == 0.0);
  CHECK(max_abs(d.d0 - VectorField(g, {0.0, 0.6, 0.8})) <= 1e-15);

  s.initial.density.mode = "constant";
  s.initial.mollify_epsilon = 0.5;
  d = build_initial_data(s, g);
  CHECK(d.rho0.min() == doctest::Approx(0.7 + 0.5));  // zero velocity: delta = 0
  CHECK(d.rho_lower == doctest::Approx(1.2));

  s.initial.director.d_star = {0.0, 0.0, 0.0};
  CHECK_THROWS_AS(build_initial_data(s, g), ConfigurationError);
}

TEST_CASE("oracles") {
  SUBCASE("taylor-green, with and without regularisation") {
    for (double eps : {0.0, 1e-2}) {
      SolverConfig c = small(16, 1e-3, 0.05);
      c.epsilon = eps;
      const auto r = oracle_taylor_green(c, 1.0);
      CHECK(r.error <= 1e-6);
      CHECK(r.secondary <= 1e-12);
      CHECK(r.trajectory.records.size() == 2);
    }
  }
  SUBCASE("taylor-green on a larger box decays at its own wavenumber") {
    SolverConfig c = small(16, 1e-3, 0.05);
    c.box_length = 4 * pi;
    const auto r = oracle_taylor_green(c, 1.0);
    CHECK(r.error <= 1e-6);
  }
  SUBCASE("transport") {
    const auto r = oracle_transport(small(16, 1e-4, 0.02));
    CHECK(r.error <= 1e-9);
  }
  SUBCASE("heat flow") {
    const auto r = oracle_heatflow(small(32, 2e-4, 0.01), 0.2);
    CHECK(r.error <= 1e-8);
  }
}

TEST_CASE("eps sweep on equilibrium data has zero distances") {
  const Grid g = make_grid(8, 2 * pi);
  InitialData eq{ScalarField(g, 1.0), VectorField(g), VectorField(g, {0.0, 0.0, 1.0}), {0.0, 0.0, 1.0}, 1.0, 1.0};
  const SweepTable t = eps_sweep(eq, small(8, 1e-3, 0.003), {1e-2, 1e-3, 0.0}, 1e-3);
  REQUIRE(t.pairs.size() == 2);
  for (const auto& p : t.pairs) {
    CHECK(p.u_distance == 0.0);
    CHECK(p.grad_d_distance == 0.0);
  }
  CHECK_FALSE(t.any_blow_up);
  CHECK(t.f_eps_ratio == 1.0);
}

TEST_CASE("eps sweep is independent of the worker count") {
  const Grid g = make_grid(8, 2 * pi);
  const InitialData data = standard_smooth_datum(g, 2);
  const SolverConfig c = small(8, 1e-3, 0.004);
  const SweepTable one = eps_sweep(data, c, {1e-2, 1e-3, 1e-4}, 1e-4, 1);
  const SweepTable two = eps_sweep(data, c, {1e-2, 1e-3, 1e-4}, 1e-4, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(one.members[i].f_eps_max == two.members[i].f_eps_max);
    CHECK(identical(one.members[i].final_state->u[0], two.members[i].final_state->u[0]));
  }
  CHECK(one.pairs[1].u_distance == two.pairs[1].u_distance);
  CHECK(one.members[0].mollification_delta > one.members[1].mollification_delta);
  CHECK(one.reference_f_eps == one.members[2].f_eps_max);
}

TEST_CASE("stability study") {
  const Grid g = make_grid(12, 2 * pi);
  const InitialData data = standard_smooth_datum(g, 4);
  const StabilityResult r = stability_study(data, small(12, 1e-3, 0.01), 1e-3, 99, false);
  CHECK(r.termination == Termination::completed);
  CHECK(r.zero_exact);
  for (double v : r.g_zero) CHECK(v == 0.0);
  CHECK(r.t.size() == 11);
  CHECK(r.ratio >= 3.5);
  CHECK(r.ratio <= 4.6);
  CHECK(std::isfinite(r.lambda));
  CHECK_FALSE(r.lambda_half_dt.has_value());
  CHECK_THROWS_AS(stability_study(data, small(12, 1e-3, 0.01), 0.0, 99), ConfigurationError);

  const InitialData same = perturb(data, 0.0, 99);
  CHECK(identical(same.rho0, data.rho0));
  CHECK(identical(same.u0[2], data.u0[2]));
  CHECK(unit_drift(perturb(data, 0.1, 99).d0) <= 1e-14);
}

TEST_CASE("refinement study") {
  CHECK_THROWS_AS(refinement_study(small(8, 1e-3, 0.01), "tg", {2e-3, 1e-3}, {}, std::nullopt, 0.05), UsageError);
  const RefinementTable t = refinement_study(small(8, 1e-3, 0.05), "tg", {4e-3, 2e-3, 1e-3}, {}, std::nullopt, 0.05);
  REQUIRE(t.error_orders.size() == 2);
  for (double o : t.error_orders) {
    CHECK(o >= 1.7);
    CHECK(o <= 2.3);
  }
  CHECK(t.temporal);
  CHECK_FALSE(t.floor_n.has_value());
}

TEST_CASE("reports map outcomes to exit codes") {
  Report r;
  CHECK(r.exit_code() == 0);
  r.checks.push_back({"x", 2.0, "<=", 1.0, 0.0, false});
  CHECK(r.exit_code() == 1);
  r.blow_up = true;
  CHECK(r.exit_code() == 3);
  CHECK(r.summary().find("FAIL x") != std::string::npos);
  CHECK(r.to_json()["checks"][0]["name"] == "x");
}

TEST_CASE("single run outputs are deterministic") {
  ExperimentSpec s = quick_spec(ExperimentKind::single_run, "nemaflow_exp_a");
  const Report a = run_experiment(s);
  const std::string csv_a = slurp(s.output.directory / "diagnostics.csv");
  const Report b = run_experiment(s);
  CHECK(slurp(s.output.directory / "diagnostics.csv") == csv_a);
  CHECK(a.config_hash == b.config_hash);
  CHECK(a.version == NEMAFLOW_VERSION);
  for (const char* f : {"config.yaml", "report.json", "metadata.json", "energy.svg", "residuals.svg"})
    CHECK(std::filesystem::exists(s.output.directory / f));
  const auto meta = nlohmann::json::parse(slurp(s.output.directory / "metadata.json"));
  CHECK(meta["config_hash"] == a.config_hash);
  CHECK(meta["termination"] == "completed");
  CHECK(meta.contains("compatibility"));
  std::filesystem::remove_all(s.output.directory);
}

TEST_CASE("one-member sweep is a single run") {
  ExperimentSpec sweep = quick_spec(ExperimentKind::eps_sweep, "nemaflow_exp_b");
  sweep.epsilons = {1e-3};
  const Report rs = run_experiment(sweep);
  ExperimentSpec single = quick_spec(ExperimentKind::single_run, "nemaflow_exp_c");
  single.solver.epsilon = 1e-3;
  single.initial.mollify_epsilon = 1e-3;
  const Report r1 = run_experiment(single);
  CHECK(rs.kind == "single_run");
  CHECK(slurp(sweep.output.directory / "diagnostics.csv") == slurp(single.output.directory / "diagnostics.csv"));
  std::filesystem::remove_all(sweep.output.directory);
  std::filesystem::remove_all(single.output.directory);
}

TEST_CASE("equilibrium single run reports flat energy") {
  ExperimentSpec s = quick_spec(ExperimentKind::single_run, "nemaflow_exp_d");
  s.initial.velocity.mode = "zero";
  s.initial.director.mode = "constant";
  const Report r = run_experiment(s, {false, {}});
  CHECK(r.passed());
  CHECK(r.data["max_energy_change"].get<double>() <= 1e-12);
  CHECK(r.data["max_identity_residual"].get<double>() <= 1e-12);
  CHECK_FALSE(std::filesystem::exists(s.output.directory));
}

TEST_CASE("blow-up is recorded, not thrown") {
  ExperimentSpec s = quick_spec(ExperimentKind::single_run, "nemaflow_exp_e");
  s.solver = small(16, 0.05, 20.0);
  s.initial.density.mode = "constant";
  s.initial.density.upper = s.initial.density.lower;
  s.initial.velocity.amplitude = 200.0;
  s.initial.velocity.max_mode = 3;
  s.initial.director.mode = "constant";
  const Report r = run_experiment(s, {false, {}});
  CHECK(r.blow_up);
  CHECK(r.exit_code() == 3);
}
