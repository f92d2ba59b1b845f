#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nemaflow/config.hpp"
#include "nemaflow/run.hpp"

namespace nemaflow {

/// Smooth coupled datum on any grid: rho = 1 + 0.3 phi / max|phi| in [0.7, 1.3],
/// a random solenoidal velocity of peak speed 0.2 and a random unit director
/// with angle amplitude 0.5, all band-limited to frequencies |f| <= 2.
InitialData standard_smooth_datum(const Grid& grid, std::uint64_t seed);

/// Data described by the initial_data section (seeded), mollified when
/// mollify_epsilon > 0.
InitialData build_initial_data(const ExperimentSpec& spec, const Grid& grid);

// Oracles with closed-form solutions.

struct OracleResult {
  double error = 0.0;      // max-norm error of the oracle field at t_end
  double secondary = 0.0;  // tg: director deviation from d_star; others 0
  Trajectory trajectory;
};

/// rho = 1, d = e3, u = a (sin kx cos ky, -cos kx sin ky, 0) decaying at
/// rate 2k^2 + 4 eps k^4. Error is max |u - exact|.
OracleResult oracle_taylor_green(const SolverConfig& config, double amplitude = 1.0, long record_every = 0);
/// Constant velocity (speed, 0, 0) carrying a band-limited density. Error is max |rho - exact|.
OracleResult oracle_transport(const SolverConfig& config, double speed = 1.0, long record_every = 0);
/// u = 0, d = (cos th, sin th, 0) with th = a (e^{-k^2 t} sin kx + 0.4 e^{-4k^2 t} sin 2kx).
/// Runs director_only; error is max |d - exact|.
OracleResult oracle_heatflow(const SolverConfig& config, double amplitude = 0.2, long record_every = 0);

// Sweeps and studies.

struct SweepMember {
  double epsilon = 0.0;
  Termination termination = Termination::completed;
  std::string message;
  double f_eps_max = 0.0;
  double mollification_delta = 0.0;
  std::optional<State> final_state;
};

struct SweepPair {
  double eps_a, eps_b;
  double u_distance;       // ||u_a - u_b||_L2 at t_end
  double grad_d_distance;  // ||grad(d_a - d_b)||_L2 at t_end
};

struct SweepTable {
  std::vector<SweepMember> members;
  std::vector<SweepPair> pairs;
  bool monotone = false;  // both distances decrease along the pairs
  double reference_f_eps = 0.0;
  double f_eps_ratio = 0.0;  // max f_eps over members / reference value
  bool any_blow_up = false;
};

/// One member per epsilon (decreasing list): data mollified for eps > 0,
/// run to t_end. `member_done` sees each finished trajectory (may be called
/// from worker threads, one member at a time per thread).
SweepTable eps_sweep(const InitialData& data, const SolverConfig& base, const std::vector<double>& epsilons,
                     double reference_epsilon, int threads = 1,
                     const std::function<void(std::size_t, const Trajectory&)>& member_done = {});

struct StabilityResult {
  std::vector<double> t;
  std::vector<double> g_delta, g_half, g_zero;
  double g0 = 0.0, g_end = 0.0;
  double ratio = 0.0;   // G_delta(t_end) / G_{delta/2}(t_end)
  double lambda = 0.0;  // max over t > 0 of ln(G(t)/G(0)) / t
  std::optional<double> lambda_half_dt;
  bool zero_exact = false;  // unperturbed rerun matched bit for bit
  Termination termination = Termination::completed;
  std::string message;
};

/// Fixed smooth perturbation shapes (seeded separately from the datum):
/// rho += delta psi, u += delta v, d += delta w then renormalised.
InitialData perturb(const InitialData& data, double delta, std::uint64_t seed);

/// Base, delta, delta/2 and an unperturbed copy stepped in lockstep; G(t)
/// against the base after every step.
StabilityResult stability_study(const InitialData& data, const SolverConfig& config, double delta, std::uint64_t seed,
                                bool refit_at_half_dt = true);

struct RefinementLevel {
  int n = 0;
  double dt = 0.0;
  double oracle_error = 0.0;  // NaN without an oracle
  double balance = 0.0;       // max relative energy-balance residual
  double drift = 0.0;         // max pre-renormalisation unit drift
  Termination termination = Termination::completed;
};

struct RefinementTable {
  bool temporal = true;
  std::vector<RefinementLevel> levels;
  std::vector<double> error_orders, balance_orders, drift_orders;  // log2 of successive ratios
  std::optional<int> floor_n;  // spatial: first n whose error matches the finest level
};

/// dts (halving) or ns (doubling), at least 3 levels. oracle is tg, transport,
/// heatflow or none (the datum from `data_for`).
RefinementTable refinement_study(const SolverConfig& base, const std::string& oracle, const std::vector<double>& dts,
                                 const std::vector<int>& ns, std::optional<double> amplitude, double floor_tolerance,
                                 const std::function<InitialData(const Grid&)>& data_for = {});

// Reports.

struct Check {
  std::string name;
  double value;
  std::string relation;  // "<=", "in", "=="
  double bound;
  double bound_high = 0.0;  // "in" only
  bool passed;
};

struct Report {
  std::string kind;
  std::string config_hash;
  std::string version;
  std::vector<Check> checks;
  bool blow_up = false;
  std::vector<std::string> notes;
  nlohmann::json data = nlohmann::json::object();

  bool passed() const;
  /// 0 pass, 1 threshold failure, 3 blow-up.
  int exit_code() const;
  nlohmann::json to_json() const;
  std::string summary() const;
};

struct ExperimentOptions {
  bool write_outputs = true;
  std::function<void(const std::string&)> progress;  // null: silent
};

/// Runs spec.kind, writes CSV/plots/metadata under spec.output.directory and
/// returns the report (also written as report.json).
Report run_experiment(const ExperimentSpec& spec, const ExperimentOptions& options = {});

}  // namespace nemaflow
