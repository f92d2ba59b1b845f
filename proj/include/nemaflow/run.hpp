#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "nemaflow/diagnostics.hpp"
#include "nemaflow/dynamics.hpp"
#include "nemaflow/initial_data.hpp"

namespace nemaflow {

enum class Termination { completed, blow_up, stability_failure };

std::string to_string(Termination t);

struct RunOptions {
  SolverConfig solver;
  /// Diagnostics every this many steps; 0 records only the first and last
  /// state. Balance residuals and f_eps need every step.
  long record_every = 1;
  /// Field snapshots every this many steps (0: none) into snapshot_dir.
  long snapshot_every = 0;
  std::filesystem::path snapshot_dir;
  /// Called after every record, before the step is taken.
  std::function<void(const State&, const DiagnosticsRecord&)> observer;
  /// Receives warnings (CFL, density excursion). Defaults to stderr.
  std::function<void(const std::string&)> warn;
};

struct Trajectory {
  explicit Trajectory(State initial) : final_state(std::move(initial)) {}

  std::vector<DiagnosticsRecord> records;
  State final_state;
  Termination termination = Termination::completed;
  std::string message;
  long failed_step = -1;
  double viscosity_scale = 0.0;
  double g0_l2 = 0.0;                   // compatibility field norm
  double compatibility_residual = 0.0;  // reassembly residual
  double max_cfl = 0.0;
  long cfl_warnings = 0;
  double rho_min = 0.0;  // extremes over the run
  double rho_max = 0.0;
  bool rho_within_tolerance = true;
  int max_pressure_iterations = 0;
  long snapshots_written = 0;
};

/// Integrates from `data` to solver.t_end, recording diagnostics at every
/// step. Blow-up and density collapse end the run early; the partial
/// trajectory is returned with the termination reason.
Trajectory run(const InitialData& data, const RunOptions& options);

/// Number of steps covering t_end with step dt.
long step_count(const SolverConfig& config);

}  // namespace nemaflow
