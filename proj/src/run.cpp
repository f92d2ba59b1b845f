#include "nemaflow/run.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <sstream>

#include "nemaflow/errors.hpp"
#include "nemaflow/snapshot.hpp"

namespace nemaflow {

namespace {

void write_state(const std::filesystem::path& dir, const State& s) {
  std::filesystem::create_directories(dir);
  char stem[32];
  std::snprintf(stem, sizeof stem, "%06ld", s.step);
  write_snapshot(dir / ("rho_" + std::string(stem) + ".nf"), "rho", s.rho);
  write_snapshot(dir / ("u_" + std::string(stem) + ".nf"), "velocity", s.u);
  write_snapshot(dir / ("d_" + std::string(stem) + ".nf"), "director", s.d);
  write_snapshot(dir / ("P_" + std::string(stem) + ".nf"), "pressure", s.P);
}

}  // namespace

std::string to_string(Termination t) {
  switch (t) {
    case Termination::completed:
      return "completed";
    case Termination::blow_up:
      return "blow_up";
    case Termination::stability_failure:
      return "stability_failure";
  }
  return "unknown";
}

long step_count(const SolverConfig& config) {
  return static_cast<long>(std::ceil(config.t_end / config.dt - 1e-9));
}

Trajectory run(const InitialData& data, const RunOptions& options) {
  const SolverConfig& cfg = options.solver;
  validate(cfg);
  validate(data);
  auto warn = options.warn ? options.warn : [](const std::string& m) { std::cerr << "warning: " << m << '\n'; };

  Trajectory traj(make_state(data));
  const auto pair = compute_compatibility(data);
  traj.g0_l2 = pair.g0_l2;
  traj.compatibility_residual = compatibility_residual(data, pair);
  const double rho_floor = data.rho_lower;
  traj.viscosity_scale = 1.0 / data.rho0.min();
  traj.rho_min = data.rho0.min();
  traj.rho_max = data.rho0.max();
  const double low = traj.rho_min * (1.0 - cfg.rho_tolerance);
  const double high = traj.rho_max * (1.0 + cfg.rho_tolerance);

  ImexStepper stepper(cfg, traj.viscosity_scale, rho_floor);
  State& state = traj.final_state;
  const long steps = step_count(cfg);
  bool cfl_reported = false;
  try {
    for (long k = 0;; ++k) {
      const Tendencies rates = evaluate_tendencies(state, cfg, rho_floor);
      traj.max_pressure_iterations = std::max(traj.max_pressure_iterations, rates.pressure_iterations);
      const bool record = k == 0 || k == steps || (options.record_every > 0 && k % options.record_every == 0);
      if (record) {
        traj.records.push_back(compute_record(state, rates, cfg.epsilon, stepper.last_unit_drift()));
        if (options.observer) options.observer(state, traj.records.back());
      }
      if (options.snapshot_every > 0 && !options.snapshot_dir.empty() &&
          (k % options.snapshot_every == 0 || k == steps)) {
        write_state(options.snapshot_dir, state);
        ++traj.snapshots_written;
      }
      if (k == steps) break;
      stepper.step(state, rates);
      traj.max_cfl = std::max(traj.max_cfl, stepper.last_cfl());
      if (stepper.last_cfl() > 0.5 && !cfl_reported) {
        std::ostringstream msg;
        msg << "CFL number " << stepper.last_cfl() << " exceeds 0.5 at step " << state.step;
        warn(msg.str());
        cfl_reported = true;
      }
      const double lo = state.rho.min();
      const double hi = state.rho.max();
      traj.rho_min = std::min(traj.rho_min, lo);
      traj.rho_max = std::max(traj.rho_max, hi);
      if (traj.rho_within_tolerance && (lo < low || hi > high)) {
        traj.rho_within_tolerance = false;
        std::ostringstream msg;
        msg << "density range [" << lo << ", " << hi << "] left the transport tolerance at step " << state.step;
        warn(msg.str());
      }
    }
  } catch (const BlowUpError& e) {
    traj.termination = Termination::blow_up;
    traj.message = e.what();
    traj.failed_step = e.step();
  } catch (const StabilityError& e) {
    traj.termination = Termination::stability_failure;
    traj.message = e.what();
    traj.failed_step = state.step;
  }
  traj.cfl_warnings = stepper.cfl_warnings();
  if (!traj.records.empty() && options.record_every == 1) {
    // After a blow-up the last records may be non-finite; f_eps covers the finite prefix.
    auto& recs = traj.records;
    std::size_t good = 0;
    while (good < recs.size() && std::isfinite(recs[good].f_instant) && std::isfinite(recs[good].f_integrand)) ++good;
    if (good == recs.size()) {
      fill_f_eps(recs);
    } else {
      std::vector<DiagnosticsRecord> head(recs.begin(), recs.begin() + static_cast<std::ptrdiff_t>(good));
      if (!head.empty()) fill_f_eps(head);
      for (std::size_t k = 0; k < recs.size(); ++k)
        recs[k].f_eps = k < good ? head[k].f_eps : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return traj;
}

}  // namespace nemaflow
