#pragma once

#include <optional>

#include "nemaflow/director_terms.hpp"
#include "nemaflow/field.hpp"
#include "nemaflow/initial_data.hpp"

namespace nemaflow {

enum class DecoupleMode {
  full,
  director_only,  // u and rho frozen
  fluid_only,     // d frozen, no elastic stress
};

struct SolverConfig {
  double epsilon = 0.0;  // biharmonic coefficient; 0 is the unregularised system
  double dt = 1e-3;
  double t_end = 0.1;
  int n = 32;
  double box_length = 6.283185307179586;
  int renormalize_every = 1;
  DecoupleMode decouple = DecoupleMode::full;
  double rho_tolerance = 1e-3;
  double pressure_tolerance = 1e-13;
  int pressure_max_iterations = 400;
};

/// Throws ConfigurationError for dt <= 0, t_end <= 0, epsilon outside [0, 1)
/// or renormalize_every < 1.
void validate(const SolverConfig& config);

struct State {
  double t = 0.0;
  long step = 0;
  ScalarField rho;
  VectorField u;
  VectorField d;
  ScalarField P;  // pressure of the last evaluation, zero mean
};

State make_state(const InitialData& data);

/// -(u . grad) rho, dealiased.
ScalarField density_rhs(const State& state);

/// Laplace u - eps Bilaplace u - rho (u.grad)u - div sigma(d), before the
/// pressure is removed. Throws StabilityError if rho < rho_floor / 2 anywhere.
VectorField momentum_rhs(const State& state, double epsilon, double rho_floor = 0.0);

/// Pressure making rho^{-1} (force - grad P) divergence-free:
/// -div(rho^{-1} grad P) = -div(rho^{-1} force), solved by conjugate gradients
/// preconditioned with the inverse Laplacian (exact for constant rho).
struct PressureSolution {
  ScalarField P;
  VectorField acceleration;  // rho^{-1} (force - grad P), dealiased
  int iterations;
  double residual;  // final relative residual
};

PressureSolution solve_pressure(const ScalarField& rho, const VectorField& force, const ScalarField* guess = nullptr,
                                double tolerance = 1e-13, int max_iterations = 400);

/// Time derivatives of every field at one state, with the intermediate
/// quantities the diagnostics reuse.
struct Tendencies {
  ScalarField rho;
  VectorField u;
  VectorField d;
  ScalarField P;
  int pressure_iterations = 0;
  DirectorKinematics kin;
  VectorField tension;  // (d x Laplace d) x d
  TensorField grad_u;
  TensorField stress;
};

/// Throws BlowUpError on non-finite input and StabilityError when rho has
/// fallen below rho_floor / 2.
Tendencies evaluate_tendencies(const State& state, const SolverConfig& config, double rho_floor);

/// Second-order IMEX stepping: SBDF2 with the linear viscous and Laplace(d)
/// parts implicit, the rest extrapolated, and Heun for the density. The
/// first step is Richardson-extrapolated IMEX Euler.
class ImexStepper {
 public:
  /// viscosity_scale is the implicit coefficient multiplying Laplace u - eps Bilaplace u;
  /// 1 / min(rho0) keeps the explicit remainder non-stiff.
  ImexStepper(const SolverConfig& config, double viscosity_scale, double rho_floor);

  /// Advances state by dt; `now` must be evaluate_tendencies(state, ...).
  void step(State& state, const Tendencies& now);

  /// sup | |d| - 1 | before the last renormalisation.
  double last_unit_drift() const noexcept { return last_drift_; }
  /// max|u| dt / h of the last step.
  double last_cfl() const noexcept { return last_cfl_; }
  long cfl_warnings() const noexcept { return cfl_warnings_; }
  void reset() noexcept { history_.reset(); }

 private:
  struct History {
    VectorField u, d;  // previous level
    VectorField nu, nd;  // explicit remainders at the previous level
  };

  State euler(const State& s, const Tendencies& t, double h) const;

  SolverConfig config_;
  double nu0_;
  double rho_floor_;
  std::optional<History> history_;
  double last_drift_ = 0.0;
  double last_cfl_ = 0.0;
  long cfl_warnings_ = 0;
};

/// One step from a fresh history (the bootstrap step).
State imex_step(const State& state, const SolverConfig& config);

}  // namespace nemaflow
