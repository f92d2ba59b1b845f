#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "nemaflow/dynamics.hpp"
#include "nemaflow/field.hpp"
#include "nemaflow/initial_data.hpp"

namespace nemaflow {

struct EnergyDissipation {
  double energy;       // 1/2 int (rho |u|^2 + |grad d|^2)
  double dissipation;  // int (|grad u|^2 + eps |Laplace u|^2 + |Laplace d + |grad d|^2 d|^2)
};

EnergyDissipation energy_and_dissipation(const State& state, double epsilon);
/// Same, reusing the tension (d x Laplace d) x d.
EnergyDissipation energy_and_dissipation(const State& state, double epsilon, const VectorField& tension);

/// Named Sobolev-type norms, in CSV column order.
inline constexpr std::array<std::string_view, 13> kNormNames{
    "grad_u",      "grad2_u",     "grad3_u",       "lap_d",     "grad_lap_d", "bilap_d",  "grad_rho_L3",
    "dt_rho_L3",   "sqrt_rho_dt_u", "grad_dt_d",   "lap_dt_d",  "grad_dt_u",  "lap_dt_u"};

/// Identity residuals, in CSV column order.
inline constexpr std::array<std::string_view, 5> kResidualNames{"nl1", "nl2", "d_dot_lapd", "div_odot",
                                                                "coupling_cancel"};

struct IdentityResiduals {
  std::array<double, 5> raw{};       // L2 norms (coupling_cancel: absolute integral)
  std::array<double, 5> relative{};  // raw / leading norm, 0 when raw is 0
  double get(std::string_view name, bool rel = true) const;
};

/// Throws ConstraintViolation when | |d| - 1 | > 1e-6.
IdentityResiduals identity_residuals(const VectorField& u, const VectorField& d);
/// No constraint check: used to show the residuals react to non-unit d.
IdentityResiduals identity_residuals_unchecked(const VectorField& u, const VectorField& d);
/// From precomputed pieces: grad_u(i, j) = d_j u_i, sigma = elastic_stress(kin, tension).
IdentityResiduals identity_residuals(const VectorField& u, const DirectorKinematics& kin, const VectorField& tension,
                                     const TensorField& grad_u, const TensorField& sigma);

/// Scalar cancellation residual
/// | int sigma : grad u + int [(u.grad)d - (d.grad)u + (d^T A d) d] . h |
/// and its normalisation (||grad u|| + 1)(||Laplace d|| + 1)^2.
struct CouplingResidual {
  double raw;
  double scale;
  double relative() const { return raw / scale; }
};

CouplingResidual coupling_cancellation(const VectorField& u, const VectorField& d);
CouplingResidual coupling_cancellation(const VectorField& u, const DirectorKinematics& kin, const VectorField& tension,
                                       const TensorField& grad_u, const TensorField& sigma);

/// PDE-defined time derivatives (rho_t, u_t, d_t) at a state.
struct TimeDerivatives {
  ScalarField rho;
  VectorField u;
  VectorField d;
};

TimeDerivatives time_derivative_fields(const State& state, const SolverConfig& config, double rho_floor);

/// u_t at t = 0 rebuilt from the compatibility pair:
/// [sqrt(rho0) g0 + grad P0 - grad P - rho0 (u0.grad)u0] / rho0, with P the
/// pressure that makes the result divergence-free. Valid for epsilon = 0.
VectorField velocity_rate_from_compatibility(const InitialData& data, const CompatibilityPair& pair);

/// sqrt(int rho |v|^2).
double weighted_l2(const ScalarField& rho, const VectorField& v);

struct DiagnosticsRecord {
  double t = 0.0;
  long step = 0;
  double energy = 0.0;
  double dissipation = 0.0;
  std::array<double, 13> norms{};
  IdentityResiduals residuals;
  double f_instant = 0.0;    // ||grad u||^2 + eps ||Lu||^2 + ||sqrt(rho) u_t||^2 + ||Ld||^2 + ||grad d_t||^2
  double f_integrand = 0.0;  // ||sqrt(rho) u_t||^2 + ||grad u_t||^2 + eps ||L u_t||^2 + ||grad Ld||^2 + ||L d_t||^2
  double f_eps = 0.0;
  double unit_drift = 0.0;
  int pressure_iterations = 0;

  double norm(std::string_view name) const;
};

/// Record of one state from its tendencies; f_eps is filled by f_eps_functional.
DiagnosticsRecord compute_record(const State& state, const Tendencies& rates, double epsilon, double unit_drift = 0.0);

/// f(t) = f_instant(t) + 1/2 int_0^t f_integrand ds (trapezoid). Throws UsageError on an empty series.
std::vector<double> f_eps_functional(const std::vector<DiagnosticsRecord>& records);
/// Writes f_eps_functional into the records.
void fill_f_eps(std::vector<DiagnosticsRecord>& records);

struct BalanceResidual {
  double t;
  double raw;       // dE/dt + D
  double relative;  // |raw| / (D + 1)
};

/// Centered differences inside, one-sided second order at the ends. Needs
/// at least three records with uniform spacing; throws UsageError otherwise.
std::vector<BalanceResidual> energy_balance_residual(const std::vector<DiagnosticsRecord>& records);

/// ||sqrt(rho_a)(u_a - u_b)||^2 + ||grad(d_a - d_b)||^2 + ||rho_a - rho_b||^2_{L^{3/2}}.
double gronwall_quantity(const State& a, const State& b);

}  // namespace nemaflow
