#include "nemaflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nemaflow/director_terms.hpp"
#include "nemaflow/errors.hpp"
#include "nemaflow/norms.hpp"
#include "nemaflow/spectral.hpp"

namespace nemaflow {

namespace {

template <std::size_t N>
std::size_t index_of(const std::array<std::string_view, N>& names, std::string_view name) {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw UsageError("unknown diagnostic '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - names.begin());
}

double ratio(double raw, double scale) { return raw == 0.0 ? 0.0 : raw / scale; }

}  // namespace

double IdentityResiduals::get(std::string_view name, bool rel) const {
  const std::size_t i = index_of(kResidualNames, name);
  return rel ? relative[i] : raw[i];
}

double DiagnosticsRecord::norm(std::string_view name) const { return norms[index_of(kNormNames, name)]; }

double weighted_l2(const ScalarField& rho, const VectorField& v) {
  ScalarField w = dot(v, v);
  w *= rho;
  return std::sqrt(std::max(0.0, integral(w)));
}

EnergyDissipation energy_and_dissipation(const State& s, double epsilon, const VectorField& tension) {
  const double kinetic = weighted_l2(s.rho, s.u);
  const double elastic = sobolev_seminorm(s.d, 1);
  const double grad_u = sobolev_seminorm(s.u, 1);
  const double lap_u = sobolev_seminorm(s.u, 2);
  const double h = lp_norm(tension, 2);
  return {0.5 * (kinetic * kinetic + elastic * elastic), grad_u * grad_u + epsilon * lap_u * lap_u + h * h};
}

EnergyDissipation energy_and_dissipation(const State& s, double epsilon) {
  return energy_and_dissipation(s, epsilon, s_field(director_kinematics(s.d)).value);
}

CouplingResidual coupling_cancellation(const VectorField& u, const DirectorKinematics& kin, const VectorField& h,
                                       const TensorField& grad_u, const TensorField& sigma) {
  const VectorField& d = kin.d;
  // (u.grad)d - [(d.grad)u - (d^T A d) d], the last bracket in cross form
  VectorField transport(d.grid());
  for (int k = 0; k < 3; ++k) {
    for (std::size_t p = 0; p < d[k].size(); ++p) {
      transport[k][p] = u[0][p] * kin.grad(k, 0)[p] + u[1][p] * kin.grad(k, 1)[p] + u[2][p] * kin.grad(k, 2)[p];
    }
  }
  transport -= q_field(grad_u, d).value;
  const double raw = std::abs(inner_product(sigma, grad_u) + inner_product(transport, h));
  const double scale = (lp_norm(grad_u, 2) + 1.0) * std::pow(lp_norm(kin.laplace, 2) + 1.0, 2);
  return {raw, scale};
}

CouplingResidual coupling_cancellation(const VectorField& u, const VectorField& d) {
  const DirectorKinematics kin = director_kinematics(d);
  const VectorField h = s_field(kin).value;
  return coupling_cancellation(u, kin, h, jacobian(u), elastic_stress(kin, h));
}

IdentityResiduals identity_residuals(const VectorField& u, const DirectorKinematics& kin, const VectorField& tension,
                                     const TensorField& grad_u, const TensorField& sigma) {
  const VectorField& d = kin.d;
  const Grid& g = d.grid();
  IdentityResiduals r;

  {
    VectorField expanded = kin.laplace;
    for (int c = 0; c < 3; ++c) {
      for (std::size_t p = 0; p < g.size(); ++p) expanded[c][p] += kin.grad_sq[p] * d[c][p];
    }
    r.raw[0] = lp_norm(tension - expanded, 2);
  }
  r.relative[0] = ratio(r.raw[0], lp_norm(kin.laplace, 2));

  const auto q = q_field(grad_u, d);
  VectorField stretch(g);  // (d . grad) u
  for (int i = 0; i < 3; ++i) {
    for (std::size_t p = 0; p < g.size(); ++p) {
      stretch[i][p] = d[0][p] * grad_u(i, 0)[p] + d[1][p] * grad_u(i, 1)[p] + d[2][p] * grad_u(i, 2)[p];
    }
  }
  r.raw[1] = q.residual;
  r.relative[1] = ratio(q.residual, lp_norm(stretch, 2));

  ScalarField ddl = dot(d, kin.laplace);
  ddl += kin.grad_sq;
  r.raw[2] = lp_norm(ddl, 2);
  r.relative[2] = ratio(r.raw[2], lp_norm(kin.grad_sq, 2));

  // div(grad d (.) grad d) - grad(|grad d|^2 / 2) - (grad d)^T Laplace d
  TensorField odot(g);
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      auto& m = odot(i, j);
      for (std::size_t p = 0; p < m.size(); ++p) {
        m[p] = kin.grad(0, i)[p] * kin.grad(0, j)[p] + kin.grad(1, i)[p] * kin.grad(1, j)[p] +
               kin.grad(2, i)[p] * kin.grad(2, j)[p];
      }
      if (j != i) odot(j, i) = m;
    }
  }
  const VectorField lhs = divergence(odot);
  VectorField diff = lhs;
  diff.add_scaled(-0.5, gradient(kin.grad_sq));
  for (int i = 0; i < 3; ++i) {
    for (std::size_t p = 0; p < diff[i].size(); ++p) {
      diff[i][p] -= kin.grad(0, i)[p] * kin.laplace[0][p] + kin.grad(1, i)[p] * kin.laplace[1][p] +
                    kin.grad(2, i)[p] * kin.laplace[2][p];
    }
  }
  r.raw[3] = lp_norm(diff, 2);
  r.relative[3] = ratio(r.raw[3], lp_norm(lhs, 2));

  const CouplingResidual c = coupling_cancellation(u, kin, tension, grad_u, sigma);
  r.raw[4] = c.raw;
  r.relative[4] = ratio(c.raw, c.scale);
  return r;
}

IdentityResiduals identity_residuals_unchecked(const VectorField& u, const VectorField& d) {
  const DirectorKinematics kin = director_kinematics(d);
  const VectorField h = s_field(kin).value;
  return identity_residuals(u, kin, h, jacobian(u), elastic_stress(kin, h));
}

IdentityResiduals identity_residuals(const VectorField& u, const VectorField& d) {
  require_unit_director(d);
  return identity_residuals_unchecked(u, d);
}

TimeDerivatives time_derivative_fields(const State& state, const SolverConfig& config, double rho_floor) {
  Tendencies t = evaluate_tendencies(state, config, rho_floor);
  return {std::move(t.rho), std::move(t.u), std::move(t.d)};
}

VectorField velocity_rate_from_compatibility(const InitialData& data, const CompatibilityPair& pair) {
  const Grid& g = data.rho0.grid();
  VectorField force = gradient(pair.P0);
  for (int c = 0; c < 3; ++c) {
    for (std::size_t p = 0; p < g.size(); ++p) force[c][p] += std::sqrt(data.rho0[p]) * pair.g0[c][p];
  }
  VectorField inertia = directional_derivative(data.u0, data.u0);
  for (int c = 0; c < 3; ++c) inertia[c] *= data.rho0;
  force -= dealias(inertia);
  return solve_pressure(data.rho0, force).acceleration;
}

DiagnosticsRecord compute_record(const State& s, const Tendencies& rates, double epsilon, double drift) {
  DiagnosticsRecord r;
  r.t = s.t;
  r.step = s.step;
  const auto nu = sobolev_seminorms(s.u, {1, 2, 3});
  const auto nd = sobolev_seminorms(s.d, {1, 2, 3, 4});
  const auto ndd = sobolev_seminorms(rates.d, {1, 2});
  const auto ndu = sobolev_seminorms(rates.u, {1, 2});
  const double kinetic = weighted_l2(s.rho, s.u);
  const double h = lp_norm(rates.tension, 2);
  r.energy = 0.5 * (kinetic * kinetic + nd[0] * nd[0]);
  r.dissipation = nu[0] * nu[0] + epsilon * nu[1] * nu[1] + h * h;
  r.norms = {nu[0],
             nu[1],
             nu[2],
             nd[1],
             nd[2],
             nd[3],
             lp_norm(gradient(s.rho), 3.0),
             lp_norm(rates.rho, 3.0),
             weighted_l2(s.rho, rates.u),
             ndd[0],
             ndd[1],
             ndu[0],
             ndu[1]};
  r.residuals = identity_residuals(s.u, rates.kin, rates.tension, rates.grad_u, rates.stress);
  auto sq = [&](std::string_view name) { return std::pow(r.norm(name), 2); };
  r.f_instant = sq("grad_u") + epsilon * sq("grad2_u") + sq("sqrt_rho_dt_u") + sq("lap_d") + sq("grad_dt_d");
  r.f_integrand =
      sq("sqrt_rho_dt_u") + sq("grad_dt_u") + epsilon * sq("lap_dt_u") + sq("grad_lap_d") + sq("lap_dt_d");
  r.f_eps = r.f_instant;
  r.unit_drift = drift;
  r.pressure_iterations = rates.pressure_iterations;
  return r;
}

std::vector<double> f_eps_functional(const std::vector<DiagnosticsRecord>& records) {
  if (records.empty()) throw UsageError("f_eps needs at least one record");
  std::vector<double> f(records.size());
  double integral = 0.0;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    if (!std::isfinite(r.f_instant) || !std::isfinite(r.f_integrand)) {
      throw UsageError("record is missing its f_eps ingredients");
    }
    if (k > 0) {
      integral += 0.5 * (records[k].t - records[k - 1].t) * (records[k - 1].f_integrand + r.f_integrand);
    }
    f[k] = r.f_instant + 0.5 * integral;
  }
  return f;
}

void fill_f_eps(std::vector<DiagnosticsRecord>& records) {
  const auto f = f_eps_functional(records);
  for (std::size_t k = 0; k < records.size(); ++k) records[k].f_eps = f[k];
}

std::vector<BalanceResidual> energy_balance_residual(const std::vector<DiagnosticsRecord>& records) {
  const std::size_t m = records.size();
  if (m < 3) throw UsageError("energy balance needs at least three consecutive records");
  const double dt = records[1].t - records[0].t;
  if (!(dt > 0.0)) throw UsageError("records must be ordered in time");
  for (std::size_t k = 1; k < m; ++k) {
    if (std::abs(records[k].t - records[k - 1].t - dt) > 1e-9 * dt + 1e-14 * std::abs(records[k].t)) {
      throw UsageError("energy balance needs uniformly spaced records");
    }
  }
  std::vector<BalanceResidual> out(m);
  for (std::size_t k = 0; k < m; ++k) {
    double dedt;
    if (k == 0) {
      dedt = (-3.0 * records[0].energy + 4.0 * records[1].energy - records[2].energy) / (2.0 * dt);
    } else if (k == m - 1) {
      dedt = (3.0 * records[k].energy - 4.0 * records[k - 1].energy + records[k - 2].energy) / (2.0 * dt);
    } else {
      dedt = (records[k + 1].energy - records[k - 1].energy) / (2.0 * dt);
    }
    const double raw = dedt + records[k].dissipation;
    out[k] = {records[k].t, raw, std::abs(raw) / (records[k].dissipation + 1.0)};
  }
  return out;
}

double gronwall_quantity(const State& a, const State& b) {
  require_same_grid(a.rho.grid(), b.rho.grid());
  const double du = weighted_l2(a.rho, a.u - b.u);
  const double dd = sobolev_seminorm(a.d - b.d, 1);
  const double dr = lp_norm(a.rho - b.rho, 1.5);
  return du * du + dd * dd + dr * dr;
}

}  // namespace nemaflow
