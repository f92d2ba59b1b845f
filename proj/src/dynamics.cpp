#include "nemaflow/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "nemaflow/director_terms.hpp"
#include "nemaflow/errors.hpp"
#include "nemaflow/norms.hpp"
#include "nemaflow/spectral.hpp"

namespace nemaflow {

namespace {

// Laplace u - eps Bilaplace u in one spectral pass.
VectorField viscous_term(const VectorField& u, double epsilon) {
  VectorField out(u.grid());
  for (int c = 0; c < 3; ++c) {
    Spectrum s = to_spectral(u[c]);
    apply_symbol(s, [epsilon](double kx, double ky, double kz) {
      const double k2 = kx * kx + ky * ky + kz * kz;
      return -k2 - epsilon * k2 * k2;
    });
    out[c] = to_physical(s);
  }
  return out;
}

// rho (u . grad) u from a precomputed Jacobian, dealiased.
VectorField inertia(const ScalarField& rho, const VectorField& u, const TensorField& grad_u) {
  VectorField out(u.grid());
  for (int i = 0; i < 3; ++i) {
    auto& o = out[i];
    for (std::size_t p = 0; p < o.size(); ++p) {
      o[p] = rho[p] * (u[0][p] * grad_u(i, 0)[p] + u[1][p] * grad_u(i, 1)[p] + u[2][p] * grad_u(i, 2)[p]);
    }
  }
  return dealias(out);
}

void check_density(const ScalarField& rho, double rho_floor) {
  const double low = rho.min();
  if (!(low > 0.0) || low < 0.5 * rho_floor) {
    std::ostringstream msg;
    msg << "density fell to " << low << " (lower bound " << rho_floor << ")";
    throw StabilityError(msg.str());
  }
}

// Applies 1 / (1 + coef (|k|^2 + eps |k|^4)) to every component.
VectorField implicit_solve(const VectorField& rhs, double coef, double epsilon) {
  VectorField out(rhs.grid());
  for (int c = 0; c < 3; ++c) {
    Spectrum s = to_spectral(rhs[c]);
    apply_symbol(s, [&](double kx, double ky, double kz) {
      const double k2 = kx * kx + ky * ky + kz * kz;
      return 1.0 / (1.0 + coef * (k2 + epsilon * k2 * k2));
    });
    out[c] = to_physical(s);
  }
  return out;
}

// Euclidean inner product of the physical fields, from the half spectrum.
double spectral_dot(const Spectrum& a, const Spectrum& b) {
  const int nh = a.grid().half_n();
  const int nyquist = a.grid().n() / 2;
  double sum = 0.0;
  for (std::size_t idx = 0; idx < a.size(); ++idx) {
    const int kz = static_cast<int>(idx % nh);
    const double w = (kz == 0 || kz == nyquist) ? 1.0 : 2.0;
    sum += w * (a[idx].real() * b[idx].real() + a[idx].imag() * b[idx].imag());
  }
  return sum / static_cast<double>(a.grid().size());
}

// -div(w grad p), spectrum to spectrum.
Spectrum weighted_laplacian(const ScalarField& w, const Spectrum& p) {
  Spectrum out(p.grid());
  for (int axis = 0; axis < 3; ++axis) {
    ScalarField flux = to_physical(spectral_derivative(p, axis));
    flux *= w;
    const Spectrum d = spectral_derivative(to_spectral(flux), axis);
    for (std::size_t idx = 0; idx < out.size(); ++idx) out[idx] -= d[idx];
  }
  return out;
}

// Inverse of -Laplace on the range of the derivative operators.
Spectrum precondition(const Spectrum& r) {
  Spectrum z(r.grid());
  for_each_derivative_mode(r.grid(), [&](std::size_t idx, double kx, double ky, double kz) {
    const double k2 = kx * kx + ky * ky + kz * kz;
    z[idx] = k2 > 0.0 ? r[idx] / k2 : 0.0;
  });
  return z;
}

void axpy(Spectrum& y, double a, const Spectrum& x) {
  for (std::size_t idx = 0; idx < y.size(); ++idx) y[idx] += a * x[idx];
}

bool finite_state(const State& s) { return s.rho.all_finite() && s.u.all_finite() && s.d.all_finite(); }

}  // namespace

void validate(const SolverConfig& c) {
  if (!(c.dt > 0.0)) throw ConfigurationError("dt must be positive");
  if (!(c.t_end > 0.0)) throw ConfigurationError("t_end must be positive");
  if (!(c.epsilon >= 0.0 && c.epsilon < 1.0)) throw ConfigurationError("epsilon must lie in [0, 1)");
  if (c.renormalize_every < 1) throw ConfigurationError("renormalize_every must be at least 1");
  if (!(c.rho_tolerance >= 0.0)) throw ConfigurationError("rho_tolerance must be non-negative");
}

State make_state(const InitialData& data) {
  const Grid& g = data.rho0.grid();
  return {0.0, 0, data.rho0, data.u0, data.d0, ScalarField(g)};
}

ScalarField density_rhs(const State& state) {
  ScalarField out = dealias(directional_derivative(state.u, state.rho));
  out *= -1.0;
  return out;
}

VectorField momentum_rhs(const State& state, double epsilon, double rho_floor) {
  check_density(state.rho, rho_floor);
  VectorField f = viscous_term(state.u, epsilon);
  f -= inertia(state.rho, state.u, jacobian(state.u));
  const DirectorKinematics kin = director_kinematics(state.d);
  f -= divergence(elastic_stress(kin, s_field(kin).value));
  return f;
}

PressureSolution solve_pressure(const ScalarField& rho, const VectorField& force, const ScalarField* guess,
                                double tolerance, int max_iterations) {
  const Grid& g = rho.grid();
  ScalarField inv_rho(g);
  for (std::size_t p = 0; p < rho.size(); ++p) inv_rho[p] = 1.0 / rho[p];

  // b = -div(rho^{-1} force)
  Spectrum b(g);
  for (int axis = 0; axis < 3; ++axis) {
    ScalarField f = force[axis];
    f *= inv_rho;
    axpy(b, -1.0, spectral_derivative(to_spectral(f), axis));
  }
  const double bb = spectral_dot(b, b);

  Spectrum x = guess ? to_spectral(*guess) : Spectrum(g);
  x[0] = 0.0;
  int iterations = 0;
  double rel = 0.0;
  if (bb > 0.0) {
    Spectrum r = b;
    axpy(r, -1.0, weighted_laplacian(inv_rho, x));
    Spectrum z = precondition(r);
    Spectrum p = z;
    double rz = spectral_dot(r, z);
    rel = std::sqrt(spectral_dot(r, r) / bb);
    while (rel > tolerance && iterations < max_iterations) {
      const Spectrum ap = weighted_laplacian(inv_rho, p);
      const double pap = spectral_dot(p, ap);
      if (!(pap > 0.0)) break;
      const double alpha = rz / pap;
      axpy(x, alpha, p);
      axpy(r, -alpha, ap);
      ++iterations;
      rel = std::sqrt(spectral_dot(r, r) / bb);
      z = precondition(r);
      const double rz_next = spectral_dot(r, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      p *= beta;
      p += z;
    }
    // roundoff can stall just above a very tight tolerance
    if (rel > std::max(tolerance, 1e-9)) {
      std::ostringstream msg;
      msg << "pressure solve stalled at relative residual " << rel << " after " << iterations << " iterations";
      throw StabilityError(msg.str());
    }
  } else {
    x = Spectrum(g);
  }

  VectorField acc = force;
  for (int axis = 0; axis < 3; ++axis) {
    acc[axis] -= to_physical(spectral_derivative(x, axis));
    acc[axis] *= inv_rho;
  }
  return {to_physical(x), dealias(acc), iterations, rel};
}

Tendencies evaluate_tendencies(const State& state, const SolverConfig& config, double rho_floor) {
  if (!finite_state(state)) throw BlowUpError(state.step, "non-finite field values");
  const Grid& g = state.rho.grid();
  DirectorKinematics kin = director_kinematics(state.d);
  VectorField tension = s_field(kin).value;
  TensorField grad_u = jacobian(state.u);
  TensorField stress = elastic_stress(kin, tension);

  Tendencies t{ScalarField(g), VectorField(g), VectorField(g), state.P, 0, std::move(kin), std::move(tension),
               std::move(grad_u), std::move(stress)};
  if (config.decouple != DecoupleMode::fluid_only) t.d = director_rhs(state.u, t.grad_u, t.kin, t.tension);
  if (config.decouple != DecoupleMode::director_only) {
    check_density(state.rho, rho_floor);
    VectorField force = viscous_term(state.u, config.epsilon);
    force -= inertia(state.rho, state.u, t.grad_u);
    if (config.decouple == DecoupleMode::full) force -= divergence(t.stress);
    PressureSolution ps = solve_pressure(state.rho, force, &state.P, config.pressure_tolerance,
                                         config.pressure_max_iterations);
    t.u = std::move(ps.acceleration);
    t.P = std::move(ps.P);
    t.pressure_iterations = ps.iterations;
    t.rho = density_rhs(state);
  }
  return t;
}

ImexStepper::ImexStepper(const SolverConfig& config, double viscosity_scale, double rho_floor)
    : config_(config), nu0_(viscosity_scale), rho_floor_(rho_floor) {
  validate(config_);
  if (!(nu0_ > 0.0)) throw ConfigurationError("viscosity scale must be positive");
}

State ImexStepper::euler(const State& s, const Tendencies& t, double h) const {
  State out = s;
  if (config_.decouple != DecoupleMode::director_only) {
    VectorField rhs = s.u;
    rhs.add_scaled(h, t.u);
    rhs.add_scaled(-h * nu0_, viscous_term(s.u, config_.epsilon));
    out.u = implicit_solve(rhs, h * nu0_, config_.epsilon);
    out.rho.add_scaled(h, t.rho);
  }
  if (config_.decouple != DecoupleMode::fluid_only) {
    VectorField rhs = s.d;
    rhs.add_scaled(h, t.d);
    rhs.add_scaled(-h, laplacian(s.d));
    out.d = implicit_solve(rhs, h, 0.0);
  }
  out.P = t.P;
  return out;
}

void ImexStepper::step(State& state, const Tendencies& now) {
  const double dt = config_.dt;
  const bool move_fluid = config_.decouple != DecoupleMode::director_only;
  const bool move_director = config_.decouple != DecoupleMode::fluid_only;

  // explicit remainders at the current level
  VectorField nu = now.u;
  if (move_fluid) nu.add_scaled(-nu0_, viscous_term(state.u, config_.epsilon));
  VectorField nd = now.d;
  if (move_director) nd -= laplacian(state.d);

  State next = state;
  if (!history_) {
    const State half = euler(state, now, 0.5 * dt);
    State two = euler(half, evaluate_tendencies(half, config_, rho_floor_), 0.5 * dt);
    const State full = euler(state, now, dt);
    next = two;
    next.u *= 2.0;
    next.u -= full.u;
    next.d *= 2.0;
    next.d -= full.d;
    next.rho *= 2.0;
    next.rho -= full.rho;
  } else {
    const History& h = *history_;
    const double c = 2.0 * dt / 3.0;
    if (move_fluid) {
      VectorField rhs = (4.0 / 3.0) * state.u;
      rhs.add_scaled(-1.0 / 3.0, h.u);
      rhs.add_scaled(2.0 * c, nu);
      rhs.add_scaled(-c, h.nu);
      next.u = implicit_solve(rhs, c * nu0_, config_.epsilon);
    }
    if (move_director) {
      VectorField rhs = (4.0 / 3.0) * state.d;
      rhs.add_scaled(-1.0 / 3.0, h.d);
      rhs.add_scaled(2.0 * c, nd);
      rhs.add_scaled(-c, h.nd);
      next.d = implicit_solve(rhs, c, 0.0);
    }
    if (move_fluid) {
      // Heun with the new velocity
      ScalarField predictor = state.rho;
      predictor.add_scaled(dt, now.rho);
      State mid = next;
      mid.rho = predictor;
      next.rho = state.rho;
      next.rho.add_scaled(0.5 * dt, now.rho);
      next.rho.add_scaled(0.5 * dt, density_rhs(mid));
    }
  }
  history_ = History{state.u, state.d, std::move(nu), std::move(nd)};

  next.t = state.t + dt;
  next.step = state.step + 1;
  next.P = now.P;
  if (!finite_state(next)) throw BlowUpError(next.step, "non-finite field values");
  if (move_fluid) next.u = leray_project(next.u);
  last_drift_ = unit_drift(next.d);
  if (move_director && next.step % config_.renormalize_every == 0) next.d = renormalize_director(next.d, next.step);
  last_cfl_ = max_abs(next.u) * dt / next.u.grid().spacing();
  if (last_cfl_ > 0.5) ++cfl_warnings_;
  state = std::move(next);
}

State imex_step(const State& state, const SolverConfig& config) {
  const double floor = state.rho.min();
  ImexStepper stepper(config, 1.0 / floor, floor);
  State out = state;
  stepper.step(out, evaluate_tendencies(state, config, floor));
  return out;
}

}  // namespace nemaflow
