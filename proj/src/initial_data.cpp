#include "nemaflow/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nemaflow/director_terms.hpp"
#include "nemaflow/errors.hpp"
#include "nemaflow/norms.hpp"
#include "nemaflow/spectral.hpp"

namespace nemaflow {

namespace {

constexpr double kBumpFloor = 1e-15;

Vec3 center_of(const Grid& grid, const BumpShape& shape) {
  const double half = 0.5 * grid.box_length();
  return shape.center.value_or(Vec3{half, half, half});
}

double min_image(double dx, double length) { return dx - length * std::round(dx / length); }

}  // namespace

double bump_cutoff_radius(double width) { return width * std::sqrt(-2.0 * std::log(kBumpFloor)); }

void check_bump(const Grid& grid, const BumpShape& shape) {
  if (!(shape.width > 0.0)) throw ConfigurationError("bump width must be positive");
  if (shape.width < 2.0 * grid.spacing()) {
    std::ostringstream msg;
    msg << "bump width " << shape.width << " is below two grid cells (h = " << grid.spacing() << ")";
    throw ResolutionError(msg.str());
  }
  if (bump_cutoff_radius(shape.width) > 0.5 * grid.box_length()) {
    std::ostringstream msg;
    msg << "bump width " << shape.width << " does not fit in a box of length " << grid.box_length();
    throw ConfigurationError(msg.str());
  }
}

ScalarField bump_profile(const Grid& grid, const BumpShape& shape) {
  check_bump(grid, shape);
  const Vec3 c = center_of(grid, shape);
  const double length = grid.box_length();
  const double w2 = shape.width * shape.width;
  return ScalarField::from_function(grid, [&](double x, double y, double z) {
    const double dx = min_image(x - c[0], length);
    const double dy = min_image(y - c[1], length);
    const double dz = min_image(z - c[2], length);
    const double v = std::exp(-(dx * dx + dy * dy + dz * dz) / (2.0 * w2));
    return v < kBumpFloor ? 0.0 : v;
  });
}

ScalarField gen_density(const Grid& grid, double rho_lower, double rho_upper, const DensityBump& bump) {
  if (!(rho_lower > 0.0)) throw ConfigurationError("density lower bound must be positive (vacuum is not evolved)");
  if (!(rho_upper >= rho_lower)) throw ConfigurationError("density upper bound is below the lower bound");
  const double reference = bump.reference.value_or(rho_lower);
  const double peak = bump.peak.value_or(rho_upper);
  for (double v : {reference, peak}) {
    if (v < rho_lower || v > rho_upper) throw ConfigurationError("density reference/peak outside the bounds");
  }
  if (peak == reference) return ScalarField(grid, reference);
  ScalarField rho = bump_profile(grid, bump.shape);
  for (auto& v : rho.values()) v = std::clamp(reference + (peak - reference) * v, rho_lower, rho_upper);
  return rho;
}

VectorField gen_velocity(const Grid& grid, const VelocityRecipe& recipe) {
  if (!std::isfinite(recipe.amplitude)) throw ConfigurationError("velocity amplitude must be finite");
  if (recipe.amplitude == 0.0) return VectorField(grid);
  if (recipe.mode == VelocityMode::taylor_green) {
    const double k = grid.wavenumber_unit();
    const double a = recipe.amplitude;
    return VectorField::from_function(grid, [&](double x, double y, double) {
      return Vec3{a * std::sin(k * x) * std::cos(k * y), -a * std::cos(k * x) * std::sin(k * y), 0.0};
    });
  }
  const ScalarField bump = bump_profile(grid, recipe.shape);
  std::mt19937_64 rng(recipe.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorField potential(grid);
  for (int c = 0; c < 3; ++c) potential[c] = normal(rng) * bump;
  VectorField u = leray_project(curl(potential));
  const double peak = max_abs(u);
  if (peak > 0.0) u *= recipe.amplitude / peak;
  return u;
}

VectorField gen_director(const Grid& grid, const Vec3& d_star, const DirectorTilt& tilt) {
  if (std::abs(norm(d_star) - 1.0) > 1e-12) throw ConfigurationError("far-field director must be a unit vector");
  const double axis_len = norm(tilt.axis);
  if (!(axis_len > 0.0)) throw ConfigurationError("rotation axis must be nonzero");
  if (tilt.angle == 0.0) return VectorField(grid, d_star);
  const Vec3 a = (1.0 / axis_len) * tilt.axis;
  const Vec3 side = cross(d_star, a);
  const double along = dot(a, d_star);
  const ScalarField bump = bump_profile(grid, tilt.shape);
  VectorField d(grid);
  for (std::size_t p = 0; p < bump.size(); ++p) {
    const double angle = tilt.angle * bump[p];
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    d.set(p, c * d_star + s * side + (along * (1.0 - c)) * a);
  }
  return renormalize_director(d);
}

void validate(const InitialData& data) {
  const Grid& grid = data.rho0.grid();
  require_same_grid(grid, data.u0.grid());
  require_same_grid(grid, data.d0.grid());
  if (!(data.rho_lower > 0.0) || data.rho_upper < data.rho_lower) {
    throw ConfigurationError("density bounds must satisfy 0 < lower <= upper");
  }
  const double tol = 1e-12 * std::max(1.0, data.rho_upper);
  if (data.rho0.min() < data.rho_lower - tol || data.rho0.max() > data.rho_upper + tol) {
    throw ConfigurationError("initial density leaves its bounds");
  }
  const double kmax = grid.wavenumber_unit() * grid.n() / 2;
  const double div = max_abs(divergence(data.u0));
  if (div > 1e-11 * std::max(1.0, max_abs(data.u0) * kmax)) {
    throw ConfigurationError("initial velocity is not divergence-free");
  }
  if (unit_drift(data.d0) > 1e-12) throw ConstraintViolation("initial director is not unit length");
}

double mollification_distance(const VectorField& w) {
  return sobolev_seminorm(w, 2);
}

MollifiedData mollify_initial_data(const InitialData& data, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigurationError("mollification epsilon must lie in (0, 1)");
  const double scale = std::pow(epsilon, 0.25);
  VectorField u_eps = gaussian_filter(data.u0, scale);
  const double delta = mollification_distance(u_eps - data.u0);
  const double lift = epsilon + delta;
  ScalarField rho = data.rho0;
  rho += lift;
  InitialData out{std::move(rho), std::move(u_eps), data.d0, data.d_star, data.rho_lower + lift, data.rho_upper + lift};
  return {std::move(out), delta, scale};
}

CompatibilityPair compute_compatibility(const InitialData& data) {
  if (!(data.rho0.min() > 0.0)) throw UnsupportedInput("compatibility field needs a strictly positive density");
  VectorField force = laplacian(data.u0);
  force -= divergence(elastic_stress(data.d0));
  auto parts = helmholtz_decompose(force);
  VectorField g0 = std::move(parts.solenoidal);
  for (int c = 0; c < 3; ++c) {
    for (std::size_t p = 0; p < g0[c].size(); ++p) g0[c][p] /= std::sqrt(data.rho0[p]);
  }
  const double g0_l2 = lp_norm(g0, 2);
  return {std::move(parts.potential), std::move(g0), g0_l2};
}

double compatibility_residual(const InitialData& data, const CompatibilityPair& pair) {
  const VectorField lap = laplacian(data.u0);
  VectorField r = lap;
  r -= gradient(pair.P0);
  r -= divergence(elastic_stress(data.d0));
  for (int c = 0; c < 3; ++c) {
    for (std::size_t p = 0; p < r[c].size(); ++p) r[c][p] -= std::sqrt(data.rho0[p]) * pair.g0[c][p];
  }
  return lp_norm(r, 2) / (1.0 + lp_norm(lap, 2));
}

ScalarField random_trig_field(const Grid& grid, std::mt19937_64& rng, int max_mode, double amplitude) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Spectrum s(grid);
  const int n = grid.n();
  const int nh = grid.half_n();
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int kz = 0; kz < nh; ++kz, ++idx) {
        const int a = grid.frequency(i);
        const int b = grid.frequency(j);
        if (std::abs(a) > max_mode || std::abs(b) > max_mode || kz > max_mode || 2 * kz == n) continue;
        const double w = amplitude * static_cast<double>(grid.size()) / (1.0 + a * a + b * b + kz * kz);
        s[idx] = {w * normal(rng), w * normal(rng)};
      }
    }
  }
  return to_physical(s);
}

VectorField random_solenoidal_field(const Grid& grid, std::mt19937_64& rng, int max_mode, double amplitude) {
  VectorField v(random_trig_field(grid, rng, max_mode), random_trig_field(grid, rng, max_mode),
                random_trig_field(grid, rng, max_mode));
  v = leray_project(v);
  const double peak = max_abs(v);
  if (peak > 0.0) v *= amplitude / peak;
  return v;
}

VectorField random_unit_director(const Grid& grid, std::mt19937_64& rng, int max_mode, double amplitude) {
  ScalarField polar = random_trig_field(grid, rng, max_mode);
  ScalarField azimuth = random_trig_field(grid, rng, max_mode);
  polar *= amplitude / std::max(max_abs(polar), 1e-300);
  azimuth *= amplitude / std::max(max_abs(azimuth), 1e-300);
  VectorField d(grid);
  for (std::size_t p = 0; p < polar.size(); ++p) {
    const double th = 0.5 * std::numbers::pi + polar[p];
    d.set(p, Vec3{std::sin(th) * std::cos(azimuth[p]), std::sin(th) * std::sin(azimuth[p]), std::cos(th)});
  }
  return renormalize_director(d);
}

}  // namespace nemaflow
