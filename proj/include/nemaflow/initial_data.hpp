#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "nemaflow/field.hpp"
#include "nemaflow/vec3.hpp"

namespace nemaflow {

/// Localised smooth bump: a Gaussian of standard deviation `width` about
/// `center` (minimum-image distance on the torus), set to exactly zero where
/// it drops below 1e-15. Outside that ball the fields equal their far-field
/// values. A missing center means the box center.
struct BumpShape {
  std::optional<Vec3> center;
  double width = 1.0;
};

/// Radius beyond which a bump of the given width is identically zero.
double bump_cutoff_radius(double width);

/// Throws ResolutionError when the width is below two grid cells and
/// ConfigurationError when the bump does not fit in the box.
void check_bump(const Grid& grid, const BumpShape& shape);

/// Bump profile with values in [0, 1], 1 at the center.
ScalarField bump_profile(const Grid& grid, const BumpShape& shape);

/// Density = reference + (peak - reference) * bump. Both default to the
/// bounds (reference = lower, peak = upper) and must lie inside them.
struct DensityBump {
  BumpShape shape;
  std::optional<double> reference;
  std::optional<double> peak;
};

ScalarField gen_density(const Grid& grid, double rho_lower, double rho_upper, const DensityBump& bump);

enum class VelocityMode { taylor_green, random_bump };

struct VelocityRecipe {
  VelocityMode mode = VelocityMode::taylor_green;
  double amplitude = 1.0;  // peak speed for random_bump
  BumpShape shape;         // random_bump only
  std::uint64_t seed = 0;  // random_bump only
};

/// Divergence-free initial velocity. taylor_green gives
/// amplitude * (sin kx cos ky, -cos kx sin ky, 0) with k = 2 pi / L;
/// random_bump is the curl of a bump-localised random vector potential.
VectorField gen_velocity(const Grid& grid, const VelocityRecipe& recipe);

/// d0 = d_star rotated by angle * bump(x) about `axis`; at angle pi/2 and
/// axis perpendicular to d_star the center value is d_star x axis.
struct DirectorTilt {
  Vec3 axis{1.0, 0.0, 0.0};
  double angle = 0.0;
  BumpShape shape;
};

VectorField gen_director(const Grid& grid, const Vec3& d_star, const DirectorTilt& tilt);

struct InitialData {
  ScalarField rho0;
  VectorField u0;
  VectorField d0;
  Vec3 d_star;
  double rho_lower;
  double rho_upper;
};

/// Checks bounds, incompressibility and the unit constraint; throws on violation.
void validate(const InitialData& data);

/// Regularised data for the biharmonic system: velocity low-passed at length
/// scale eps^(1/4), density lifted by eps + delta, director unchanged.
struct MollifiedData {
  InitialData data;
  double delta;         // ||grad^2 w||_L2 with w = u_eps - u0
  double length_scale;  // eps^(1/4)
};

MollifiedData mollify_initial_data(const InitialData& data, double epsilon);

/// Distance used for delta: the H2 seminorm ||grad^2 w||_L2.
double mollification_distance(const VectorField& w);

/// Leray split of the initial force balance
/// F = Laplace u0 - div(sigma(d0)) = grad P0 + sqrt(rho0) g0, P0 with zero mean.
struct CompatibilityPair {
  ScalarField P0;
  VectorField g0;
  double g0_l2;
};

CompatibilityPair compute_compatibility(const InitialData& data);

/// || Laplace u0 - grad P0 - div sigma(d0) - sqrt(rho0) g0 ||_L2 / (1 + ||Laplace u0||_L2)
double compatibility_residual(const InitialData& data, const CompatibilityPair& pair);

// Random resolved fields: band-limited to integer frequencies |f_i| <= max_mode.

ScalarField random_trig_field(const Grid& grid, std::mt19937_64& rng, int max_mode, double amplitude = 1.0);
/// Divergence-free, scaled to peak speed `amplitude`.
VectorField random_solenoidal_field(const Grid& grid, std::mt19937_64& rng, int max_mode, double amplitude);
/// Exactly unit director built from two random band-limited angle fields.
VectorField random_unit_director(const Grid& grid, std::mt19937_64& rng, int max_mode, double amplitude);

}  // namespace nemaflow
