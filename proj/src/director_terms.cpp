#include "nemaflow/director_terms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nemaflow/errors.hpp"
#include "nemaflow/vec3.hpp"
#include "nemaflow/norms.hpp"
#include "nemaflow/spectral.hpp"

namespace nemaflow {

double unit_drift(const VectorField& d) {
  double worst = 0.0;
  for (std::size_t i = 0; i < d[0].size(); ++i) {
    const double m = std::sqrt(d[0][i] * d[0][i] + d[1][i] * d[1][i] + d[2][i] * d[2][i]);
    worst = std::max(worst, std::abs(m - 1.0));
  }
  return worst;
}

void require_unit_director(const VectorField& d, double tol) {
  const double drift = unit_drift(d);
  if (!(drift <= tol)) {
    std::ostringstream msg;
    msg << "director is not unit length: sup||d|-1| = " << drift << " exceeds " << tol;
    throw ConstraintViolation(msg.str());
  }
}

DirectorKinematics director_kinematics(const VectorField& d) {
  const Grid& grid = d.grid();
  DirectorKinematics kin{d, TensorField(grid), VectorField(grid), ScalarField(grid)};
  for (int k = 0; k < 3; ++k) {
    const Spectrum s = to_spectral(d[k]);
    for (int i = 0; i < 3; ++i) kin.grad(k, i) = to_physical(spectral_derivative(s, i));
    Spectrum lap = s;
    apply_symbol(lap, [](double kx, double ky, double kz) { return -(kx * kx + ky * ky + kz * kz); });
    kin.laplace[k] = to_physical(lap);
  }
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < 3; ++i) {
      const auto& g = kin.grad(k, i);
      for (std::size_t p = 0; p < g.size(); ++p) kin.grad_sq[p] += g[p] * g[p];
    }
  }
  return kin;
}

CrossProductForms s_field(const DirectorKinematics& kin) {
  const VectorField& d = kin.d;
  const Grid& grid = d.grid();
  CrossProductForms out{VectorField(grid), VectorField(grid), 0.0};
  for (std::size_t p = 0; p < d[0].size(); ++p) {
    const Vec3 dv = d.at(p);
    const Vec3 lap = kin.laplace.at(p);
    out.value.set(p, cross(cross(dv, lap), dv));
    out.expanded.set(p, lap + kin.grad_sq[p] * dv);
  }
  out.residual = lp_norm(out.value - out.expanded, 2);
  return out;
}

CrossProductForms s_field(const VectorField& d) {
  require_unit_director(d);
  return s_field(director_kinematics(d));
}

CrossProductForms q_field(const TensorField& grad_u, const VectorField& d) {
  const Grid& grid = d.grid();
  CrossProductForms out{VectorField(grid), VectorField(grid), 0.0};
  for (std::size_t p = 0; p < d[0].size(); ++p) {
    const Vec3 dv = d.at(p);
    Vec3 stretch{};  // (d . grad) u
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) stretch[i] += dv[j] * grad_u(i, j)[p];
    }
    // d^T A d with A = (grad u + grad u^T) / 2
    double dad = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) dad += dv[i] * 0.5 * (grad_u(i, j)[p] + grad_u(j, i)[p]) * dv[j];
    }
    out.value.set(p, cross(cross(dv, stretch), dv));
    out.expanded.set(p, stretch - dad * dv);
  }
  out.residual = lp_norm(out.value - out.expanded, 2);
  return out;
}

CrossProductForms q_field(const VectorField& u, const VectorField& d) {
  require_unit_director(d);
  return q_field(jacobian(u), d);
}

TensorField elastic_stress(const DirectorKinematics& kin, const VectorField& tension) {
  const Grid& grid = kin.d.grid();
  TensorField sigma(grid);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      auto& s = sigma(i, j);
      for (std::size_t p = 0; p < s.size(); ++p) {
        double v = tension[i][p] * kin.d[j][p];
        for (int k = 0; k < 3; ++k) v += kin.grad(k, i)[p] * kin.grad(k, j)[p];
        s[p] = v;
      }
    }
  }
  return dealias(sigma);
}

TensorField elastic_stress(const VectorField& d) {
  require_unit_director(d);
  const DirectorKinematics kin = director_kinematics(d);
  return elastic_stress(kin, s_field(kin).value);
}

VectorField director_rhs(const VectorField& u, const TensorField& grad_u, const DirectorKinematics& kin,
                         const VectorField& tension) {
  VectorField rhs = tension;
  rhs += q_field(grad_u, kin.d).value;
  for (int k = 0; k < 3; ++k) {
    auto& r = rhs[k];
    for (std::size_t p = 0; p < r.size(); ++p) {
      r[p] -= u[0][p] * kin.grad(k, 0)[p] + u[1][p] * kin.grad(k, 1)[p] + u[2][p] * kin.grad(k, 2)[p];
    }
  }
  return dealias(rhs);
}

VectorField director_rhs(const VectorField& u, const VectorField& d) {
  require_unit_director(d);
  require_same_grid(u.grid(), d.grid());
  const DirectorKinematics kin = director_kinematics(d);
  return director_rhs(u, jacobian(u), kin, s_field(kin).value);
}

VectorField renormalize_director(const VectorField& d, long step) {
  VectorField out = d;
  for (std::size_t p = 0; p < d[0].size(); ++p) {
    const double m = std::sqrt(d[0][p] * d[0][p] + d[1][p] * d[1][p] + d[2][p] * d[2][p]);
    if (!(m >= 0.5)) throw BlowUpError(step, "director magnitude fell below 1/2");
    for (int c = 0; c < 3; ++c) out[c][p] = d[c][p] / m;
  }
  return out;
}

}  // namespace nemaflow
