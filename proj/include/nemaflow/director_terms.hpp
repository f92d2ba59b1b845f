#pragma once

#include "nemaflow/field.hpp"

namespace nemaflow {

/// Tolerance on | |d| - 1 | accepted by the director-dependent operators.
inline constexpr double kUnitTolerance = 1e-6;

/// sup over the grid of | |d| - 1 |.
double unit_drift(const VectorField& d);

/// Throws ConstraintViolation when unit_drift(d) exceeds tol.
void require_unit_director(const VectorField& d, double tol = kUnitTolerance);

/// Derivatives of a director field shared by the stress and the director equation.
struct DirectorKinematics {
  VectorField d;
  TensorField grad;      // grad(k, i) = d_i d_k
  VectorField laplace;   // Laplacian of d
  ScalarField grad_sq;   // |grad d|^2
};

DirectorKinematics director_kinematics(const VectorField& d);

/// Both algebraic sides of an identity that holds for unit directors.
/// `value` is the cross-product form; `expanded` the form written with dot
/// products; `residual` is || value - expanded ||_L2.
struct CrossProductForms {
  VectorField value;
  VectorField expanded;
  double residual;
};

/// (d x Laplace d) x d  versus  Laplace d + |grad d|^2 d.
CrossProductForms s_field(const VectorField& d);
CrossProductForms s_field(const DirectorKinematics& kin);

/// (d x (d.grad)u) x d  versus  (d.grad)u - (d^T A d) d, with A the strain rate.
CrossProductForms q_field(const VectorField& u, const VectorField& d);
CrossProductForms q_field(const TensorField& grad_u, const VectorField& d);

/// sigma_ij = d_i d . d_j d + h_i d_j with h = (d x Laplace d) x d, dealiased.
TensorField elastic_stress(const VectorField& d);
TensorField elastic_stress(const DirectorKinematics& kin, const VectorField& tension);

/// Laplace d + |grad d|^2 d - (u.grad)d + (d.grad)u - (d^T A d) d, dealiased.
VectorField director_rhs(const VectorField& u, const VectorField& d);

/// Same right-hand side from precomputed pieces; grad_u(i, j) = d_j u_i.
VectorField director_rhs(const VectorField& u, const TensorField& grad_u, const DirectorKinematics& kin,
                         const VectorField& tension);

/// d / |d| pointwise; throws BlowUpError(step) if |d| < 1/2 anywhere.
VectorField renormalize_director(const VectorField& d, long step = 0);

}  // namespace nemaflow
