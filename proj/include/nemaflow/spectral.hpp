#pragma once

#include <cstddef>

#include "nemaflow/field.hpp"

namespace nemaflow {

// Transforms. to_physical(to_spectral(f)) reproduces f to roundoff.
Spectrum to_spectral(const ScalarField& f);
ScalarField to_physical(const Spectrum& s);

/// Calls fn(index, kx, ky, kz) for every stored mode with the true
/// (Nyquist-signed) wavenumbers.
template <class Fn>
void for_each_mode(const Grid& grid, Fn&& fn) {
  const int n = grid.n();
  const int nh = grid.half_n();
  const auto& k = grid.wavenumbers();
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int kz = 0; kz < nh; ++kz, ++idx) fn(idx, k[i], k[j], k[kz]);
    }
  }
}

/// Same walk with the derivative wavenumbers (Nyquist entries set to zero).
template <class Fn>
void for_each_derivative_mode(const Grid& grid, Fn&& fn) {
  const int n = grid.n();
  const int nh = grid.half_n();
  const auto& k = grid.derivative_wavenumbers();
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int kz = 0; kz < nh; ++kz, ++idx) fn(idx, k[i], k[j], k[kz]);
    }
  }
}

/// Multiplies every coefficient by symbol(kx, ky, kz) (real, even in k).
template <class Symbol>
void apply_symbol(Spectrum& s, Symbol&& symbol) {
  for_each_mode(s.grid(), [&](std::size_t idx, double kx, double ky, double kz) { s[idx] *= symbol(kx, ky, kz); });
}

/// i * k_axis * s with the Nyquist wavenumber treated as zero.
Spectrum spectral_derivative(const Spectrum& s, int axis);

// Differential operators. Axes are 0 (x), 1 (y), 2 (z).
ScalarField derivative(const ScalarField& f, int axis);
VectorField gradient(const ScalarField& f);
/// J(i, j) = d_j v_i.
TensorField jacobian(const VectorField& v);
ScalarField divergence(const VectorField& v);
/// (div M)_i = sum_j d_j M_ij.
VectorField divergence(const TensorField& m);
ScalarField laplacian(const ScalarField& f);
VectorField laplacian(const VectorField& v);
ScalarField biharmonic(const ScalarField& f);
VectorField biharmonic(const VectorField& v);
VectorField curl(const VectorField& v);
/// (v . grad) f
ScalarField directional_derivative(const VectorField& v, const ScalarField& f);
/// (v . grad) w, componentwise.
VectorField directional_derivative(const VectorField& v, const VectorField& w);

/// Zero-mean solution of laplacian(phi) = f - mean(f).
ScalarField inverse_laplacian(const ScalarField& f);

/// Orthogonal projection onto divergence-free fields (the mean flow is kept).
VectorField leray_project(const VectorField& v);

/// v = solenoidal + grad(potential), potential with zero mean.
struct HelmholtzParts {
  VectorField solenoidal;
  ScalarField potential;
};
HelmholtzParts helmholtz_decompose(const VectorField& v);

/// Two-thirds rule truncation.
ScalarField dealias(const ScalarField& f);
VectorField dealias(const VectorField& v);
TensorField dealias(const TensorField& m);
void dealias_in_place(Spectrum& s);

/// Convolution with a periodised Gaussian of standard deviation sigma
/// (symbol exp(-sigma^2 |k|^2 / 2)).
ScalarField gaussian_filter(const ScalarField& f, double sigma);
VectorField gaussian_filter(const VectorField& v, double sigma);

}  // namespace nemaflow
