#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <utility>

#include "nemaflow/grid.hpp"

namespace nemaflow {

/// Real samples of a scalar field at the grid nodes (physical representation).
class ScalarField {
 public:
  explicit ScalarField(Grid grid, double value = 0.0);

  /// Samples f(x, y, z) at every node.
  template <class Fn>
  static ScalarField from_function(const Grid& grid, Fn&& fn);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }
  std::span<double> values() noexcept { return {values_.data(), values_.size()}; }
  std::span<const double> values() const noexcept { return {values_.data(), values_.size()}; }

  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& at(int i, int j, int k) noexcept { return values_[grid_.index(i, j, k)]; }
  double at(int i, int j, int k) const noexcept { return values_[grid_.index(i, j, k)]; }

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(const ScalarField& other);
  ScalarField& operator+=(double value) noexcept;
  ScalarField& operator*=(double value) noexcept;

  /// this += scale * other
  ScalarField& add_scaled(double scale, const ScalarField& other);

  bool all_finite() const noexcept;
  double min() const noexcept;
  double max() const noexcept;

 private:
  Grid grid_;
  RealBuffer values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
ScalarField operator-(ScalarField a);

/// Three scalar components.
class VectorField {
 public:
  explicit VectorField(const Grid& grid, const std::array<double, 3>& value = {0.0, 0.0, 0.0});
  VectorField(ScalarField x, ScalarField y, ScalarField z);

  template <class Fn>
  static VectorField from_function(const Grid& grid, Fn&& fn);

  const Grid& grid() const noexcept { return c_[0].grid(); }
  ScalarField& operator[](int c) noexcept { return c_[c]; }
  const ScalarField& operator[](int c) const noexcept { return c_[c]; }

  std::array<double, 3> at(std::size_t i) const noexcept { return {c_[0][i], c_[1][i], c_[2][i]}; }
  void set(std::size_t i, const std::array<double, 3>& v) noexcept {
    c_[0][i] = v[0];
    c_[1][i] = v[1];
    c_[2][i] = v[2];
  }

  VectorField& operator+=(const VectorField& other);
  VectorField& operator-=(const VectorField& other);
  VectorField& operator*=(double value) noexcept;
  VectorField& add_scaled(double scale, const VectorField& other);

  bool all_finite() const noexcept;

 private:
  std::array<ScalarField, 3> c_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double s, VectorField a);
/// Pointwise scalar times vector.
VectorField operator*(const ScalarField& s, VectorField a);

ScalarField dot(const VectorField& a, const VectorField& b);
VectorField cross(const VectorField& a, const VectorField& b);
/// Pointwise Euclidean magnitude.
ScalarField magnitude(const VectorField& a);

/// 3x3 components, row-major: (i, j) -> 3 * i + j.
class TensorField {
 public:
  explicit TensorField(const Grid& grid);

  const Grid& grid() const noexcept { return c_[0].grid(); }
  ScalarField& operator()(int i, int j) noexcept { return c_[3 * i + j]; }
  const ScalarField& operator()(int i, int j) const noexcept { return c_[3 * i + j]; }

  TensorField& operator+=(const TensorField& other);
  TensorField& operator-=(const TensorField& other);
  bool all_finite() const noexcept;

 private:
  std::array<ScalarField, 9> c_;
};

/// Full contraction sum_ij a_ij b_ij, pointwise.
ScalarField contract(const TensorField& a, const TensorField& b);

/// Spectral representation: real-to-complex half spectrum, unnormalised
/// (forward of the constant 1 has coefficient n^3 at k = 0).
class Spectrum {
 public:
  explicit Spectrum(Grid grid);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  std::complex<double>* data() noexcept { return coeffs_.data(); }
  const std::complex<double>* data() const noexcept { return coeffs_.data(); }
  std::complex<double>& operator[](std::size_t i) noexcept { return coeffs_[i]; }
  const std::complex<double>& operator[](std::size_t i) const noexcept { return coeffs_[i]; }

  Spectrum& operator+=(const Spectrum& other);
  Spectrum& operator*=(double s) noexcept;

 private:
  Grid grid_;
  ComplexBuffer coeffs_;
};

void require_same_grid(const Grid& a, const Grid& b);

template <class Fn>
ScalarField ScalarField::from_function(const Grid& grid, Fn&& fn) {
  ScalarField f(grid);
  const int n = grid.n();
  for (int i = 0; i < n; ++i) {
    const double x = grid.coordinate(i);
    for (int j = 0; j < n; ++j) {
      const double y = grid.coordinate(j);
      for (int k = 0; k < n; ++k) f.at(i, j, k) = fn(x, y, grid.coordinate(k));
    }
  }
  return f;
}

template <class Fn>
VectorField VectorField::from_function(const Grid& grid, Fn&& fn) {
  VectorField v(grid);
  const int n = grid.n();
  for (int i = 0; i < n; ++i) {
    const double x = grid.coordinate(i);
    for (int j = 0; j < n; ++j) {
      const double y = grid.coordinate(j);
      for (int k = 0; k < n; ++k) v.set(grid.index(i, j, k), fn(x, y, grid.coordinate(k)));
    }
  }
  return v;
}

}  // namespace nemaflow
