#include "nemaflow/field.hpp"

#include <algorithm>
#include <cmath>

#include "nemaflow/errors.hpp"

namespace nemaflow {

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) {
    throw DimensionError("fields live on different grids (n=" + std::to_string(a.n()) + " vs n=" +
                         std::to_string(b.n()) + ")");
  }
}

ScalarField::ScalarField(Grid grid, double value) : grid_(std::move(grid)), values_(grid_.size(), value) {}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator+=(double value) noexcept {
  for (auto& v : values_) v += value;
  return *this;
}

ScalarField& ScalarField::operator*=(double value) noexcept {
  for (auto& v : values_) v *= value;
  return *this;
}

ScalarField& ScalarField::add_scaled(double scale, const ScalarField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += scale * other.values_[i];
  return *this;
}

bool ScalarField::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double ScalarField::min() const noexcept { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const noexcept { return *std::max_element(values_.begin(), values_.end()); }

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(ScalarField a, const ScalarField& b) { return a *= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }
ScalarField operator-(ScalarField a) { return a *= -1.0; }

VectorField::VectorField(const Grid& grid, const std::array<double, 3>& value)
    : c_{ScalarField(grid, value[0]), ScalarField(grid, value[1]), ScalarField(grid, value[2])} {}

VectorField::VectorField(ScalarField x, ScalarField y, ScalarField z) : c_{std::move(x), std::move(y), std::move(z)} {
  require_same_grid(c_[0].grid(), c_[1].grid());
  require_same_grid(c_[0].grid(), c_[2].grid());
}

VectorField& VectorField::operator+=(const VectorField& other) {
  for (int c = 0; c < 3; ++c) c_[c] += other.c_[c];
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& other) {
  for (int c = 0; c < 3; ++c) c_[c] -= other.c_[c];
  return *this;
}

VectorField& VectorField::operator*=(double value) noexcept {
  for (auto& c : c_) c *= value;
  return *this;
}

VectorField& VectorField::add_scaled(double scale, const VectorField& other) {
  for (int c = 0; c < 3; ++c) c_[c].add_scaled(scale, other.c_[c]);
  return *this;
}

bool VectorField::all_finite() const noexcept {
  return c_[0].all_finite() && c_[1].all_finite() && c_[2].all_finite();
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double s, VectorField a) { return a *= s; }

VectorField operator*(const ScalarField& s, VectorField a) {
  for (int c = 0; c < 3; ++c) a[c] *= s;
  return a;
}

ScalarField dot(const VectorField& a, const VectorField& b) {
  require_same_grid(a.grid(), b.grid());
  ScalarField out(a.grid());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = a[0][i] * b[0][i] + a[1][i] * b[1][i] + a[2][i] * b[2][i];
  }
  return out;
}

VectorField cross(const VectorField& a, const VectorField& b) {
  require_same_grid(a.grid(), b.grid());
  VectorField out(a.grid());
  for (std::size_t i = 0; i < out[0].size(); ++i) {
    out[0][i] = a[1][i] * b[2][i] - a[2][i] * b[1][i];
    out[1][i] = a[2][i] * b[0][i] - a[0][i] * b[2][i];
    out[2][i] = a[0][i] * b[1][i] - a[1][i] * b[0][i];
  }
  return out;
}

ScalarField magnitude(const VectorField& a) {
  ScalarField out(a.grid());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::sqrt(a[0][i] * a[0][i] + a[1][i] * a[1][i] + a[2][i] * a[2][i]);
  }
  return out;
}

TensorField::TensorField(const Grid& grid)
    : c_{ScalarField(grid), ScalarField(grid), ScalarField(grid), ScalarField(grid), ScalarField(grid),
         ScalarField(grid), ScalarField(grid), ScalarField(grid), ScalarField(grid)} {}

TensorField& TensorField::operator+=(const TensorField& other) {
  for (int c = 0; c < 9; ++c) c_[c] += other.c_[c];
  return *this;
}

TensorField& TensorField::operator-=(const TensorField& other) {
  for (int c = 0; c < 9; ++c) c_[c] -= other.c_[c];
  return *this;
}

bool TensorField::all_finite() const noexcept {
  return std::all_of(c_.begin(), c_.end(), [](const ScalarField& f) { return f.all_finite(); });
}

ScalarField contract(const TensorField& a, const TensorField& b) {
  require_same_grid(a.grid(), b.grid());
  ScalarField out(a.grid());
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const auto& x = a(i, j);
      const auto& y = b(i, j);
      for (std::size_t p = 0; p < out.size(); ++p) out[p] += x[p] * y[p];
    }
  }
  return out;
}

Spectrum::Spectrum(Grid grid) : grid_(std::move(grid)), coeffs_(grid_.spectral_size()) {}

Spectrum& Spectrum::operator+=(const Spectrum& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

Spectrum& Spectrum::operator*=(double s) noexcept {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

}  // namespace nemaflow
