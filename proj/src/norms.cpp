#include "nemaflow/norms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "nemaflow/errors.hpp"
#include "nemaflow/spectral.hpp"

namespace nemaflow {

namespace {

void check_exponent(double p) {
  if (p == 1.5 || p == 2.0 || p == 3.0 || p == 4.0 || p == 6.0 || p == kInfinity) return;
  throw ConfigurationError("unsupported Lp exponent " + std::to_string(p));
}

// Shared quadrature over a pointwise magnitude.
double lp_of_magnitude(const Grid& grid, std::size_t count, double p, const std::function<double(std::size_t)>& mag) {
  check_exponent(p);
  if (p == kInfinity) {
    double m = 0.0;
    for (std::size_t i = 0; i < count; ++i) m = std::max(m, mag(i));
    return m;
  }
  double acc = 0.0;
  if (p == 2.0) {
    for (std::size_t i = 0; i < count; ++i) {
      const double a = mag(i);
      acc += a * a;
    }
    return std::sqrt(acc * grid.cell_volume());
  }
  for (std::size_t i = 0; i < count; ++i) acc += std::pow(mag(i), p);
  return std::pow(acc * grid.cell_volume(), 1.0 / p);
}

}  // namespace

double lp_norm(const ScalarField& f, double p) {
  return lp_of_magnitude(f.grid(), f.size(), p, [&](std::size_t i) { return std::abs(f[i]); });
}

double lp_norm(const VectorField& f, double p) {
  return lp_of_magnitude(f.grid(), f[0].size(), p, [&](std::size_t i) {
    return std::sqrt(f[0][i] * f[0][i] + f[1][i] * f[1][i] + f[2][i] * f[2][i]);
  });
}

double lp_norm(const TensorField& f, double p) {
  return lp_of_magnitude(f.grid(), f(0, 0).size(), p, [&](std::size_t i) {
    double s = 0.0;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) s += f(a, b)[i] * f(a, b)[i];
    }
    return std::sqrt(s);
  });
}

double integral(const ScalarField& f) {
  double acc = 0.0;
  for (double v : f.values()) acc += v;
  return acc * f.grid().cell_volume();
}

double mean(const ScalarField& f) { return integral(f) / f.grid().measure(); }

double max_abs(const ScalarField& f) { return lp_norm(f, kInfinity); }
double max_abs(const VectorField& f) { return lp_norm(f, kInfinity); }

double inner_product(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f.grid(), g.grid());
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += f[i] * g[i];
  return acc * f.grid().cell_volume();
}

double inner_product(const VectorField& f, const VectorField& g) {
  double acc = 0.0;
  for (int c = 0; c < 3; ++c) acc += inner_product(f[c], g[c]);
  return acc;
}

double inner_product(const TensorField& f, const TensorField& g) {
  double acc = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) acc += inner_product(f(i, j), g(i, j));
  }
  return acc;
}

double sobolev_seminorm(const Spectrum& s, int order) {
  if (order < 0) throw ConfigurationError("derivative order must be non-negative");
  const Grid& grid = s.grid();
  const int nh_last = grid.half_n() - 1;
  double acc = 0.0;
  std::size_t idx = 0;
  const int n = grid.n();
  const auto& k = grid.wavenumbers();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int kz = 0; kz <= nh_last; ++kz, ++idx) {
        // Modes with 0 < kz < n/2 stand for a conjugate pair.
        const double weight = (kz == 0 || kz == nh_last) ? 1.0 : 2.0;
        const double q = k[i] * k[i] + k[j] * k[j] + k[kz] * k[kz];
        acc += weight * std::pow(q, order) * std::norm(s[idx]);
      }
    }
  }
  const double count = static_cast<double>(grid.size());
  return std::sqrt(acc * grid.measure() / (count * count));
}

double spectral_l2_norm(const Spectrum& s) { return sobolev_seminorm(s, 0); }

double sobolev_seminorm(const ScalarField& f, int order) { return sobolev_seminorm(to_spectral(f), order); }

std::vector<double> sobolev_seminorms(const VectorField& f, std::initializer_list<int> orders) {
  std::vector<double> acc(orders.size(), 0.0);
  for (int c = 0; c < 3; ++c) {
    const Spectrum s = to_spectral(f[c]);
    std::size_t m = 0;
    for (int order : orders) {
      const double v = sobolev_seminorm(s, order);
      acc[m++] += v * v;
    }
  }
  for (auto& a : acc) a = std::sqrt(a);
  return acc;
}

double sobolev_seminorm(const VectorField& f, int order) {
  double acc = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double v = sobolev_seminorm(f[c], order);
    acc += v * v;
  }
  return std::sqrt(acc);
}

}  // namespace nemaflow
