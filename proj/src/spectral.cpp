#include "nemaflow/spectral.hpp"

#include <cmath>
#include <complex>

#include "nemaflow/errors.hpp"

namespace nemaflow {

namespace {

using cplx = std::complex<double>;

double ksq(double kx, double ky, double kz) { return kx * kx + ky * ky + kz * kz; }

}  // namespace

Spectrum to_spectral(const ScalarField& f) {
  Spectrum s(f.grid());
  f.grid().forward(f.data(), s.data());
  return s;
}

ScalarField to_physical(const Spectrum& s) {
  // c2r overwrites its input, so transform a scratch copy.
  Spectrum scratch = s;
  ScalarField f(s.grid());
  s.grid().backward(scratch.data(), f.data());
  f *= 1.0 / static_cast<double>(s.grid().size());
  return f;
}

Spectrum spectral_derivative(const Spectrum& s, int axis) {
  if (axis < 0 || axis > 2) throw ConfigurationError("axis must be 0, 1 or 2");
  const Grid& grid = s.grid();
  const int n = grid.n();
  const int nh = grid.half_n();
  const auto& k = grid.derivative_wavenumbers();
  Spectrum out(grid);
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int kz = 0; kz < nh; ++kz, ++idx) {
        const double kk = axis == 0 ? k[i] : (axis == 1 ? k[j] : k[kz]);
        // i k (a + i b) = -k b + i k a
        out[idx] = cplx(-kk * s[idx].imag(), kk * s[idx].real());
      }
    }
  }
  return out;
}

ScalarField derivative(const ScalarField& f, int axis) { return to_physical(spectral_derivative(to_spectral(f), axis)); }

VectorField gradient(const ScalarField& f) {
  const Spectrum s = to_spectral(f);
  return VectorField(to_physical(spectral_derivative(s, 0)), to_physical(spectral_derivative(s, 1)),
                     to_physical(spectral_derivative(s, 2)));
}

TensorField jacobian(const VectorField& v) {
  TensorField out(v.grid());
  for (int i = 0; i < 3; ++i) {
    const Spectrum s = to_spectral(v[i]);
    for (int j = 0; j < 3; ++j) out(i, j) = to_physical(spectral_derivative(s, j));
  }
  return out;
}

ScalarField divergence(const VectorField& v) {
  Spectrum acc(v.grid());
  for (int c = 0; c < 3; ++c) acc += spectral_derivative(to_spectral(v[c]), c);
  return to_physical(acc);
}

VectorField divergence(const TensorField& m) {
  VectorField out(m.grid());
  for (int i = 0; i < 3; ++i) {
    Spectrum acc(m.grid());
    for (int j = 0; j < 3; ++j) acc += spectral_derivative(to_spectral(m(i, j)), j);
    out[i] = to_physical(acc);
  }
  return out;
}

ScalarField laplacian(const ScalarField& f) {
  Spectrum s = to_spectral(f);
  apply_symbol(s, [](double kx, double ky, double kz) { return -ksq(kx, ky, kz); });
  return to_physical(s);
}

VectorField laplacian(const VectorField& v) { return VectorField(laplacian(v[0]), laplacian(v[1]), laplacian(v[2])); }

ScalarField biharmonic(const ScalarField& f) {
  Spectrum s = to_spectral(f);
  apply_symbol(s, [](double kx, double ky, double kz) {
    const double q = ksq(kx, ky, kz);
    return q * q;
  });
  return to_physical(s);
}

VectorField biharmonic(const VectorField& v) {
  return VectorField(biharmonic(v[0]), biharmonic(v[1]), biharmonic(v[2]));
}

VectorField curl(const VectorField& v) {
  const Spectrum sx = to_spectral(v[0]);
  const Spectrum sy = to_spectral(v[1]);
  const Spectrum sz = to_spectral(v[2]);
  Spectrum cx = spectral_derivative(sz, 1);
  Spectrum t = spectral_derivative(sy, 2);
  t *= -1.0;
  cx += t;
  Spectrum cy = spectral_derivative(sx, 2);
  t = spectral_derivative(sz, 0);
  t *= -1.0;
  cy += t;
  Spectrum cz = spectral_derivative(sy, 0);
  t = spectral_derivative(sx, 1);
  t *= -1.0;
  cz += t;
  return VectorField(to_physical(cx), to_physical(cy), to_physical(cz));
}

ScalarField directional_derivative(const VectorField& v, const ScalarField& f) { return dot(v, gradient(f)); }

VectorField directional_derivative(const VectorField& v, const VectorField& w) {
  return VectorField(directional_derivative(v, w[0]), directional_derivative(v, w[1]),
                     directional_derivative(v, w[2]));
}

ScalarField inverse_laplacian(const ScalarField& f) {
  Spectrum s = to_spectral(f);
  apply_symbol(s, [](double kx, double ky, double kz) {
    const double q = ksq(kx, ky, kz);
    return q > 0.0 ? -1.0 / q : 0.0;
  });
  return to_physical(s);
}

HelmholtzParts helmholtz_decompose(const VectorField& v) {
  const Grid& grid = v.grid();
  std::array<Spectrum, 3> s{to_spectral(v[0]), to_spectral(v[1]), to_spectral(v[2])};
  Spectrum phi(grid);
  // Projection built from the derivative wavenumbers so that divergence and
  // gradient (which zero the Nyquist entry) see an exact decomposition.
  for_each_derivative_mode(grid, [&](std::size_t idx, double kx, double ky, double kz) {
    const double q = ksq(kx, ky, kz);
    if (q == 0.0) return;
    const cplx kdotv = kx * s[0][idx] + ky * s[1][idx] + kz * s[2][idx];
    // grad(phi) = i k phi_hat must equal k (k . v_hat) / |k|^2.
    phi[idx] = cplx(kdotv.imag(), -kdotv.real()) / q;
    s[0][idx] -= kx * kdotv / q;
    s[1][idx] -= ky * kdotv / q;
    s[2][idx] -= kz * kdotv / q;
  });
  return {VectorField(to_physical(s[0]), to_physical(s[1]), to_physical(s[2])), to_physical(phi)};
}

VectorField leray_project(const VectorField& v) { return helmholtz_decompose(v).solenoidal; }

void dealias_in_place(Spectrum& s) {
  const auto& mask = s.grid().dealias_mask();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!mask[i]) s[i] = 0.0;
  }
}

ScalarField dealias(const ScalarField& f) {
  Spectrum s = to_spectral(f);
  dealias_in_place(s);
  return to_physical(s);
}

VectorField dealias(const VectorField& v) { return VectorField(dealias(v[0]), dealias(v[1]), dealias(v[2])); }

TensorField dealias(const TensorField& m) {
  TensorField out(m.grid());
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) out(i, j) = dealias(m(i, j));
  }
  return out;
}

ScalarField gaussian_filter(const ScalarField& f, double sigma) {
  if (!(sigma >= 0.0)) throw ConfigurationError("filter width must be non-negative");
  Spectrum s = to_spectral(f);
  apply_symbol(s, [sigma](double kx, double ky, double kz) { return std::exp(-0.5 * sigma * sigma * ksq(kx, ky, kz)); });
  return to_physical(s);
}

VectorField gaussian_filter(const VectorField& v, double sigma) {
  return VectorField(gaussian_filter(v[0], sigma), gaussian_filter(v[1], sigma), gaussian_filter(v[2], sigma));
}

}  // namespace nemaflow
