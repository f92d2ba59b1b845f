#include "nemaflow/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "nemaflow/errors.hpp"

namespace nemaflow {

void* aligned_alloc_bytes(std::size_t bytes) {
  void* ptr = fftw_malloc(bytes == 0 ? 1 : bytes);
  if (ptr == nullptr) throw std::bad_alloc();
  return ptr;
}

void aligned_free_bytes(void* ptr) noexcept { fftw_free(ptr); }

namespace {
// The FFTW planner is not re-entrant; execution with fftw_execute_dft_* is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

namespace detail {

struct GridImpl {
  int n = 0;
  double length = 0.0;
  std::vector<double> k;
  std::vector<double> k_deriv;
  std::vector<std::uint8_t> mask;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  GridImpl(int n_, double length_) : n(n_), length(length_) {
    const double unit = 2.0 * std::numbers::pi / length;
    k.resize(n);
    k_deriv.resize(n);
    for (int m = 0; m < n; ++m) {
      const int f = m < n / 2 ? m : m - n;
      k[m] = unit * f;
      k_deriv[m] = (m == n / 2) ? 0.0 : unit * f;
    }
    const int nh = n / 2 + 1;
    mask.resize(static_cast<std::size_t>(n) * n * nh);
    const auto keep = [n = n](int f) { return 3 * std::abs(f) <= n; };
    for (int i = 0; i < n; ++i) {
      const int fi = i < n / 2 ? i : i - n;
      for (int j = 0; j < n; ++j) {
        const int fj = j < n / 2 ? j : j - n;
        for (int kz = 0; kz < nh; ++kz) {
          mask[(static_cast<std::size_t>(i) * n + j) * nh + kz] = keep(fi) && keep(fj) && keep(kz);
        }
      }
    }

    const std::size_t real_count = static_cast<std::size_t>(n) * n * n;
    const std::size_t complex_count = static_cast<std::size_t>(n) * n * nh;
    std::lock_guard lock(planner_mutex());
    auto* r = fftw_alloc_real(real_count);
    auto* c = fftw_alloc_complex(complex_count);
    forward = fftw_plan_dft_r2c_3d(n, n, n, r, c, FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_3d(n, n, n, c, r, FFTW_ESTIMATE);
    fftw_free(r);
    fftw_free(c);
  }

  ~GridImpl() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }

  GridImpl(const GridImpl&) = delete;
  GridImpl& operator=(const GridImpl&) = delete;
};

}  // namespace detail

Grid::Grid(int n, double box_length) {
  if (n < 8 || n % 2 != 0) {
    throw ConfigurationError("grid size must be even and at least 8, got " + std::to_string(n));
  }
  if (!(box_length > 0.0) || !std::isfinite(box_length)) {
    throw ConfigurationError("box length must be positive and finite");
  }
  impl_ = std::make_shared<const detail::GridImpl>(n, box_length);
}

Grid make_grid(int n, double box_length) { return Grid(n, box_length); }

int Grid::n() const noexcept { return impl_->n; }
double Grid::box_length() const noexcept { return impl_->length; }
double Grid::spacing() const noexcept { return impl_->length / impl_->n; }
double Grid::cell_volume() const noexcept { return std::pow(spacing(), 3); }
double Grid::measure() const noexcept { return std::pow(impl_->length, 3); }

std::size_t Grid::size() const noexcept {
  const auto n = static_cast<std::size_t>(impl_->n);
  return n * n * n;
}

std::size_t Grid::spectral_size() const noexcept {
  const auto n = static_cast<std::size_t>(impl_->n);
  return n * n * (n / 2 + 1);
}

int Grid::half_n() const noexcept { return impl_->n / 2 + 1; }

double Grid::coordinate(int index) const noexcept { return index * spacing(); }

std::size_t Grid::index(int i, int j, int k) const noexcept {
  const auto n = static_cast<std::size_t>(impl_->n);
  return (static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)) * n + static_cast<std::size_t>(k);
}

int Grid::frequency(int m) const noexcept { return m < impl_->n / 2 ? m : m - impl_->n; }

const std::vector<double>& Grid::wavenumbers() const noexcept { return impl_->k; }
const std::vector<double>& Grid::derivative_wavenumbers() const noexcept { return impl_->k_deriv; }
const std::vector<std::uint8_t>& Grid::dealias_mask() const noexcept { return impl_->mask; }
double Grid::wavenumber_unit() const noexcept { return 2.0 * std::numbers::pi / impl_->length; }

void Grid::forward(const double* in, std::complex<double>* out) const {
  // r2c leaves its input untouched for out-of-place plans.
  fftw_execute_dft_r2c(impl_->forward, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
}

void Grid::backward(std::complex<double>* in, double* out) const {
  fftw_execute_dft_c2r(impl_->backward, reinterpret_cast<fftw_complex*>(in), out);
}

bool operator==(const Grid& a, const Grid& b) noexcept {
  return a.impl_ == b.impl_ || (a.n() == b.n() && a.box_length() == b.box_length());
}

}  // namespace nemaflow
