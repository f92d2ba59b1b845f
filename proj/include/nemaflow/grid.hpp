#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <new>
#include <vector>

namespace nemaflow {

/// Allocator returning FFTW-aligned storage so field buffers can be handed
/// straight to the new-array execute interface.
template <class T>
struct AlignedAllocator {
  using value_type = T;

  AlignedAllocator() noexcept = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t count);
  void deallocate(T* ptr, std::size_t) noexcept;

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

void* aligned_alloc_bytes(std::size_t bytes);
void aligned_free_bytes(void* ptr) noexcept;

template <class T>
T* AlignedAllocator<T>::allocate(std::size_t count) {
  return static_cast<T*>(aligned_alloc_bytes(count * sizeof(T)));
}

template <class T>
void AlignedAllocator<T>::deallocate(T* ptr, std::size_t) noexcept {
  aligned_free_bytes(ptr);
}

using RealBuffer = std::vector<double, AlignedAllocator<double>>;
using ComplexBuffer = std::vector<std::complex<double>, AlignedAllocator<std::complex<double>>>;

namespace detail {
struct GridImpl;
}

/// Uniform periodic grid on the torus [0, L)^3 with n nodes per axis.
///
/// Physical samples are stored with the x index slowest and z fastest,
/// index = (i * n + j) * n + k. Spectral coefficients use the real-to-complex
/// half layout, index = (i * n + j) * (n / 2 + 1) + kz.
///
/// Copies share the transform plans; grids compare equal when n and L match.
class Grid {
 public:
  Grid(int n, double box_length);

  int n() const noexcept;
  double box_length() const noexcept;
  double spacing() const noexcept;
  double cell_volume() const noexcept;
  double measure() const noexcept;

  std::size_t size() const noexcept;
  std::size_t spectral_size() const noexcept;
  int half_n() const noexcept;  // n/2 + 1 modes along z

  double coordinate(int index) const noexcept;
  std::size_t index(int i, int j, int k) const noexcept;

  /// Integer frequency of full-axis index m: 0, 1, ..., n/2-1, -n/2, ..., -1.
  int frequency(int m) const noexcept;
  /// Per-axis wavenumber table, frequency scaled by 2*pi/L.
  const std::vector<double>& wavenumbers() const noexcept;
  /// Wavenumber used by odd-order derivatives: the Nyquist entry is zero.
  const std::vector<double>& derivative_wavenumbers() const noexcept;
  /// Two-thirds rule: 1 where every |frequency| <= n/3, else 0. Spectral layout.
  const std::vector<std::uint8_t>& dealias_mask() const noexcept;
  double wavenumber_unit() const noexcept;  // 2*pi/L

  /// FFTW plans (unnormalised forward r2c, backward c2r).
  void forward(const double* in, std::complex<double>* out) const;
  void backward(std::complex<double>* in, double* out) const;

  friend bool operator==(const Grid& a, const Grid& b) noexcept;

 private:
  std::shared_ptr<const detail::GridImpl> impl_;
};

Grid make_grid(int n, double box_length);

}  // namespace nemaflow
