#pragma once

#include <initializer_list>
#include <limits>
#include <vector>

#include "nemaflow/field.hpp"

namespace nemaflow {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Uniform-grid quadrature of |f|^p; p must be one of 3/2, 2, 3, 4, 6, inf.
/// Vector and tensor fields use the pointwise Euclidean / Frobenius magnitude.
double lp_norm(const ScalarField& f, double p);
double lp_norm(const VectorField& f, double p);
double lp_norm(const TensorField& f, double p);

double integral(const ScalarField& f);
double mean(const ScalarField& f);
double max_abs(const ScalarField& f);
double max_abs(const VectorField& f);  // sup of the pointwise magnitude

double inner_product(const ScalarField& f, const ScalarField& g);
double inner_product(const VectorField& f, const VectorField& g);
double inner_product(const TensorField& f, const TensorField& g);

/// L2 norm evaluated from the spectral coefficients (Parseval).
double spectral_l2_norm(const Spectrum& s);

/// ||grad^m f||_L2 from the spectrum: sqrt(sum |k|^{2m} |f_k|^2) (scaled).
/// On the torus this equals the L2 norm of the full m-th derivative tensor.
double sobolev_seminorm(const ScalarField& f, int order);
double sobolev_seminorm(const VectorField& f, int order);
double sobolev_seminorm(const Spectrum& s, int order);
/// Several orders at once, one transform per component.
std::vector<double> sobolev_seminorms(const VectorField& f, std::initializer_list<int> orders);

}  // namespace nemaflow
