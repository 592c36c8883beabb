#pragma once

#include "kocal/kernel.hpp"

namespace kocal {

/// Kernel interpolant s(x) = sum_i u_i C(x_i, x) with coefficients solving the
/// Gram system for the data values. Immutable once constructed; batch
/// evaluation is parallel over query points.
class Interpolant {
 public:
  Interpolant(const GramMatrix& gram, Vector values);

  const MaternKernel& kernel() const { return kernel_; }
  const Design& centers() const { return centers_; }
  const Vector& coefficients() const { return coeffs_; }
  const Vector& values() const { return values_; }

  double operator()(const Eigen::Ref<const Vector>& x) const;
  Vector operator()(const Matrix& query) const;

  // u' Sigma u = u' y.
  double native_norm_sq() const { return coeffs_.dot(values_); }

 private:
  MaternKernel kernel_;
  Design centers_;
  Vector coeffs_;
  Vector values_;
};

Interpolant interpolate(const Design& design, const Vector& y, const MaternKernel& k,
                        double jitter = 0.0);
Interpolant interpolate(const GramMatrix& gram, const Vector& y);

/// Finite linear combination sum_i alpha_i C(s_i, .) of kernel translates,
/// with the native-space inner product evaluated on the coefficients.
class NativeElement {
 public:
  NativeElement(const MaternKernel& kernel, Design centers, Vector coeffs);

  const MaternKernel& kernel() const { return kernel_; }
  const Design& centers() const { return centers_; }
  const Vector& coefficients() const { return coeffs_; }

  double operator()(const Eigen::Ref<const Vector>& x) const;
  Vector operator()(const Matrix& query) const;

  double norm_sq() const;

 private:
  MaternKernel kernel_;
  Design centers_;
  Vector coeffs_;
};

// sum_i sum_j alpha_i beta_j C(s_i, t_j); both elements must share a kernel.
double inner_product(const NativeElement& a, const NativeElement& b);

// h = sup_{x in domain} min_j |x - x_j|. Exact in one dimension; grid-searched
// with `resolution` points per axis otherwise.
double fill_distance(const Design& design, int resolution = 256);

// C(x,x) - Sigma_1' Sigma^{-1} Sigma_1 at x_new, in [0, 1]. Small round-off
// negatives are clamped to zero; values below -10x the jitter scale raise a
// conditioning error.
double power_function(const Design& design, const MaternKernel& k,
                      const Eigen::Ref<const Vector>& x_new,
                      double jitter = kDefaultJitter);
Vector power_function(const GramMatrix& gram, const Matrix& query);

}  // namespace kocal
