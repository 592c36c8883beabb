#pragma once

#include "kocal/common.hpp"

#include <utility>

namespace kocal {

inline constexpr double kDefaultJitter = 1e-8;

/// Matern correlation kernel
///   C(s,t) = 2^{1-u} / Gamma(u) * z^u K_u(z),  z = 2 sqrt(u) g ||s - t||,
/// normalized so C(s,s) = 1. upsilon (u) controls smoothness, gamma (g) is an
/// inverse length scale. Half-integer orders 1/2, 3/2, 5/2 use closed forms;
/// other orders go through the Bessel K evaluation of the standard library.
class MaternKernel {
 public:
  MaternKernel(double upsilon, double gamma, int dim);

  double upsilon() const { return upsilon_; }
  double gamma() const { return gamma_; }
  int dim() const { return dim_; }

  // Correlation as a function of distance. Arguments below the small-z
  // threshold return the r -> 0 limit 1 (removable singularity).
  double correlation(double distance) const;

  double operator()(const Eigen::Ref<const Vector>& s,
                    const Eigen::Ref<const Vector>& t) const;

  // Rate and bound operations are only valid for upsilon >= 1.
  void require_theory(const char* operation) const;

  bool same_as(const MaternKernel& other) const {
    return upsilon_ == other.upsilon_ && gamma_ == other.gamma_ && dim_ == other.dim_;
  }

  static constexpr double kSmallArg = 1e-10;

 private:
  double upsilon_;
  double gamma_;
  int dim_;
  double norm_const_;  // 2^{1-u} / Gamma(u)
  int half_integer_;   // 1, 3, 5 for u = 1/2, 3/2, 5/2; 0 otherwise
};

/// An ordered set of n distinct points in a box domain.
class Design {
 public:
  Design(Matrix points, Box domain);

  int size() const { return static_cast<int>(points_.rows()); }
  int dim() const { return static_cast<int>(points_.cols()); }
  const Matrix& points() const { return points_; }
  const Box& domain() const { return domain_; }
  Vector point(int i) const { return points_.row(i).transpose(); }

 private:
  Matrix points_;  // n x d, rows are points
  Box domain_;
};

/// Correlation matrix of a design with jitter on the diagonal and its
/// Cholesky factor. Solves run a few steps of iterative refinement so node
/// residuals reach machine level even on ill-conditioned systems.
class GramMatrix {
 public:
  GramMatrix(Design design, const MaternKernel& kernel, double jitter);

  int size() const { return static_cast<int>(sigma_.rows()); }
  const Matrix& matrix() const { return sigma_; }  // includes the jitter
  double jitter() const { return jitter_; }
  const Design& design() const { return design_; }
  const MaternKernel& kernel() const { return kernel_; }

  double smallest_pivot() const { return min_pivot_; }
  Matrix chol_lower() const { return llt_.matrixL(); }
  double log_det() const;  // of the jittered matrix

  // (Sigma + jitter I)^{-1} b, refined against the jittered matrix.
  Vector solve(const Eigen::Ref<const Vector>& b) const;
  Matrix solve(const Eigen::Ref<const Matrix>& b) const;

  // Refines toward the raw (unjittered) system; used where exact
  // interpolation at the nodes matters.
  Vector solve_raw(const Eigen::Ref<const Vector>& b) const;

 private:
  Design design_;
  MaternKernel kernel_;
  Matrix sigma_;  // jittered entries
  double jitter_;
  Eigen::LLT<Matrix> llt_;
  double min_pivot_;
};

// Correlation value in (0, 1]; exactly 1 when s = t.
double matern(const Eigen::Ref<const Vector>& s, const Eigen::Ref<const Vector>& t,
              const MaternKernel& k);

GramMatrix gram(const Design& design, const MaternKernel& k, double jitter = kDefaultJitter);

// n x m matrix with (i,j) entry C(x_i, query_j); query rows are points.
Matrix cross_cov(const Design& design, const Matrix& query, const MaternKernel& k);

// Fourier transform of the Matern correlation:
//   2^{d/2} (4 u g^2)^u Gamma(u + d/2)/Gamma(u) (4 u g^2 + |w|^2)^{-(u + d/2)}.
double spectral_density(const Eigen::Ref<const Vector>& omega, const MaternKernel& k);

// Constants (C1, C2) sandwiching the spectral density between multiples of
// (1 + |w|^2)^{-(u + d/2)} uniformly over gamma in [gamma_lo, gamma_hi].
std::pair<double, double> spectral_bounds(double upsilon, double gamma_lo,
                                          double gamma_hi, int dim);

// Evaluate sum_i coeffs_i C(centers_i, q) for each query row q. Parallel over
// queries.
Vector eval_combination(const Matrix& centers, const Vector& coeffs,
                        const MaternKernel& k, const Matrix& query);

// Serial reference implementations of the parallel assembly/evaluation
// kernels, kept for correctness tests and benchmarks.
namespace serial_ref {
Matrix gram_entries(const Design& design, const MaternKernel& k, double jitter);
Matrix cross_cov(const Design& design, const Matrix& query, const MaternKernel& k);
Vector eval_combination(const Matrix& centers, const Vector& coeffs,
                        const MaternKernel& k, const Matrix& query);
}  // namespace serial_ref

}  // namespace kocal
