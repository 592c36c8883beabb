#include "kocal/kernel.hpp"

#include <cmath>
#include <sstream>

namespace kocal {

namespace {

// Parallel entry assembly. Each (i,j) cell has a unique writer, so the result
// is independent of scheduling.
Matrix gram_entries_impl(const Design& design, const MaternKernel& k, double jitter,
                         bool parallel) {
  const int n = design.size();
  const Matrix& x = design.points();
  Matrix sigma(n, n);
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
  for (int i = 0; i < n; ++i) {
    sigma(i, i) = 1.0 + jitter;
    for (int j = 0; j < i; ++j) {
      const double v = k.correlation((x.row(i) - x.row(j)).norm());
      sigma(i, j) = v;
      sigma(j, i) = v;
    }
  }
  return sigma;
}

Matrix cross_cov_impl(const Design& design, const Matrix& query, const MaternKernel& k,
                      bool parallel) {
  if (query.cols() != design.dim())
    throw input_error("cross_cov: query dimension does not match the design");
  const int n = design.size();
  const int m = static_cast<int>(query.rows());
  const Matrix& x = design.points();
  Matrix c(n, m);
#pragma omp parallel for schedule(static) if (parallel)
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i)
      c(i, j) = k.correlation((x.row(i) - query.row(j)).norm());
  return c;
}

Vector eval_combination_impl(const Matrix& centers, const Vector& coeffs,
                             const MaternKernel& k, const Matrix& query, bool parallel) {
  if (centers.rows() != coeffs.size())
    throw input_error("eval_combination: one coefficient per center required");
  if (query.cols() != centers.cols())
    throw input_error("eval_combination: query dimension does not match the centers");
  const int m = static_cast<int>(query.rows());
  Vector out(m);
#pragma omp parallel for schedule(static) if (parallel)
  for (int j = 0; j < m; ++j) {
    double s = 0.0;
    for (int i = 0; i < centers.rows(); ++i)
      s += coeffs[i] * k.correlation((centers.row(i) - query.row(j)).norm());
    out[j] = s;
  }
  return out;
}

// Runs a plain Cholesky to locate the first nonpositive pivot after Eigen's
// factorization reports a numerical issue.
double find_bad_pivot(const Matrix& a) {
  const int n = static_cast<int>(a.rows());
  Matrix l = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    double d = a(j, j) - l.row(j).head(j).squaredNorm();
    if (d <= 0.0) return d;
    l(j, j) = std::sqrt(d);
    for (int i = j + 1; i < n; ++i)
      l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
  }
  return l.diagonal().minCoeff();
}

// Solve with iterative refinement against `apply` (x -> T x). Keeps the best
// iterate by residual and stops when refinement stalls.
template <typename Apply>
Vector refined_solve(const Eigen::LLT<Matrix>& llt, const Apply& apply,
                     const Eigen::Ref<const Vector>& b, int max_iters) {
  Vector x = llt.solve(b);
  const double bnorm = b.norm();
  if (bnorm == 0.0) return Vector::Zero(b.size());
  Vector best = x;
  double best_res = (b - apply(x)).norm();
  for (int it = 0; it < max_iters && best_res > 1e-15 * bnorm; ++it) {
    const Vector r = b - apply(x);
    x += llt.solve(r);
    const double res = (b - apply(x)).norm();
    if (res < best_res) {
      best_res = res;
      best = x;
    } else {
      break;
    }
  }
  return best;
}

}  // namespace

MaternKernel::MaternKernel(double upsilon, double gamma, int dim)
    : upsilon_(upsilon), gamma_(gamma), dim_(dim) {
  if (!(upsilon > 0.0) || !std::isfinite(upsilon))
    throw input_error("MaternKernel: upsilon must be positive");
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw input_error("MaternKernel: gamma must be positive");
  if (dim < 1) throw input_error("MaternKernel: dimension must be >= 1");
  norm_const_ = std::pow(2.0, 1.0 - upsilon) / std::tgamma(upsilon);
  half_integer_ = 0;
  if (upsilon == 0.5) half_integer_ = 1;
  if (upsilon == 1.5) half_integer_ = 3;
  if (upsilon == 2.5) half_integer_ = 5;
}

void MaternKernel::require_theory(const char* operation) const {
  if (upsilon_ < 1.0) {
    std::ostringstream msg;
    msg << operation << ": requires upsilon >= 1 (got " << upsilon_ << ")";
    throw smoothness_error(msg.str());
  }
}

double MaternKernel::correlation(double distance) const {
  if (!std::isfinite(distance) || distance < 0.0)
    throw input_error("matern: non-finite distance");
  const double z = 2.0 * std::sqrt(upsilon_) * gamma_ * distance;
  if (z < kSmallArg) return 1.0;
  switch (half_integer_) {
    case 1:
      return std::exp(-z);
    case 3:
      return (1.0 + z) * std::exp(-z);
    case 5:
      return (1.0 + z + z * z / 3.0) * std::exp(-z);
    default: {
      const double v = norm_const_ * std::pow(z, upsilon_) * std::cyl_bessel_k(upsilon_, z);
      if (!std::isfinite(v)) return 0.0;  // deep-tail underflow
      return v > 1.0 ? 1.0 : v;
    }
  }
}

double MaternKernel::operator()(const Eigen::Ref<const Vector>& s,
                                const Eigen::Ref<const Vector>& t) const {
  if (s.size() != dim_ || t.size() != dim_)
    throw input_error("matern: point dimension does not match the kernel");
  if (!s.allFinite() || !t.allFinite())
    throw input_error("matern: non-finite coordinates");
  return correlation((s - t).norm());
}

double matern(const Eigen::Ref<const Vector>& s, const Eigen::Ref<const Vector>& t,
              const MaternKernel& k) {
  return k(s, t);
}

Design::Design(Matrix points, Box domain)
    : points_(std::move(points)), domain_(std::move(domain)) {
  const int n = static_cast<int>(points_.rows());
  const int d = static_cast<int>(points_.cols());
  if (n < 1 || d < 1) throw input_error("Design: needs at least one point and one dimension");
  if (d != domain_.dim()) throw input_error("Design: point/domain dimension mismatch");
  for (int i = 0; i < n; ++i) {
    if (!points_.row(i).allFinite() || !domain_.contains(points_.row(i).transpose()))
      throw input_error("Design: point outside the domain box");
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if ((points_.row(i) - points_.row(j)).norm() == 0.0)
        throw input_error("Design: duplicate points");
}

GramMatrix::GramMatrix(Design design, const MaternKernel& kernel, double jitter)
    : design_(std::move(design)), kernel_(kernel), jitter_(jitter) {
  if (jitter < 0.0 || !std::isfinite(jitter))
    throw input_error("gram: jitter must be nonnegative");
  if (kernel.dim() != design_.dim())
    throw input_error("gram: kernel/design dimension mismatch");
  sigma_ = gram_entries_impl(design_, kernel_, jitter_, true);
  llt_.compute(sigma_);
  if (llt_.info() != Eigen::Success) {
    const double pivot = find_bad_pivot(sigma_);
    std::ostringstream msg;
    msg << "gram: Cholesky factorization failed, smallest pivot " << pivot << " (n="
        << design_.size() << ", jitter=" << jitter_ << ")";
    throw conditioning_error(msg.str(), pivot, jitter_);
  }
  const Vector ldiag = Matrix(llt_.matrixL()).diagonal();
  min_pivot_ = ldiag.minCoeff();
  min_pivot_ *= min_pivot_;
}

double GramMatrix::log_det() const {
  return 2.0 * Matrix(llt_.matrixL()).diagonal().array().log().sum();
}

Vector GramMatrix::solve(const Eigen::Ref<const Vector>& b) const {
  if (b.size() != size()) throw input_error("gram solve: size mismatch");
  return refined_solve(llt_, [&](const Vector& x) { return (sigma_ * x).eval(); }, b, 4);
}

Matrix GramMatrix::solve(const Eigen::Ref<const Matrix>& b) const {
  if (b.rows() != size()) throw input_error("gram solve: size mismatch");
  Matrix out(b.rows(), b.cols());
  for (int j = 0; j < b.cols(); ++j) out.col(j) = solve(Vector(b.col(j)));
  return out;
}

Vector GramMatrix::solve_raw(const Eigen::Ref<const Vector>& b) const {
  if (b.size() != size()) throw input_error("gram solve: size mismatch");
  const double j = jitter_;
  return refined_solve(
      llt_, [&](const Vector& x) { return (sigma_ * x - j * x).eval(); }, b, 80);
}

GramMatrix gram(const Design& design, const MaternKernel& k, double jitter) {
  return GramMatrix(design, k, jitter);
}

Matrix cross_cov(const Design& design, const Matrix& query, const MaternKernel& k) {
  return cross_cov_impl(design, query, k, true);
}

Vector eval_combination(const Matrix& centers, const Vector& coeffs,
                        const MaternKernel& k, const Matrix& query) {
  return eval_combination_impl(centers, coeffs, k, query, true);
}

double spectral_density(const Eigen::Ref<const Vector>& omega, const MaternKernel& k) {
  if (omega.size() != k.dim())
    throw input_error("spectral_density: frequency dimension mismatch");
  if (!omega.allFinite()) throw input_error("spectral_density: non-finite frequency");
  const double u = k.upsilon();
  const double d = static_cast<double>(k.dim());
  const double a = 4.0 * u * k.gamma() * k.gamma();
  return std::pow(2.0, d / 2.0) * std::pow(a, u) *
         (std::tgamma(u + d / 2.0) / std::tgamma(u)) *
         std::pow(a + omega.squaredNorm(), -(u + d / 2.0));
}

std::pair<double, double> spectral_bounds(double upsilon, double gamma_lo,
                                          double gamma_hi, int dim) {
  if (!(gamma_lo > 0.0) || !(gamma_hi > 0.0) || gamma_lo > gamma_hi)
    throw input_error("spectral_bounds: need 0 < gamma_lo <= gamma_hi");
  if (upsilon < 1.0)
    throw smoothness_error("spectral_bounds: requires upsilon >= 1");
  const double d = static_cast<double>(dim);
  const double front = std::pow(2.0, d / 2.0) * std::tgamma(upsilon + d / 2.0) /
                       std::tgamma(upsilon);
  const double a_lo = 4.0 * upsilon * gamma_lo * gamma_lo;
  const double a_hi = 4.0 * upsilon * gamma_hi * gamma_hi;
  const double c1 = front * std::max(std::pow(a_hi, upsilon), std::pow(a_lo, -d / 2.0));
  const double c2 = front * std::min(std::pow(a_lo, upsilon), std::pow(a_hi, -d / 2.0));
  return {c1, c2};
}

namespace serial_ref {

Matrix gram_entries(const Design& design, const MaternKernel& k, double jitter) {
  return gram_entries_impl(design, k, jitter, false);
}

Matrix cross_cov(const Design& design, const Matrix& query, const MaternKernel& k) {
  return cross_cov_impl(design, query, k, false);
}

Vector eval_combination(const Matrix& centers, const Vector& coeffs,
                        const MaternKernel& k, const Matrix& query) {
  return eval_combination_impl(centers, coeffs, k, query, false);
}

}  // namespace serial_ref

}  // namespace kocal
