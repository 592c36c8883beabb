#include "kocal/native.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace kocal {

Interpolant::Interpolant(const GramMatrix& gram, Vector values)
    : kernel_(gram.kernel()), centers_(gram.design()), values_(std::move(values)) {
  if (values_.size() != gram.size())
    throw input_error("interpolate: one value per design point required");
  coeffs_ = gram.solve_raw(values_);
}

double Interpolant::operator()(const Eigen::Ref<const Vector>& x) const {
  Matrix q(1, x.size());
  q.row(0) = x.transpose();
  return (*this)(q)[0];
}

Vector Interpolant::operator()(const Matrix& query) const {
  return eval_combination(centers_.points(), coeffs_, kernel_, query);
}

Interpolant interpolate(const Design& design, const Vector& y, const MaternKernel& k,
                        double jitter) {
  return Interpolant(gram(design, k, jitter), y);
}

Interpolant interpolate(const GramMatrix& gram, const Vector& y) {
  return Interpolant(gram, y);
}

NativeElement::NativeElement(const MaternKernel& kernel, Design centers, Vector coeffs)
    : kernel_(kernel), centers_(std::move(centers)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != centers_.size())
    throw input_error("NativeElement: one coefficient per center required");
  if (kernel_.dim() != centers_.dim())
    throw input_error("NativeElement: kernel/center dimension mismatch");
}

double NativeElement::operator()(const Eigen::Ref<const Vector>& x) const {
  Matrix q(1, x.size());
  q.row(0) = x.transpose();
  return (*this)(q)[0];
}

Vector NativeElement::operator()(const Matrix& query) const {
  return eval_combination(centers_.points(), coeffs_, kernel_, query);
}

double NativeElement::norm_sq() const { return inner_product(*this, *this); }

double inner_product(const NativeElement& a, const NativeElement& b) {
  if (!a.kernel().same_as(b.kernel()))
    throw kernel_mismatch_error("inner_product: elements use different kernels");
  const Matrix cross = cross_cov(a.centers(), b.centers().points(), a.kernel());
  return a.coefficients().dot(cross * b.coefficients());
}

double fill_distance(const Design& design, int resolution) {
  if (design.size() == 0) throw input_error("fill_distance: empty design");
  if (resolution < 2) throw input_error("fill_distance: resolution must be >= 2");
  const Box& box = design.domain();
  const int d = design.dim();

  if (d == 1) {
    std::vector<double> xs(design.size());
    for (int i = 0; i < design.size(); ++i) xs[i] = design.points()(i, 0);
    std::sort(xs.begin(), xs.end());
    double h = std::max(xs.front() - box.lo[0], box.hi[0] - xs.back());
    for (size_t i = 1; i < xs.size(); ++i) h = std::max(h, 0.5 * (xs[i] - xs[i - 1]));
    return h;
  }

  long total = 1;
  for (int k = 0; k < d; ++k) total *= resolution;
  const Matrix& pts = design.points();
  double h = 0.0;
#pragma omp parallel for reduction(max : h) schedule(static)
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    Vector g(d);
    for (int k = 0; k < d; ++k) {
      const long i = rem % resolution;
      rem /= resolution;
      g[k] = box.lo[k] + box.width(k) * static_cast<double>(i) / (resolution - 1);
    }
    double nearest = (pts.row(0).transpose() - g).norm();
    for (int p = 1; p < pts.rows(); ++p)
      nearest = std::min(nearest, (pts.row(p).transpose() - g).norm());
    h = std::max(h, nearest);
  }
  return h;
}

Vector power_function(const GramMatrix& gram, const Matrix& query) {
  const Matrix c1 = cross_cov(gram.design(), query, gram.kernel());
  const Matrix w = gram.solve(c1);
  Vector p(query.rows());
  const double tol = std::max(10.0 * gram.jitter(), 1e-12);
  for (int j = 0; j < query.rows(); ++j) {
    double v = 1.0 - c1.col(j).dot(w.col(j));
    if (v < -tol) {
      std::ostringstream msg;
      msg << "power_function: value " << v << " below the round-off tolerance";
      throw conditioning_error(msg.str(), gram.smallest_pivot(), gram.jitter());
    }
    p[j] = std::clamp(v, 0.0, 1.0);
  }
  return p;
}

double power_function(const Design& design, const MaternKernel& k,
                      const Eigen::Ref<const Vector>& x_new, double jitter) {
  Matrix q(1, x_new.size());
  q.row(0) = x_new.transpose();
  return power_function(gram(design, k, jitter), q)[0];
}

}  // namespace kocal
