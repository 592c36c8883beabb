#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kocal {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Malformed numeric input: non-finite values, size mismatches, empty grids.
class input_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Theory-level operations (rate targets, spectral bounds) require upsilon >= 1.
class smoothness_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Two native-space elements built over different kernels cannot be combined.
class kernel_mismatch_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Cholesky/solve breakdown. Carries the smallest pivot seen and the jitter in use.
class conditioning_error : public std::runtime_error {
 public:
  conditioning_error(const std::string& what, double smallest_pivot, double jitter)
      : std::runtime_error(what), smallest_pivot_(smallest_pivot), jitter_(jitter) {}
  double smallest_pivot() const { return smallest_pivot_; }
  double jitter() const { return jitter_; }

 private:
  double smallest_pivot_;
  double jitter_;
};

// Numerical failure that is not a conditioning problem (bad slope fits, failed draws).
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid run configuration (maps to CLI exit code 2).
class config_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unreadable or schema-mismatched data files (maps to CLI exit code 3).
class data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// External-simulator protocol violation; the message names the offending line.
class protocol_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Axis-aligned box domain.
struct Box {
  Vector lo;
  Vector hi;

  Box() = default;
  Box(Vector lo_, Vector hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (lo.size() != hi.size() || lo.size() == 0)
      throw input_error("Box: lower/upper bounds must be nonempty and of equal dimension");
    for (int i = 0; i < lo.size(); ++i) {
      if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || lo[i] > hi[i])
        throw input_error("Box: bounds must be finite with lo <= hi");
    }
  }

  int dim() const { return static_cast<int>(lo.size()); }
  double width(int i) const { return hi[i] - lo[i]; }
  Vector center() const { return 0.5 * (lo + hi); }

  bool contains(const Eigen::Ref<const Vector>& x) const {
    if (x.size() != lo.size()) return false;
    for (int i = 0; i < x.size(); ++i)
      if (!(x[i] >= lo[i] && x[i] <= hi[i])) return false;
    return true;
  }

  static Box unit(int d) {
    return Box(Vector::Zero(d), Vector::Ones(d));
  }
};

// Scalar prior support; lo == hi denotes a point mass.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool is_point() const { return lo == hi; }
  bool contains(double x) const { return is_point() ? x == lo : (x > lo && x <= hi); }
};

// Independent RNG streams for (master seed, task, subtask); splitmix64 mixing.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(master) ^ a) ^ b);
}

}  // namespace kocal
