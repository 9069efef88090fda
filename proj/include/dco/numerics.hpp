#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dco/common.hpp"

namespace dco::numerics {

/// Row-major dense matrix of doubles. Small by design; everything in this
/// project fits in a few thousand entries.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols, double fill = 0.0);
  DenseMatrix(int rows, int cols, std::vector<double> data);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& at(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  double at(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }
  double& operator()(int r, int c) { return at(r, c); }
  double operator()(int r, int c) const { return at(r, c); }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  DenseMatrix transposed() const;
  bool all_finite() const;
  /// Throws NumericalFailure if any entry is NaN/Inf.
  void require_finite(const char* what) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

/// Counter-based random stream. The pair (seed, stream_id) is the complete
/// reproducibility key: the sequence depends on nothing else, is identical
/// across platforms, and distinct stream ids give unrelated sequences.
/// Internally a SplitMix64 walk keyed by a hash of (seed, stream_id).
class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t stream_id);

  uint64_t seed() const { return seed_; }
  uint64_t stream_id() const { return stream_id_; }

  uint64_t next_u64();
  /// Uniform in [0, 1), 53-bit resolution.
  double uniform();
  /// Uniform integer in [0, n). n must be > 0.
  uint64_t uniform_int(uint64_t n);
  /// Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal();
  bool bernoulli(double p);
  /// Gamma(shape, 1) by Marsaglia-Tsang squeeze.
  double gamma(double shape);
  double beta(double a, double b);

  /// Derive an independent child stream. Children of distinct ids never
  /// collide with each other or with the parent.
  RngStream substream(uint64_t id) const;

 private:
  uint64_t seed_ = 0;
  uint64_t stream_id_ = 0;
  uint64_t state_ = 0;
};

/// Numerically stable softmax (max subtraction). Throws InvalidArgument on
/// empty input, NumericalFailure on non-finite entries.
std::vector<double> softmax(const std::vector<double>& v);

/// Central finite-difference check of an analytic gradient.
/// Returns max_i |g_fd[i] - analytic[i]| / max(1, |g_fd[i]|, |analytic[i]|).
double finite_diff_check(const std::function<double(const std::vector<double>&)>& f,
                         const std::vector<double>& params,
                         const std::vector<double>& analytic_grad, double eps);

double sigmoid(double x);
double l2_norm(const std::vector<double>& v);

}  // namespace dco::numerics
