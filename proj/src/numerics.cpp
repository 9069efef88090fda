#include "dco/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dco::numerics {

DenseMatrix::DenseMatrix(int rows, int cols, double fill)
    : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {
  if (rows < 0 || cols < 0) throw InvalidArgument("DenseMatrix: negative shape");
}

DenseMatrix::DenseMatrix(int rows, int cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != static_cast<size_t>(rows) * cols)
    throw InvalidArgument("DenseMatrix: data length does not match shape");
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) t.at(c, r) = at(r, c);
  return t;
}

bool DenseMatrix::all_finite() const {
  for (double x : data_)
    if (!std::isfinite(x)) return false;
  return true;
}

void DenseMatrix::require_finite(const char* what) const {
  if (!all_finite()) throw NumericalFailure(std::string("non-finite values in ") + what);
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw InvalidArgument("matmul: inner dimensions differ");
  DenseMatrix out(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a.at(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) out.at(i, j) += aik * b.at(k, j);
    }
  }
  return out;
}

namespace {

constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ull;

uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(uint64_t seed, uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  // Key the walk by a double mix so that nearby (seed, stream) pairs land far
  // apart in state space.
  state_ = mix64(mix64(seed + kGolden) ^ (stream_id * 0xD6E8FEB86659FD93ull + 1));
}

uint64_t RngStream::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

uint64_t RngStream::uniform_int(uint64_t n) {
  if (n == 0) throw InvalidArgument("uniform_int: n must be > 0");
  // Rejection sampling over the top of the range keeps the draw unbiased.
  const uint64_t limit = std::numeric_limits<uint64_t>::max() - std::numeric_limits<uint64_t>::max() % n;
  uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return x % n;
}

double RngStream::normal() {
  // Box-Muller; u1 shifted away from zero so log() stays finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

bool RngStream::bernoulli(double p) { return uniform() < p; }

double RngStream::gamma(double shape) {
  if (!(shape > 0.0)) throw InvalidArgument("gamma: shape must be > 0");
  if (shape < 1.0) {
    const double u = uniform();
    return gamma(shape + 1.0) * std::pow(u > 0.0 ? u : std::numeric_limits<double>::min(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RngStream::beta(double a, double b) {
  const double x = gamma(a);
  const double y = gamma(b);
  return x / (x + y);
}

RngStream RngStream::substream(uint64_t id) const {
  return RngStream(mix64(seed_ ^ mix64(stream_id_ + kGolden)), id);
}

std::vector<double> softmax(const std::vector<double>& v) {
  if (v.empty()) throw InvalidArgument("softmax: empty input");
  double m = v[0];
  for (double x : v) {
    if (!std::isfinite(x)) throw NumericalFailure("softmax: non-finite input");
    m = std::max(m, x);
  }
  std::vector<double> out(v.size());
  double sum = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - m);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
  return out;
}

double finite_diff_check(const std::function<double(const std::vector<double>&)>& f,
                         const std::vector<double>& params,
                         const std::vector<double>& analytic_grad, double eps) {
  if (!(eps > 0.0) || eps > 1e-2) throw InvalidArgument("finite_diff_check: eps out of (0, 1e-2]");
  if (params.size() != analytic_grad.size())
    throw InvalidArgument("finite_diff_check: grad size mismatch");
  std::vector<double> p = params;
  double worst = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    const double saved = p[i];
    p[i] = saved + eps;
    const double fp = f(p);
    p[i] = saved - eps;
    const double fm = f(p);
    p[i] = saved;
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw NumericalFailure("finite_diff_check: non-finite loss evaluation");
    const double g_fd = (fp - fm) / (2.0 * eps);
    const double denom = std::max({1.0, std::abs(g_fd), std::abs(analytic_grad[i])});
    worst = std::max(worst, std::abs(g_fd - analytic_grad[i]) / denom);
  }
  return worst;
}

double sigmoid(double x) {
  if (x >= 0.0) {
    const double z = std::exp(-x);
    return 1.0 / (1.0 + z);
  }
  const double z = std::exp(x);
  return z / (1.0 + z);
}

double l2_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace dco::numerics
