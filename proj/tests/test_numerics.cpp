#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dco/numerics.hpp"

using dco::numerics::DenseMatrix;
using dco::numerics::finite_diff_check;
using dco::numerics::RngStream;
using dco::numerics::sigmoid;
using dco::numerics::softmax;

TEST_CASE("softmax symmetry and single element") {
  auto s = softmax({0.0, 0.0});
  CHECK(s[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s[1] == doctest::Approx(0.5).epsilon(1e-12));

  for (double x : {-1e8, -3.5, 0.0, 7.25, 1e8}) {
    auto one = softmax({x});
    CHECK(one.size() == 1);
    CHECK(one[0] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("softmax matches hand-computed exp/sum values") {
  // exp(1)/Z, exp(2)/Z, exp(3)/Z with Z = exp(1)+exp(2)+exp(3), computed
  // independently and frozen here.
  auto s = softmax({1.0, 2.0, 3.0});
  CHECK(std::abs(s[0] - 0.090030573170380462) < 1e-12);
  CHECK(std::abs(s[1] - 0.24472847105479764) < 1e-12);
  CHECK(std::abs(s[2] - 0.66524095577482178) < 1e-12);
}

TEST_CASE("softmax sums to one and is shift invariant") {
  RngStream rng(7, 0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(1 + rng.uniform_int(8));
    for (auto& x : v) x = rng.normal() * 10.0;
    auto a = softmax(v);
    double sum = 0.0;
    for (double x : a) sum += x;
    CHECK(std::abs(sum - 1.0) < 1e-9);

    const double shift = rng.normal() * 100.0;
    std::vector<double> w = v;
    for (auto& x : w) x += shift;
    auto b = softmax(w);
    for (size_t i = 0; i < v.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-9);
  }
}

TEST_CASE("softmax rejects empty input") {
  CHECK_THROWS_AS(softmax({}), dco::InvalidArgument);
}

TEST_CASE("finite_diff_check on quadratic and constant") {
  auto quad = [](const std::vector<double>& p) { return p[0] * p[0]; };
  CHECK(finite_diff_check(quad, {3.0}, {6.0}, 1e-5) < 1e-8);

  auto constant = [](const std::vector<double>&) { return 4.2; };
  CHECK(finite_diff_check(constant, {1.0, -2.0}, {0.0, 0.0}, 1e-5) == 0.0);
}

TEST_CASE("finite_diff_check catches a wrong gradient") {
  auto quad = [](const std::vector<double>& p) { return p[0] * p[0]; };
  CHECK(finite_diff_check(quad, {3.0}, {5.0}, 1e-5) > 0.1);
}

TEST_CASE("finite_diff_check self-applied to a tiny factorization logloss") {
  // Two-feature interaction model p = sigmoid(w0 + v1*v2), logloss on y=1.
  auto loss = [](const std::vector<double>& p) {
    const double logit = p[0] + p[1] * p[2];
    return -std::log(sigmoid(logit));
  };
  RngStream rng(11, 3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> p = {rng.normal(), rng.normal(), rng.normal()};
    const double s = sigmoid(p[0] + p[1] * p[2]);
    std::vector<double> g = {s - 1.0, (s - 1.0) * p[2], (s - 1.0) * p[1]};
    CHECK(finite_diff_check(loss, p, g, 1e-6) < 1e-4);
  }
}

TEST_CASE("rng determinism and stream separation") {
  RngStream a(42, 0), b(42, 0), c(42, 1);
  bool all_equal = true;
  for (int i = 0; i < 1000; ++i) {
    if (a.uniform() != b.uniform()) all_equal = false;
  }
  CHECK(all_equal);
  RngStream a2(42, 0);
  CHECK(a2.uniform() != c.uniform());
}

TEST_CASE("rng uniform moments") {
  RngStream rng(123, 5);
  double sum = 0.0, sumsq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sumsq += u * u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sumsq / n == doctest::Approx(1.0 / 3.0).epsilon(0.01));
}

TEST_CASE("beta(1,1) draws are uniform in the mean") {
  RngStream rng(42, 9);
  double sum = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) sum += rng.beta(1.0, 1.0);
  const double mean = sum / n;
  CHECK(mean >= 0.49);
  CHECK(mean <= 0.51);
}

TEST_CASE("beta moments against closed form") {
  // Beta(2,5): mean 2/7, var 10/(49*8).
  RngStream rng(2024, 1);
  double sum = 0.0, sumsq = 0.0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.beta(2.0, 5.0);
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(mean == doctest::Approx(2.0 / 7.0).epsilon(0.01));
  CHECK(var == doctest::Approx(10.0 / (49.0 * 8.0)).epsilon(0.03));
}

TEST_CASE("normal moments") {
  RngStream rng(77, 2);
  double sum = 0.0, sumsq = 0.0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sumsq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(sumsq / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("substream independence is keyed by id") {
  RngStream base(9, 0);
  RngStream s0 = base.substream(0);
  RngStream s1 = base.substream(1);
  RngStream s0_again = base.substream(0);
  CHECK(s0.uniform() == s0_again.uniform());
  CHECK(s0.uniform() != s1.uniform());
}

TEST_CASE("dense matrix multiply and transpose") {
  DenseMatrix a(2, 3, {1, 2, 3, 4, 5, 6});
  DenseMatrix b(3, 2, {7, 8, 9, 10, 11, 12});
  auto c = matmul(a, b);
  CHECK(c.at(0, 0) == 58.0);
  CHECK(c.at(0, 1) == 64.0);
  CHECK(c.at(1, 0) == 139.0);
  CHECK(c.at(1, 1) == 154.0);

  auto at = a.transposed();
  CHECK(at.rows() == 3);
  CHECK(at.cols() == 2);
  CHECK(at.at(2, 1) == 6.0);

  CHECK_THROWS_AS(matmul(a, a), dco::InvalidArgument);
}
