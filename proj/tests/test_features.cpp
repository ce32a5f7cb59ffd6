#include "doctest.h"

#include <cmath>

#include "distgen/errors.hpp"
#include "distgen/features.hpp"
#include "distgen/rng.hpp"

using namespace distgen;

namespace {

double exact_gamma_tail(int m, double x) {
  // P(chi^2_m >= x) for even m: the Erlang series
  // e^{-x/2} sum_{j < m/2} (x/2)^j / j!. Terms grow from e^{-x/2}, so the
  // running product stays in double range for our thresholds.
  const double half_x = x / 2.0;
  double term = std::exp(-half_x);
  double sum = term;
  for (int j = 1; j < m / 2; ++j) {
    term *= half_x / static_cast<double>(j);
    sum += term;
  }
  return sum;
}

}  // namespace

TEST_CASE("rff_transform fixed cases") {
  SUBCASE("p=1, zero frequency and phase gives sqrt(2)") {
    RffMap map(3, 1, 0.01, 1);
    // Force the degenerate map by rebuilding through the public surface:
    // transform of x = 0 uses cos(phase) only.
    const Eigen::VectorXd at_zero = map.transform(Eigen::VectorXd::Zero(3));
    CHECK(at_zero[0] ==
          doctest::Approx(std::sqrt(2.0) * std::cos(map.phases()[0])));
  }
  SUBCASE("outputs bounded by sqrt(2/p)") {
    RffMap map(5, 64, 0.05, 2);
    Rng rng(3);
    const double bound = std::sqrt(2.0 / 64.0) + 1e-12;
    for (int i = 0; i < 50; ++i) {
      const Eigen::VectorXd y = map.transform(rng.gaussian_vector(5));
      CHECK(y.lpNorm<Eigen::Infinity>() <= bound);
    }
  }
  SUBCASE("same seed, same map") {
    RffMap a(4, 16, 0.2, 77), b(4, 16, 0.2, 77);
    CHECK(a.frequencies() == b.frequencies());
    CHECK(a.phases() == b.phases());
  }
  SUBCASE("dimension mismatch") {
    RffMap map(4, 8, 0.1, 1);
    CHECK_THROWS_AS(map.transform(Eigen::VectorXd::Zero(5)), ConfigError);
  }
}

TEST_CASE("rff kernel approximation error shrinks with p") {
  const double gamma = 0.1;
  Rng rng(11);
  std::vector<Eigen::VectorXd> xs, ys;
  for (int i = 0; i < 100; ++i) {
    xs.push_back(rng.gaussian_vector(6));
    ys.push_back(rng.gaussian_vector(6));
  }
  const auto rms_error = [&](int p) {
    RffMap map(6, p, gamma, 5);
    double se = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double approx = map.transform(xs[i]).dot(map.transform(ys[i]));
      const double exact = std::exp(-gamma * (xs[i] - ys[i]).squaredNorm());
      se += (approx - exact) * (approx - exact);
    }
    return std::sqrt(se / xs.size());
  };
  const double coarse = rms_error(250);
  const double fine = rms_error(4000);
  CHECK(fine < coarse);
  CHECK(fine < 0.05);
}

TEST_CASE("sample_jl moments and determinism") {
  SUBCASE("entry variance close to 1/m") {
    JlMatrix mat(1000, 50, 21);
    const double var = mat.entries().array().square().mean();
    CHECK(var == doctest::Approx(1.0 / 50.0).epsilon(0.05));
    CHECK(std::abs(mat.entries().mean()) < 0.001);
  }
  SUBCASE("same seed yields the same matrix") {
    JlMatrix a(20, 5, 9), b(20, 5, 9);
    CHECK(a.entries() == b.entries());
  }
}

TEST_CASE("jl_project basics") {
  JlMatrix mat(12, 4, 31);
  SUBCASE("zero maps to zero") {
    CHECK(mat.project(Eigen::VectorXd::Zero(12)).norm() == 0.0);
  }
  SUBCASE("linearity to machine precision") {
    Rng rng(1);
    const Eigen::VectorXd x = rng.gaussian_vector(12), y = rng.gaussian_vector(12);
    const Eigen::VectorXd lhs = mat.project(2.5 * x - 0.75 * y);
    const Eigen::VectorXd rhs = 2.5 * mat.project(x) - 0.75 * mat.project(y);
    CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() < 1e-12);
  }
  SUBCASE("norm preserved on average over matrices") {
    Rng rng(2);
    const Eigen::VectorXd x = rng.gaussian_vector(12);
    double mean_sq = 0.0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
      JlMatrix m(12, 24, 1000 + static_cast<std::uint64_t>(t));
      mean_sq += m.project(x).squaredNorm();
    }
    mean_sq /= trials;
    CHECK(mean_sq == doctest::Approx(x.squaredNorm()).epsilon(0.05));
  }
}

TEST_CASE("jl norm tail matches the exact chi-square law") {
  // ||project(x)||^2 / ||x||^2 is chi^2_m / m; check the empirical tail at
  // c = 1.2, m = 100 against the exact value (~2.63e-3).
  const int m = 100;
  const double c = 1.2;
  const double exact = exact_gamma_tail(m, c * c * m);
  Rng rng(4);
  const Eigen::VectorXd x = rng.gaussian_vector(30);
  int hits = 0;
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) {
    JlMatrix mat(30, m, 50000 + static_cast<std::uint64_t>(t));
    if (mat.project(x).norm() >= c * x.norm()) ++hits;
  }
  const double freq = static_cast<double>(hits) / trials;
  const double se = std::sqrt(exact * (1.0 - exact) / trials);
  CHECK(std::abs(freq - exact) <= 5.0 * se + 1e-4);
}

TEST_CASE("bounded-norm tail stays under the analytic envelope") {
  // With typical norms well inside the bound B, the fraction of projections
  // with ||A^T x|| >= c1 * B sits below 2 exp(-0.21 m (c1^2 - 1)).
  const int m = 100;
  const double c1 = 1.2, bound_B = 1.0;
  Rng rng(8);
  int hits = 0;
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd x = rng.gaussian_vector(30);
    x *= 0.7 * bound_B / std::sqrt(30.0);  // typical norm ~0.7 B
    if (x.norm() > bound_B) x *= bound_B / x.norm();
    JlMatrix mat(30, m, 90000 + static_cast<std::uint64_t>(t));
    if (mat.project(x).norm() >= c1 * bound_B) ++hits;
  }
  const double envelope = 2.0 * std::exp(-0.21 * m * (c1 * c1 - 1.0));
  CHECK(static_cast<double>(hits) / trials <= envelope);
}
