#include "doctest.h"

#include <cmath>

#include "distgen/bounds.hpp"
#include "distgen/errors.hpp"

using namespace distgen;

TEST_CASE("default parameter fit") {
  const auto p = SvmBoundParams::fit_defaults(100, 10, 0.2, 1.0, 0.05);
  CHECK(p.jl_dim == 226);
  CHECK(p.c1 == doctest::Approx(std::sqrt(1.2)).epsilon(1e-15));
  CHECK(p.c2 == p.c1);
  CHECK(p.nu == doctest::Approx(1.0 / (2.0 * std::sqrt(1.2))).epsilon(1e-15));
}

TEST_CASE("epsilon terms against 50-digit references") {
  // Reference values computed once with arbitrary-precision arithmetic from
  // the same closed forms; frozen here. Rows: n, K, theta, B, m, term1,
  // term3, eps_total, rate.
  struct Ref {
    int n, k;
    double theta, bound_B;
    int m;
    double term1, term3, eps, rate;
  };
  const Ref refs[] = {
      {100, 10, 0.2, 1.0, 226, 0.0024986941345738315, 0.00030181218474203973,
       0.0031023185040579110, 276.57324754659815},
      {100, 1, 0.2, 1.0, 12895, 0.079985044848503591, 0.017781340840645038,
       0.11554772652979367, 14183.787343664850},
      {300, 25, 0.2, 1.0, 48, 0.00017780125567756754, 1.3488060936556733e-5,
       0.00020477737755068101, 81.827908427444411},
      {100, 50, 0.2, 1.0, 12, 0.00017780125567756754, 1.3488060936556733e-5,
       0.00020477737755068101, 30.779392289538441},
      {1000, 4, 0.1, 2.0, 25165, 0.00099969686661618424, 0.00010277117543316896,
       0.0012052392174825222, 27680.109228641019},
      {100, 10, 0.5, 1.5, 82, 0.0023449783882116476, 0.00028009763880936926,
       0.0029051736658303861, 115.92285349525642},
  };
  for (const auto& ref : refs) {
    const auto p = SvmBoundParams::fit_defaults(ref.n, ref.k, ref.theta, ref.bound_B);
    REQUIRE(p.jl_dim == ref.m);
    const auto eps = epsilon_terms(p);
    CHECK(eps.term1 == doctest::Approx(ref.term1).epsilon(1e-12));
    CHECK(eps.term3 == doctest::Approx(ref.term3).epsilon(1e-12));
    CHECK(eps.term4 == eps.term3);
    CHECK(eps.total == doctest::Approx(ref.eps).epsilon(1e-12));
    CHECK(dsvm_rate_term(p) == doctest::Approx(ref.rate).epsilon(1e-12));
  }
}

TEST_CASE("epsilon term limits") {
  SUBCASE("m to infinity sends all terms to zero") {
    auto p = SvmBoundParams::fit_defaults(100, 10, 0.2, 1.0);
    p.jl_dim = 2000000;
    const auto eps = epsilon_terms(p);
    CHECK(eps.total < 1e-200);
  }
  SUBCASE("c1 = c2 = 1 puts terms 3 and 4 at exactly 4") {
    auto p = SvmBoundParams::fit_defaults(100, 10, 0.2, 1.0);
    p.c1 = 1.0;
    p.c2 = 1.0;
    const auto eps = epsilon_terms(p);
    CHECK(eps.term3 == 4.0);
    CHECK(eps.term4 == 4.0);
  }
  SUBCASE("tight mode zeroes term2 once the ball cannot reach the margin") {
    auto p = SvmBoundParams::fit_defaults(100, 10, 0.2, 1.0);
    // At the defaults, K theta / (4 c1 nu B) = K theta / (2B) = 1 exactly.
    p.tight_term2 = true;
    const auto eps = epsilon_terms(p);
    CHECK(eps.term2 == 0.0);
    p.tight_term2 = false;
    const auto loose = epsilon_terms(p);
    CHECK(loose.term2_log == doctest::Approx(-285.21228148735698).epsilon(1e-12));
  }
}

TEST_CASE("dsvm bounds at the reference point") {
  const auto p = SvmBoundParams::fit_defaults(100, 10, 0.2, 1.0, 0.05);
  CHECK(dsvm_expected_bound(p) ==
        doctest::Approx(2.3550089813909938).epsilon(1e-9));
  CHECK(dsvm_tail_bound(p) == doctest::Approx(2.3677121375657658).epsilon(1e-9));
  CHECK(dsvm_tail_bound(p) >= dsvm_expected_bound(p));

  SUBCASE("rate value") {
    CHECK(dsvm_rate_term(p) == doctest::Approx(226.0 * std::log(3.4)).epsilon(1e-12));
  }
  SUBCASE("delta -> 1 removes the confidence cost") {
    auto q = p;
    q.delta = 1.0 - 1e-12;
    CHECK(dsvm_tail_bound(q) ==
          doctest::Approx(dsvm_expected_bound(q)).epsilon(1e-6));
  }
  SUBCASE("doubling n with refit defaults decreases both bounds") {
    const auto p2 = SvmBoundParams::fit_defaults(200, 10, 0.2, 1.0, 0.05);
    CHECK(dsvm_expected_bound(p2) < dsvm_expected_bound(p));
    CHECK(dsvm_tail_bound(p2) < dsvm_tail_bound(p));
  }
  SUBCASE("monotone nonincreasing in n over a grid") {
    double prev = 1e300;
    for (const int n : {50, 100, 200, 400, 800, 1600}) {
      const double v =
          dsvm_expected_bound(SvmBoundParams::fit_defaults(n, 10, 0.2, 1.0));
      CHECK(v <= prev + 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("centralized substitution") {
  SUBCASE("K = 1 equals the distributed bound") {
    CHECK(centralized_expected_bound(100, 1, 0.2, 1.0) ==
          doctest::Approx(dsvm_expected_bound(
                              SvmBoundParams::fit_defaults(100, 1, 0.2, 1.0)))
              .epsilon(1e-15));
  }
  SUBCASE("finite positive value at n=300, K=25") {
    const double v = centralized_expected_bound(300, 25, 0.2, 1.0);
    CHECK(v > 0.0);
    CHECK(std::isfinite(v));
  }
  SUBCASE("ratio to centralized tracks sqrt(ln K / K)") {
    double lo = 1e300, hi = 0.0;
    for (const int k : {4, 8, 16, 32, 64}) {
      const double dist =
          dsvm_expected_bound(SvmBoundParams::fit_defaults(100, k, 0.2, 1.0));
      const double cent = centralized_expected_bound(100, k, 0.2, 1.0);
      const double scaled = dist / cent * std::sqrt(k / std::log(k));
      lo = std::min(lo, scaled);
      hi = std::max(hi, scaled);
    }
    CHECK(hi / lo < 2.0);
  }
}

TEST_CASE("optimize_svm_bound") {
  const auto p = SvmBoundParams::fit_defaults(100, 10, 0.2, 1.0);
  const auto best = optimize_svm_bound(100, 10, 0.2, 1.0);
  CHECK(best.value <= dsvm_expected_bound(p) + 1e-12);

  SUBCASE("deterministic") {
    const auto again = optimize_svm_bound(100, 10, 0.2, 1.0);
    CHECK(again.value == best.value);
    CHECK(again.params.jl_dim == best.params.jl_dim);
  }
  SUBCASE("reported params reproduce the reported value") {
    CHECK(dsvm_expected_bound(best.params) == doctest::Approx(best.value).epsilon(1e-15));
  }
}

TEST_CASE("lipschitz_expected_bound") {
  LipschitzBoundParams p;
  p.lipschitz = 1.0;
  p.sigma = 1.0;
  p.hypothesis_var = 0.25;
  p.n = 100;
  p.clients = 4;
  // min(2 cbrt(0.5/1600), 0.03125) = min(0.13572..., 0.03125)
  CHECK(lipschitz_expected_bound(p) == doctest::Approx(0.03125).epsilon(1e-12));

  SUBCASE("1/K^2 branch dominates for large K") {
    for (const int k : {100, 1000}) {
      p.clients = k;
      CHECK(lipschitz_expected_bound(p) ==
            doctest::Approx(2.0 * 0.25 / (static_cast<double>(k) * k)).epsilon(1e-12));
    }
  }
  SUBCASE("zero hypothesis variance gives zero") {
    p.hypothesis_var = 0.0;
    CHECK(lipschitz_expected_bound(p) == 0.0);
  }
}

TEST_CASE("fsgld_bound hand evaluation") {
  // K=1, n=10, b=1 (10 minibatches), sigma=0.5, each minibatch visited once
  // with beta*eta*Var = 4:
  //   (sqrt(2)*0.5 / (2*10*1)) * 10 * sqrt(4) = 1/sqrt(2).
  FsgldBoundInputs in;
  in.eta.assign(10, 2.0);
  in.beta.assign(10, 1.0);
  in.rounds_minibatch = {{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}};
  in.grad_variance = {std::vector<double>(10, 2.0)};
  in.minibatch_count = 10;
  in.minibatch_size = 1;
  in.samples_per_client = 10;
  in.sigma = 0.5;
  CHECK(fsgld_bound(in) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));

  SUBCASE("zero variances give a zero bound") {
    in.grad_variance = {std::vector<double>(10, 0.0)};
    CHECK(fsgld_bound(in) == 0.0);
  }
  SUBCASE("scaling every variance by 4 doubles the bound") {
    FsgldBoundInputs scaled = in;
    scaled.grad_variance = {std::vector<double>(10, 8.0)};
    CHECK(fsgld_bound(scaled) == doctest::Approx(2.0 * fsgld_bound(in)).epsilon(1e-12));
  }
  SUBCASE("client relabeling invariance") {
    FsgldBoundInputs two = in;
    two.rounds_minibatch = {{0, 1, 2, 3, 4, 5, 6, 7, 8, 9},
                            {1, 0, 3, 2, 5, 4, 7, 6, 9, 8}};
    two.grad_variance = {std::vector<double>(10, 2.0), std::vector<double>(10, 3.0)};
    FsgldBoundInputs swapped = two;
    std::swap(swapped.rounds_minibatch[0], swapped.rounds_minibatch[1]);
    std::swap(swapped.grad_variance[0], swapped.grad_variance[1]);
    CHECK(fsgld_bound(two) == doctest::Approx(fsgld_bound(swapped)).epsilon(1e-15));
  }
  SUBCASE("missing variance rejected") {
    FsgldBoundInputs bad = in;
    bad.grad_variance[0][3] = std::nan("");
    CHECK_THROWS_AS(fsgld_bound(bad), NumericError);
  }
}
