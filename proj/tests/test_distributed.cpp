#include "doctest.h"

#include <cmath>

#include "distgen/distributed.hpp"
#include "distgen/errors.hpp"

using namespace distgen;

namespace {

Hypothesis make(std::initializer_list<double> values) {
  Hypothesis h;
  h.w.resize(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const double v : values) h.w[i++] = v;
  return h;
}

}  // namespace

TEST_CASE("aggregate") {
  CHECK(aggregate({make({1, 2})}).w == make({1, 2}).w);
  CHECK(aggregate({make({1, 0}), make({-1, 0})}).w.norm() == 0.0);
  CHECK_THROWS_AS(aggregate({}), ConfigError);
  CHECK_THROWS_AS(aggregate({make({1}), make({1, 2})}), ConfigError);

  SUBCASE("exactly linear") {
    const auto a = make({0.3, -1.2, 4.0});
    const auto b = make({2.0, 0.5, -0.25});
    Hypothesis sa{2.0 * a.w}, sb{2.0 * b.w};
    CHECK(aggregate({sa, sb}).w == (2.0 * aggregate({a, b}).w).eval());
  }
}

TEST_CASE("run_dsvm report identities") {
  const auto pool = synth_two_gaussians(6, 2000, 3.0, 0.08, 5);
  const auto test = synth_two_gaussians(6, 4000, 3.0, 0.08, 6);

  DsvmConfig config;
  config.clients = 4;
  config.samples_per_client = 60;
  config.theta = 0.2;
  config.sgd.seed = 0;
  config.seed = 9;
  const auto report = run_dsvm(pool, test, config);

  CHECK(report.clients == 4);
  CHECK(report.client_norms.size() == 4);
  CHECK(report.gen_gap_theta ==
        doctest::Approx(report.pop_risk - report.agg_emp_risk_margin).epsilon(1e-12));
  CHECK(report.delta_emp ==
        doctest::Approx(report.agg_emp_risk - report.local_emp_risk).epsilon(1e-12));
  // Margin risk dominates the 0-1 risk pointwise.
  CHECK(report.agg_emp_risk_margin >= report.agg_emp_risk);

  SUBCASE("same seed, same report") {
    const auto again = run_dsvm(pool, test, config);
    CHECK(again.aggregate_w.w == report.aggregate_w.w);
    CHECK(again.gen_gap_theta == report.gen_gap_theta);
  }
  SUBCASE("K=1 equals the centralized runner field-for-field") {
    DsvmConfig single = config;
    single.clients = 1;
    single.samples_per_client = 60;
    const auto a = run_dsvm(pool, test, single);
    const auto b = run_centralized(pool, test, 60, 0.2, config.sgd, config.seed);
    CHECK(a.aggregate_w.w == b.aggregate_w.w);
    CHECK(a.gen_gap_theta == b.gen_gap_theta);
    CHECK(a.delta_emp == 0.0);
    CHECK(b.delta_emp == 0.0);
  }
  SUBCASE("perfect classifier with theta = 0 gives a zero gap") {
    const auto easy_pool = synth_two_gaussians(2, 800, 40.0, 0.0, 7);
    const auto easy_test = synth_two_gaussians(2, 800, 40.0, 0.0, 8);
    DsvmConfig easy;
    easy.clients = 2;
    easy.samples_per_client = 100;
    easy.theta = 0.0;
    easy.seed = 10;
    const auto r = run_dsvm(easy_pool, easy_test, easy);
    CHECK(r.pop_risk == 0.0);
    CHECK(r.agg_emp_risk_margin == 0.0);
    CHECK(r.gen_gap_theta == 0.0);
  }
}

TEST_CASE("fsgld") {
  const auto pool = synth_two_gaussians(4, 600, 2.0, 0.05, 11);
  const auto test = synth_two_gaussians(4, 600, 2.0, 0.05, 12);

  SUBCASE("bookkeeping: cyclic schedule partitions the rounds") {
    FsgldConfig config;
    config.clients = 4;
    config.samples_per_client = 20;
    config.minibatch_size = 5;
    config.schedule = FsgldSchedule::cyclic(100, 0.05, 1e4, 4);
    config.seed = 13;
    const auto trace = run_fsgld(pool, test, config, surrogate_grad_logistic);
    REQUIRE(trace.round_aggregates.size() == 101);
    std::vector<int> counts(4, 0);
    for (const int j : trace.schedule.minibatch_index) ++counts[static_cast<std::size_t>(j)];
    for (const int c : counts) CHECK(c == 25);
    // Aggregates are the exact client means each round.
    CHECK(trace.grads.size() == 4);
    CHECK(trace.grads[0].size() == 100);
  }
  SUBCASE("noise off and zero gradient leave the initial point") {
    FsgldConfig config;
    config.clients = 1;
    config.samples_per_client = 4;
    config.minibatch_size = 4;
    config.schedule = FsgldSchedule::cyclic(1, 0.5, 1.0, 1);
    config.disable_noise = true;
    config.polyak_average = false;
    config.init_scale = 0.0;
    config.seed = 14;
    const SurrogateGrad zero = [](const Eigen::VectorXd&, double,
                                  const Eigen::VectorXd& w) {
      return Eigen::VectorXd::Zero(w.size()).eval();
    };
    const auto trace = run_fsgld(pool, test, config, zero);
    CHECK(trace.final_w.w.norm() == 0.0);
  }
  SUBCASE("K clients with identical shards and no noise track one client") {
    // A single-point pool forces identical shards.
    Dataset tiny;
    tiny.features = Eigen::MatrixXd::Constant(1, 3, 0.5);
    tiny.labels = Eigen::VectorXd::Ones(1);
    FsgldConfig multi;
    multi.clients = 5;
    multi.samples_per_client = 1;
    multi.minibatch_size = 1;
    multi.schedule = FsgldSchedule::cyclic(50, 0.1, 1.0, 1);
    multi.disable_noise = true;
    multi.seed = 15;
    FsgldConfig single = multi;
    single.clients = 1;
    const auto a = run_fsgld(tiny, test, multi, surrogate_grad_logistic);
    const auto b = run_fsgld(tiny, test, single, surrogate_grad_logistic);
    CHECK((a.final_w.w - b.final_w.w).lpNorm<Eigen::Infinity>() < 1e-12);
  }
  SUBCASE("n not divisible by b is rejected") {
    FsgldConfig config;
    config.clients = 1;
    config.samples_per_client = 10;
    config.minibatch_size = 3;
    config.schedule = FsgldSchedule::cyclic(5, 0.1, 1.0, 3);
    CHECK_THROWS_AS(run_fsgld(pool, test, config, surrogate_grad_logistic),
                    ConfigError);
  }
  SUBCASE("replica study fills variances and the bound is finite") {
    FsgldConfig config;
    config.clients = 2;
    config.samples_per_client = 16;
    config.minibatch_size = 4;
    config.schedule = FsgldSchedule::cyclic(20, 0.05, 1e3, 4);
    config.seed = 16;
    const auto study = run_fsgld_replicas(pool, test, config,
                                          surrogate_grad_logistic, 5, 1.0, 17);
    REQUIRE(study.traces.size() == 5);
    const double bound = fsgld_bound(study.bound_inputs);
    CHECK(bound >= 0.0);
    CHECK(std::isfinite(bound));
    for (const auto& row : study.grad_variance) {
      for (const double v : row) CHECK(v >= 0.0);
    }
  }
}

TEST_CASE("estimate_limit_gap") {
  const auto pool = synth_two_gaussians(4, 3000, 2.5, 0.1, 19);
  const auto test = synth_two_gaussians(4, 3000, 2.5, 0.1, 20);
  SgdParams sgd;
  sgd.max_epochs = 30;

  SUBCASE("basic estimate with standard error") {
    const auto est = estimate_limit_gap(pool, test, 50, sgd, 20, 21);
    CHECK(std::isfinite(est.value));
    CHECK(est.std_err > 0.0);
    CHECK(est.pop_at_mean >= 0.0);
    CHECK(est.pop_at_mean <= 1.0);
  }
  SUBCASE("doubling replicas stays within the reported error bars") {
    const auto small = estimate_limit_gap(pool, test, 50, sgd, 20, 22);
    const auto large = estimate_limit_gap(pool, test, 50, sgd, 40, 22);
    CHECK(std::abs(small.value - large.value) <=
          3.0 * (small.std_err + large.std_err) + 0.02);
  }
}

TEST_CASE("run_sweep shape and determinism") {
  const auto pool = synth_two_gaussians(5, 1500, 2.0, 0.1, 23);
  const auto test = synth_two_gaussians(5, 1500, 2.0, 0.1, 24);
  SweepConfig config;
  config.clients_grid = {1, 2};
  config.samples_grid = {40};
  config.repeats = 2;
  config.master_seed = 25;
  config.theta = 0.2;
  SgdParams sgd;
  sgd.max_epochs = 20;

  const auto table = run_sweep(pool, test, config, sgd);
  // 2 K-values x 2 repeats x (dsvm + centralized) rows.
  CHECK(table.rows.size() == 8);
  CHECK(table.cells.size() == 4);
  for (const auto& row : table.rows) {
    if (row.experiment == "dsvm") {
      CHECK(row.bound_expected.has_value());
      CHECK(*row.bound_expected > 0.0);
    }
  }
  SUBCASE("same master seed reproduces every row") {
    const auto again = run_sweep(pool, test, config, sgd);
    REQUIRE(again.rows.size() == table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      CHECK(again.rows[i].report.gen_gap_theta == table.rows[i].report.gen_gap_theta);
      CHECK(again.rows[i].seed == table.rows[i].seed);
    }
  }
  SUBCASE("repeats=1 single cell") {
    SweepConfig one;
    one.clients_grid = {1};
    one.samples_grid = {30};
    one.repeats = 1;
    one.master_seed = 26;
    one.include_centralized = false;
    const auto t = run_sweep(pool, test, one, sgd);
    CHECK(t.rows.size() == 1);
    CHECK(t.cells.size() == 1);
    CHECK(t.cells[0].mean_gen_gap == t.rows[0].report.gen_gap_theta);
  }
}
