#include "distgen/distributed.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "distgen/errors.hpp"
#include "distgen/rng.hpp"

namespace distgen {

Hypothesis aggregate(const std::vector<Hypothesis>& hypotheses) {
  if (hypotheses.empty()) throw ConfigError("aggregate: empty hypothesis list");
  const Eigen::Index d = hypotheses.front().dim();
  Hypothesis out;
  out.w = Eigen::VectorXd::Zero(d);
  for (const auto& h : hypotheses) {
    if (h.dim() != d) throw ConfigError("aggregate: dimension mismatch");
    out.w += h.w;
  }
  out.w /= static_cast<double>(hypotheses.size());
  return out;
}

DsvmRunReport run_dsvm(const Dataset& pool, const Dataset& test,
                       const DsvmConfig& config) {
  ShardPlan plan{config.clients, config.samples_per_client,
                 child_seed(config.seed, "dsvm-shards")};
  const auto shards = shard(pool, plan);

  std::vector<Hypothesis> locals;
  locals.reserve(shards.size());
  DsvmRunReport report;
  for (std::size_t i = 0; i < shards.size(); ++i) {
    SgdParams client_params = config.sgd;
    client_params.seed = child_seed(config.seed, "dsvm-client", i);
    locals.push_back(sgd_train_svm(shards[i], client_params).hypothesis);
    report.client_norms.push_back(locals.back().norm());
  }

  report.clients = config.clients;
  report.samples_per_client = config.samples_per_client;
  report.seed = config.seed;
  report.aggregate_w = aggregate(locals);

  double local_risk = 0.0, agg_risk = 0.0, agg_margin = 0.0;
  for (std::size_t i = 0; i < shards.size(); ++i) {
    local_risk += empirical_risk_zero_one(shards[i], locals[i]);
    agg_risk += empirical_risk_zero_one(shards[i], report.aggregate_w);
    agg_margin += empirical_risk_margin(shards[i], report.aggregate_w, config.theta);
  }
  const double k = static_cast<double>(shards.size());
  report.local_emp_risk = local_risk / k;
  report.agg_emp_risk = agg_risk / k;
  report.agg_emp_risk_margin = agg_margin / k;
  report.pop_risk = population_risk_estimate(test, report.aggregate_w);
  report.gen_gap_theta = report.pop_risk - report.agg_emp_risk_margin;
  report.delta_emp = report.agg_emp_risk - report.local_emp_risk;
  return report;
}

DsvmRunReport run_dsvm(const Dataset& pool, const Dataset& test,
                       const RffMap& features, const DsvmConfig& config) {
  return run_dsvm(features.transform(pool), features.transform(test), config);
}

DsvmRunReport run_centralized(const Dataset& pool, const Dataset& test,
                              int total_samples, double theta,
                              const SgdParams& sgd, std::uint64_t seed) {
  DsvmConfig config;
  config.clients = 1;
  config.samples_per_client = total_samples;
  config.theta = theta;
  config.sgd = sgd;
  config.seed = seed;
  return run_dsvm(pool, test, config);
}

FsgldSchedule FsgldSchedule::cyclic(int rounds, double eta, double beta,
                                    int minibatch_count) {
  if (rounds < 1 || minibatch_count < 1) {
    throw ConfigError("FsgldSchedule::cyclic: invalid sizes");
  }
  FsgldSchedule s;
  s.eta.assign(static_cast<std::size_t>(rounds), eta);
  s.beta.assign(static_cast<std::size_t>(rounds), beta);
  s.minibatch_index.resize(static_cast<std::size_t>(rounds));
  for (int t = 0; t < rounds; ++t) {
    s.minibatch_index[static_cast<std::size_t>(t)] = t % minibatch_count;
  }
  return s;
}

FsgldTrace run_fsgld(const Dataset& pool, const Dataset& test,
                     const FsgldConfig& config, const SurrogateGrad& grad) {
  (void)test;
  if (config.samples_per_client % config.minibatch_size != 0) {
    throw ConfigError("run_fsgld: n must be divisible by the minibatch size");
  }
  const int rounds = config.schedule.rounds();
  if (rounds < 1 ||
      config.schedule.beta.size() != static_cast<std::size_t>(rounds) ||
      config.schedule.minibatch_index.size() != static_cast<std::size_t>(rounds)) {
    throw ConfigError("run_fsgld: ragged schedule");
  }
  const int minibatch_count = config.samples_per_client / config.minibatch_size;

  ShardPlan plan{config.clients, config.samples_per_client,
                 child_seed(config.seed, "fsgld-shards")};
  const auto shards = shard(pool, plan);

  // Disjoint minibatches in shard order: j covers rows [j*b, (j+1)*b).
  const auto minibatch = [&](const Dataset& s, int j) {
    Dataset mb;
    mb.features = s.features.middleRows(j * config.minibatch_size, config.minibatch_size);
    mb.labels = s.labels.segment(j * config.minibatch_size, config.minibatch_size);
    return mb;
  };

  FsgldTrace trace;
  trace.schedule = config.schedule;
  trace.minibatch_count = minibatch_count;
  trace.grads.assign(static_cast<std::size_t>(config.clients), {});

  Hypothesis current;
  {
    Rng init_rng(child_seed(config.seed, "fsgld-init"));
    current.w = config.init_scale * init_rng.gaussian_vector(pool.dim());
  }
  trace.round_aggregates.push_back(current);

  std::vector<Rng> noise;
  noise.reserve(static_cast<std::size_t>(config.clients));
  for (int i = 0; i < config.clients; ++i) {
    noise.emplace_back(child_seed(config.seed, "fsgld-noise", static_cast<std::uint64_t>(i)));
  }

  std::vector<Hypothesis> locals(static_cast<std::size_t>(config.clients));
  for (int t = 0; t < rounds; ++t) {
    const int j = config.schedule.minibatch_index[static_cast<std::size_t>(t)];
    if (j < 0 || j >= minibatch_count) throw ConfigError("run_fsgld: minibatch index out of range");
    SgldStepParams step{config.schedule.eta[static_cast<std::size_t>(t)],
                        config.schedule.beta[static_cast<std::size_t>(t)]};
    for (int i = 0; i < config.clients; ++i) {
      const Dataset mb = minibatch(shards[static_cast<std::size_t>(i)], j);
      Eigen::VectorXd g = Eigen::VectorXd::Zero(current.dim());
      for (Eigen::Index r = 0; r < mb.size(); ++r) {
        g += grad(mb.features.row(r).transpose(), mb.labels[r], current.w);
      }
      g /= static_cast<double>(mb.size());
      if (!g.allFinite()) throw NumericError("run_fsgld: non-finite gradient");
      trace.grads[static_cast<std::size_t>(i)].push_back(g);

      Hypothesis& local = locals[static_cast<std::size_t>(i)];
      local.w = current.w - step.eta * g;
      if (!config.disable_noise) {
        local.w += std::sqrt(2.0 * step.eta / step.beta) *
                   noise[static_cast<std::size_t>(i)].gaussian_vector(current.dim());
      }
    }
    current = aggregate(locals);
    trace.round_aggregates.push_back(current);
  }

  trace.final_locals = locals;
  if (config.polyak_average) {
    Hypothesis polyak;
    polyak.w = Eigen::VectorXd::Zero(pool.dim());
    for (int t = 1; t <= rounds; ++t) polyak.w += trace.round_aggregates[static_cast<std::size_t>(t)].w;
    polyak.w /= static_cast<double>(rounds);
    trace.final_w = polyak;
  } else {
    trace.final_w = current;
  }
  return trace;
}

DsvmRunReport fsgld_risks(const FsgldTrace& trace,
                          const std::vector<Dataset>& shards,
                          const Dataset& test, std::uint64_t seed) {
  DsvmRunReport report;
  report.clients = static_cast<int>(shards.size());
  report.samples_per_client =
      shards.empty() ? 0 : static_cast<int>(shards.front().size());
  report.seed = seed;
  report.aggregate_w = trace.final_w;
  double local_risk = 0.0, agg_risk = 0.0;
  for (std::size_t i = 0; i < shards.size(); ++i) {
    local_risk += empirical_risk_zero_one(shards[i], trace.final_locals[i]);
    agg_risk += empirical_risk_zero_one(shards[i], trace.final_w);
    report.client_norms.push_back(trace.final_locals[i].norm());
  }
  const double k = static_cast<double>(shards.size());
  report.local_emp_risk = local_risk / k;
  report.agg_emp_risk = agg_risk / k;
  report.agg_emp_risk_margin = report.agg_emp_risk;
  report.pop_risk = population_risk_estimate(test, trace.final_w);
  report.gen_gap_theta = report.pop_risk - report.agg_emp_risk;
  report.delta_emp = report.agg_emp_risk - report.local_emp_risk;
  return report;
}

FsgldReplicaStudy run_fsgld_replicas(const Dataset& pool, const Dataset& test,
                                     const FsgldConfig& config,
                                     const SurrogateGrad& grad, int replicas,
                                     double sigma, std::uint64_t seed) {
  if (replicas < 2) throw ConfigError("run_fsgld_replicas: need >= 2 replicas");
  const int rounds = config.schedule.rounds();

  FsgldReplicaStudy study;
  std::vector<double> gaps;
  for (int r = 0; r < replicas; ++r) {
    FsgldConfig replica = config;
    replica.seed = child_seed(seed, "fsgld-replica", static_cast<std::uint64_t>(r));
    auto trace = run_fsgld(pool, test, replica, grad);
    ShardPlan plan{replica.clients, replica.samples_per_client,
                   child_seed(replica.seed, "fsgld-shards")};
    gaps.push_back(
        fsgld_risks(trace, shard(pool, plan), test, replica.seed).gen_gap_theta);
    study.traces.push_back(std::move(trace));
  }

  study.grad_variance.assign(
      static_cast<std::size_t>(config.clients),
      std::vector<double>(static_cast<std::size_t>(rounds), 0.0));
  for (int i = 0; i < config.clients; ++i) {
    for (int t = 0; t < rounds; ++t) {
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(pool.dim());
      for (const auto& trace : study.traces) {
        mean += trace.grads[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
      }
      mean /= static_cast<double>(replicas);
      double var = 0.0;
      for (const auto& trace : study.traces) {
        var += (trace.grads[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] - mean)
                   .squaredNorm();
      }
      study.grad_variance[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] =
          var / static_cast<double>(replicas - 1);
    }
  }

  study.bound_inputs.eta = config.schedule.eta;
  study.bound_inputs.beta = config.schedule.beta;
  study.bound_inputs.rounds_minibatch.assign(
      static_cast<std::size_t>(config.clients), config.schedule.minibatch_index);
  study.bound_inputs.grad_variance = study.grad_variance;
  study.bound_inputs.minibatch_count =
      config.samples_per_client / config.minibatch_size;
  study.bound_inputs.minibatch_size = config.minibatch_size;
  study.bound_inputs.samples_per_client = config.samples_per_client;
  study.bound_inputs.sigma = sigma;

  double mean = 0.0;
  for (const double g : gaps) mean += g;
  mean /= static_cast<double>(replicas);
  double var = 0.0;
  for (const double g : gaps) var += (g - mean) * (g - mean);
  study.mean_gen_gap = mean;
  study.gen_gap_std_err =
      std::sqrt(var / (static_cast<double>(replicas - 1) * replicas));
  return study;
}

std::vector<std::vector<double>> fsgld_variance_proxy(
    const Dataset& pool, const FsgldConfig& config, const FsgldTrace& trace,
    const SurrogateGrad& grad) {
  ShardPlan plan{config.clients, config.samples_per_client,
                 child_seed(config.seed, "fsgld-shards")};
  const auto shards = shard(pool, plan);
  const int rounds = trace.schedule.rounds();
  std::vector<std::vector<double>> proxy(
      static_cast<std::size_t>(config.clients),
      std::vector<double>(static_cast<std::size_t>(rounds), 0.0));
  for (int i = 0; i < config.clients; ++i) {
    for (int t = 0; t < rounds; ++t) {
      const int j = trace.schedule.minibatch_index[static_cast<std::size_t>(t)];
      const auto& wbar = trace.round_aggregates[static_cast<std::size_t>(t)].w;
      const Eigen::VectorXd& mean =
          trace.grads[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
      double scatter = 0.0;
      for (int r = 0; r < config.minibatch_size; ++r) {
        const Eigen::Index row = j * config.minibatch_size + r;
        scatter += (grad(shards[static_cast<std::size_t>(i)].features.row(row).transpose(),
                         shards[static_cast<std::size_t>(i)].labels[row], wbar) -
                    mean)
                       .squaredNorm();
      }
      // Variance of the minibatch mean from per-sample scatter.
      const double b = static_cast<double>(config.minibatch_size);
      proxy[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] =
          config.minibatch_size > 1 ? scatter / (b * (b - 1.0)) : scatter;
    }
  }
  return proxy;
}

LimitGapEstimate estimate_limit_gap(const Dataset& pool, const Dataset& test,
                                    int samples_per_client, const SgdParams& sgd,
                                    int replicas, std::uint64_t seed) {
  if (replicas < 2) throw ConfigError("estimate_limit_gap: need >= 2 replicas");
  std::vector<Hypothesis> hypotheses;
  std::vector<double> own_risks;
  for (int r = 0; r < replicas; ++r) {
    ShardPlan plan{1, samples_per_client, child_seed(seed, "limit-shard", static_cast<std::uint64_t>(r))};
    const auto shards = shard(pool, plan);
    SgdParams params = sgd;
    params.seed = child_seed(seed, "limit-train", static_cast<std::uint64_t>(r));
    const auto result = sgd_train_svm(shards.front(), params);
    hypotheses.push_back(result.hypothesis);
    own_risks.push_back(empirical_risk_zero_one(shards.front(), result.hypothesis));
  }

  const auto stat = [&](int skip) {
    Hypothesis mean;
    mean.w = Eigen::VectorXd::Zero(pool.dim());
    double emp = 0.0;
    int count = 0;
    for (int r = 0; r < replicas; ++r) {
      if (r == skip) continue;
      mean.w += hypotheses[static_cast<std::size_t>(r)].w;
      emp += own_risks[static_cast<std::size_t>(r)];
      ++count;
    }
    mean.w /= static_cast<double>(count);
    emp /= static_cast<double>(count);
    return std::pair<double, double>(population_risk_estimate(test, mean), emp);
  };

  LimitGapEstimate out;
  const auto [pop_all, emp_all] = stat(-1);
  out.pop_at_mean = pop_all;
  out.mean_emp = emp_all;
  out.value = pop_all - emp_all;

  // Delete-one jackknife over replicas.
  std::vector<double> loo;
  loo.reserve(static_cast<std::size_t>(replicas));
  double loo_mean = 0.0;
  for (int r = 0; r < replicas; ++r) {
    const auto [p, e] = stat(r);
    loo.push_back(p - e);
    loo_mean += loo.back();
  }
  loo_mean /= static_cast<double>(replicas);
  double ss = 0.0;
  for (const double v : loo) ss += (v - loo_mean) * (v - loo_mean);
  out.std_err = std::sqrt(ss * static_cast<double>(replicas - 1) /
                          static_cast<double>(replicas));
  return out;
}

namespace {

struct Moments {
  double mean = 0.0;
  double std_err = 0.0;
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  if (xs.empty()) return m;
  for (const double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (const double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.std_err = std::sqrt(ss / (static_cast<double>(xs.size() - 1) *
                                static_cast<double>(xs.size())));
  }
  return m;
}

}  // namespace

SweepTable run_sweep(const Dataset& pool, const Dataset& test,
                     const SweepConfig& config, const SgdParams& base_sgd) {
  if (config.repeats < 1) throw ConfigError("run_sweep: repeats >= 1 required");
  SweepTable table;

  const double feature_bound = config.feature_norm_bound.value_or(
      pool.features.rowwise().norm().maxCoeff());

  // Build the full task list first, then fan out; every task writes only
  // its own slot, so the table is independent of scheduling.
  std::vector<SweepRow> tasks;
  for (const int n : config.samples_grid) {
    for (const int k : config.clients_grid) {
      for (int rep = 0; rep < config.repeats; ++rep) {
        SweepRow row;
        row.experiment = "dsvm";
        row.clients = k;
        row.samples_per_client = n;
        row.repeat = rep;
        row.seed = child_seed(config.master_seed, "sweep",
                              (static_cast<std::uint64_t>(n) << 32) ^
                                  (static_cast<std::uint64_t>(k) << 8) ^
                                  static_cast<std::uint64_t>(rep));
        tasks.push_back(row);
        if (config.include_centralized) {
          row.experiment = "centralized";
          row.seed = child_seed(config.master_seed, "sweep-centralized",
                                (static_cast<std::uint64_t>(n) << 32) ^
                                    (static_cast<std::uint64_t>(k) << 8) ^
                                    static_cast<std::uint64_t>(rep));
          tasks.push_back(row);
        }
      }
    }
  }

  const auto run_task = [&](SweepRow& row) {
    if (row.experiment == "dsvm") {
      DsvmConfig run_config;
      run_config.clients = row.clients;
      run_config.samples_per_client = row.samples_per_client;
      run_config.theta = config.theta;
      run_config.sgd = base_sgd;
      run_config.seed = row.seed;
      row.report = run_dsvm(pool, test, run_config);
      if (config.fill_bounds && config.theta > 0.0) {
        const auto params = SvmBoundParams::fit_defaults(
            row.samples_per_client, row.clients, config.theta, feature_bound);
        row.bound_expected = dsvm_expected_bound(params);
        row.bound_tail = dsvm_tail_bound(params);
        row.bound_centralized = centralized_expected_bound(
            row.samples_per_client, row.clients, config.theta, feature_bound);
      }
    } else {
      row.report = run_centralized(pool, test,
                                   row.samples_per_client * row.clients,
                                   config.theta, base_sgd, row.seed);
    }
  };

  const int workers = std::max(1, config.threads);
  if (workers == 1) {
    for (auto& row : tasks) run_task(row);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) {
      threads.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < tasks.size();
             i = next.fetch_add(1)) {
          run_task(tasks[i]);
        }
      });
    }
    for (auto& t : threads) t.join();
  }
  table.rows = std::move(tasks);

  for (const int n : config.samples_grid) {
    for (const int k : config.clients_grid) {
      std::vector<double> gaps, pops, deltas;
      std::vector<double> c_gaps, c_pops;
      std::optional<double> bound_expected, bound_tail, bound_centralized;
      for (const auto& row : table.rows) {
        if (row.clients != k || row.samples_per_client != n) continue;
        if (row.experiment == "dsvm") {
          gaps.push_back(row.report.gen_gap_theta);
          pops.push_back(row.report.pop_risk);
          deltas.push_back(row.report.delta_emp);
          bound_expected = row.bound_expected;
          bound_tail = row.bound_tail;
          bound_centralized = row.bound_centralized;
        } else {
          c_gaps.push_back(row.report.gen_gap_theta);
          c_pops.push_back(row.report.pop_risk);
        }
      }

      SweepCell cell;
      cell.experiment = "dsvm";
      cell.clients = k;
      cell.samples_per_client = n;
      const auto g = moments(gaps);
      cell.mean_gen_gap = g.mean;
      cell.se_gen_gap = g.std_err;
      const auto p = moments(pops);
      cell.mean_pop_risk = p.mean;
      cell.se_pop_risk = p.std_err;
      const auto d = moments(deltas);
      cell.mean_delta_emp = d.mean;
      cell.se_delta_emp = d.std_err;
      cell.bound_expected = bound_expected;
      cell.bound_tail = bound_tail;
      cell.bound_centralized = bound_centralized;
      table.cells.push_back(cell);

      if (config.include_centralized) {
        SweepCell ccell;
        ccell.experiment = "centralized";
        ccell.clients = k;
        ccell.samples_per_client = n;
        const auto cg = moments(c_gaps);
        ccell.mean_gen_gap = cg.mean;
        ccell.se_gen_gap = cg.std_err;
        const auto cp = moments(c_pops);
        ccell.mean_pop_risk = cp.mean;
        ccell.se_pop_risk = cp.std_err;
        table.cells.push_back(ccell);
      }
    }
  }
  return table;
}

}  // namespace distgen
