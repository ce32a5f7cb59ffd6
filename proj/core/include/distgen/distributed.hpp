#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "distgen/bounds.hpp"
#include "distgen/dataset.hpp"
#include "distgen/features.hpp"
#include "distgen/learners.hpp"

namespace distgen {

// Coordinate-wise mean, summed in client order. Order-independence of the
// caller is guaranteed by sorting inputs by client id upstream.
Hypothesis aggregate(const std::vector<Hypothesis>& hypotheses);

struct DsvmRunReport {
  int clients = 0;             // K
  int samples_per_client = 0;  // n
  std::vector<double> client_norms;
  Hypothesis aggregate_w;
  double gen_gap_theta = 0.0;       // pop_risk - agg_emp_risk_margin
  double local_emp_risk = 0.0;      // (1/K) sum_i 0-1 risk of W_i on own shard
  double agg_emp_risk = 0.0;        // (1/K) sum_i 0-1 risk of Wbar on shard i
  double agg_emp_risk_margin = 0.0; // same with the theta-margin loss
  double pop_risk = 0.0;            // 0-1 risk of Wbar on the test set
  double delta_emp = 0.0;           // agg_emp_risk - local_emp_risk
  std::uint64_t seed = 0;
};

struct DsvmConfig {
  int clients = 1;
  int samples_per_client = 1;
  double theta = 0.0;
  SgdParams sgd;
  std::uint64_t seed = 0;
};

// One-round protocol: shard, train K clients on per-client seed streams,
// average, measure. pool and test carry already-mapped features.
DsvmRunReport run_dsvm(const Dataset& pool, const Dataset& test,
                       const DsvmConfig& config);

// Identical but mapping pool/test through the feature map first.
DsvmRunReport run_dsvm(const Dataset& pool, const Dataset& test,
                       const RffMap& features, const DsvmConfig& config);

// The K=1 baseline trained on n*K samples.
DsvmRunReport run_centralized(const Dataset& pool, const Dataset& test,
                              int total_samples, double theta,
                              const SgdParams& sgd, std::uint64_t seed);

// ---- Federated SGLD ----

struct FsgldSchedule {
  std::vector<double> eta;
  std::vector<double> beta;
  // j_t per round, 0-based, shared by all clients (cyclic by default).
  std::vector<int> minibatch_index;

  static FsgldSchedule cyclic(int rounds, double eta, double beta,
                              int minibatch_count);
  int rounds() const { return static_cast<int>(eta.size()); }
};

struct FsgldConfig {
  int clients = 1;
  int samples_per_client = 1;  // must be divisible by minibatch_size
  int minibatch_size = 1;      // b
  FsgldSchedule schedule;
  bool polyak_average = true;  // final hypothesis: mean of round aggregates
  double init_scale = 0.0;     // Wbar_0 ~ init_scale * N(0, I)
  bool disable_noise = false;  // for deterministic checks
  std::uint64_t seed = 0;
};

struct FsgldTrace {
  FsgldSchedule schedule;
  std::vector<Hypothesis> round_aggregates;  // Wbar_0 .. Wbar_T
  // grads[i][t]: the minibatch-mean surrogate gradient client i used at
  // round t (on minibatch schedule.minibatch_index[t]).
  std::vector<std::vector<Eigen::VectorXd>> grads;
  std::vector<Hypothesis> final_locals;  // W_{i,T}
  Hypothesis final_w;
  int minibatch_count = 1;
};

FsgldTrace run_fsgld(const Dataset& pool, const Dataset& test,
                     const FsgldConfig& config, const SurrogateGrad& grad);

// Risks of the final FSGLD hypothesis, reported in the DSVM layout with
// theta = 0 (local risks use the last-round local iterates).
DsvmRunReport fsgld_risks(const FsgldTrace& trace,
                          const std::vector<Dataset>& shards,
                          const Dataset& test, std::uint64_t seed);

// Across-replica estimate of Var(grad) per (client, round), Bessel
// corrected. All replicas share the schedule; data, init and noise are
// redrawn per replica from the derived seeds.
struct FsgldReplicaStudy {
  std::vector<FsgldTrace> traces;
  std::vector<std::vector<double>> grad_variance;  // [client][round]
  FsgldBoundInputs bound_inputs;
  double mean_gen_gap = 0.0;
  double gen_gap_std_err = 0.0;
};

FsgldReplicaStudy run_fsgld_replicas(const Dataset& pool, const Dataset& test,
                                     const FsgldConfig& config,
                                     const SurrogateGrad& grad, int replicas,
                                     double sigma, std::uint64_t seed);

// Cheap within-run proxy for the gradient variance: per-sample scatter
// around the minibatch mean, scaled to the minibatch-mean variance.
std::vector<std::vector<double>> fsgld_variance_proxy(
    const Dataset& pool, const FsgldConfig& config, const FsgldTrace& trace,
    const SurrogateGrad& grad);

// ---- Bias term and sweeps ----

struct LimitGapEstimate {
  double value = 0.0;     // pop risk at the mean hypothesis - mean own risk
  double std_err = 0.0;   // delete-one jackknife
  double pop_at_mean = 0.0;
  double mean_emp = 0.0;
};

// Trains `replicas` independent clients on fresh shards of size n and
// estimates the large-K limit of the empirical-risk bias term.
LimitGapEstimate estimate_limit_gap(const Dataset& pool, const Dataset& test,
                                    int samples_per_client,
                                    const SgdParams& sgd, int replicas,
                                    std::uint64_t seed);

struct SweepConfig {
  std::vector<int> clients_grid;
  std::vector<int> samples_grid;
  int repeats = 10;
  std::uint64_t master_seed = 0;
  double theta = 0.2;
  bool include_centralized = true;
  bool fill_bounds = true;
  // B for the bound columns; when unset, the max feature norm of the pool.
  std::optional<double> feature_norm_bound;
  // Worker threads for the replicate fan-out. Results are written into
  // per-task slots and reduced in task order, so the output is identical
  // for any thread count.
  int threads = 1;
};

struct SweepRow {
  std::string experiment;  // "dsvm" or "centralized"
  int clients = 0;
  int samples_per_client = 0;
  int repeat = 0;
  std::uint64_t seed = 0;
  DsvmRunReport report;
  std::optional<double> bound_expected;
  std::optional<double> bound_tail;
  std::optional<double> bound_centralized;
};

struct SweepCell {
  std::string experiment;
  int clients = 0;
  int samples_per_client = 0;
  double mean_gen_gap = 0.0, se_gen_gap = 0.0;
  double mean_pop_risk = 0.0, se_pop_risk = 0.0;
  double mean_delta_emp = 0.0, se_delta_emp = 0.0;
  std::optional<double> bound_expected;
  std::optional<double> bound_tail;
  std::optional<double> bound_centralized;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  std::vector<SweepCell> cells;
};

SweepTable run_sweep(const Dataset& pool, const Dataset& test,
                     const SweepConfig& config, const SgdParams& base_sgd);

}  // namespace distgen
