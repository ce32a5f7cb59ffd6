#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

namespace distgen {

// All rates are in nats.

struct FinitePmf {
  std::vector<double> probs;

  int size() const { return static_cast<int>(probs.size()); }
  // Throws ConfigError unless entries are nonnegative and sum to 1 within tol.
  void validate(double tol = 1e-12) const;

  static FinitePmf uniform(int n);
};

// Classic lossy-compression instance: finite source, |X| x |Xhat|
// distortion matrix. At least one column must have finite expected
// distortion (guaranteed here since all entries are required finite).
struct RdInstance {
  FinitePmf source;
  Eigen::MatrixXd distortion;
};

struct BaPoint {
  double rate = 0.0;
  double distortion = 0.0;
  int iterations = 0;
  // Remaining dual sandwich gap ln(max c); the rate of the returned joint
  // is within this of the optimum for its slope.
  double dual_gap = 0.0;
};

// Alternating minimization at a fixed Lagrange slope s <= 0. Stops when the
// dual sandwich gap ln(max c) drops below tol; throws NumericError carrying
// the last iterate when max_iter is exhausted.
BaPoint blahut_arimoto(const RdInstance& inst, double slope, double tol = 1e-10,
                       int max_iter = 100000);

struct RdSolveOptions {
  double tol = 1e-6;       // rate accuracy of the bisection sandwich
  double ba_tol = 1e-10;   // inner BA dual gap
  int ba_max_iter = 100000;
  int max_bisect = 200;
};

// R(D) at the distortion target, via bisection over the slope. Monotone
// nonincreasing in the target; throws NumericError("infeasible") below the
// minimum achievable distortion.
double rd_at_distortion(const RdInstance& inst, double target_distortion,
                        const RdSolveOptions& opts = {});

// Lossy algorithm-compressibility instance. joint is Q over (s, w); gen and
// gen_hat tabulate the generalization gap under the original and compressed
// hypothesis alphabets. The rate at level eps is the classic RD rate of the
// source Q_S with distortion -gen_hat at target eps - E_Q[gen].
struct AlgorithmRdInstance {
  Eigen::MatrixXd joint;    // |S| x |W|
  Eigen::MatrixXd gen;      // |S| x |W|
  Eigen::MatrixXd gen_hat;  // |S| x |What|
};

double algorithm_rd(const AlgorithmRdInstance& inst, double epsilon,
                    const RdSolveOptions& opts = {});

// Conditional variant: the compressed hypothesis may depend on the
// conditioning value u (the peers' outputs) and the mutual information is
// conditional on it. The single averaged distortion constraint couples the
// per-u subproblems, handled by one shared slope with per-u inner solves.
struct ConditionalRdInstance {
  Eigen::MatrixXd joint_su;              // |S| x |U|
  Eigen::MatrixXd gen_bar;               // |S| x |U|: E[gen(s, Wbar) | s, u]
  std::vector<Eigen::MatrixXd> gen_hat;  // per u: |S| x |What|
};

double conditional_algorithm_rd(const ConditionalRdInstance& inst,
                                double epsilon, const RdSolveOptions& opts = {});

// Grid search over distributions Q with KL(Q || P) <= ln(1/delta),
// maximizing the conditional rate. Candidates are mixtures of P with point
// masses on support atoms; the result is a lower estimate of the true sup
// whose quality improves as mixture_steps grows (doubling the steps never
// decreases the reported value).
struct RobustGridSpec {
  int mixture_steps = 8;
  int max_support = 16;
};

double robust_rd(const ConditionalRdInstance& base, double delta,
                 double epsilon, const RobustGridSpec& spec = {},
                 const RdSolveOptions& opts = {});

// Enumerable one-round distributed toy: i.i.d. data, deterministic local
// rules and aggregator, finite loss table. Used to evaluate the two-term
// in-expectation bounds exactly.
struct DistributedToy {
  FinitePmf data_pmf;  // mu over |Z|
  int samples_per_client = 1;
  int clients = 1;
  // Maps a client's dataset (vector of n atom indices) to a hypothesis index.
  std::function<int(const std::vector<int>&)> local_rule;
  int hypothesis_count = 1;
  // Maps (w_1, ..., w_K) to the aggregate hypothesis index.
  std::function<int(const std::vector<int>&)> aggregate_rule;
  int aggregate_count = 1;
  Eigen::MatrixXd loss;  // |Z| x |Wbar|, reused for the compressed alphabet
};

struct Theorem4Result {
  double per_sample_marginal = 0.0;     // (1/n)[(1/K) sum_ij sqrt(2 s^2 RD) + eps]
  double per_sample_conditional = 0.0;  // (1/n)[sum_j sqrt(2 s^2 max_i cRD) + eps]
  double eq7 = 0.0;                     // min of the two above
  double dataset_marginal = 0.0;        // (1/sqrt(n))[sqrt(2 s^2 RD / K) + eps]
  double dataset_conditional = 0.0;     // (1/sqrt(n))[sqrt(2 s^2 max_i cRD) + eps]
  double eq8 = 0.0;
};

Theorem4Result theorem4_bounds(const DistributedToy& toy, double sigma,
                               double epsilon, const RdSolveOptions& opts = {});

// Exact joint of (Z_{i,j}, Wbar) for the toy, as an algorithm-RD instance.
// Exposed for tests that compare against direct mutual-information values.
AlgorithmRdInstance toy_per_sample_instance(const DistributedToy& toy,
                                            int client, int sample);

// Mutual information of a joint pmf matrix, in nats.
double mutual_information(const Eigen::MatrixXd& joint);

}  // namespace distgen
