#pragma once

#include <optional>
#include <vector>

namespace distgen {

// Parameter tuple feeding the distributed-SVM bound formulas. The
// fit_defaults() choice is
//   m  = ceil(112 * (B/(K*theta))^2 * ln(n*K*sqrt(K)))
//   c1 = c2 = sqrt(K^2*theta^2 / (20*B^2) + 1)
//   nu = 1 / (2*c1)
// with subgaussian parameter sigma = 1 for binary classification.
struct SvmBoundParams {
  int n = 1;        // samples per client
  int clients = 1;  // K
  double feature_norm_bound = 1.0;  // B, with P(||X|| <= B) = 1
  double margin = 0.2;              // theta > 0
  double delta = 0.05;              // tail bound confidence, in (0,1)
  int jl_dim = 1;                   // m >= 1
  double c1 = 1.0;
  double c2 = 1.0;
  double nu = 0.5;
  double sigma = 1.0;
  // When set, the residual-noise term is zeroed whenever
  // K*theta / (4*c1*nu*B) >= 1 (the event has probability zero there).
  bool tight_term2 = false;

  static SvmBoundParams fit_defaults(int n, int clients, double margin,
                                     double feature_norm_bound,
                                     double delta = 0.05, double sigma = 1.0);
};

// The four-term compression distortion level epsilon:
//   term1 = 8 exp(-(m/7) (K theta / (4B))^2)
//   term2 = (2m nu^m / sqrt(pi)) exp(-((m+1)/2) (K theta / (4 c1 nu B))^2)
//   term3 = 4 exp(-0.21 m (c1^2 - 1))
//   term4 = 4 exp(-0.21 m (c2^2 - 1))
// term2 is assembled in log space (nu^m underflows for m in the hundreds);
// term2_log carries the exponent even when the value itself underflows.
struct EpsilonBreakdown {
  double term1 = 0.0;
  double term2 = 0.0;
  double term3 = 0.0;
  double term4 = 0.0;
  double total = 0.0;
  double term2_log = 0.0;
};

EpsilonBreakdown epsilon_terms(const SvmBoundParams& p);

// m * ln((c2 + nu) / nu), in nats.
double dsvm_rate_term(const SvmBoundParams& p);

// sqrt(2 sigma^2 (rate + ln(1/delta)) / n) + epsilon.
double dsvm_tail_bound(const SvmBoundParams& p);

// sqrt(2 sigma^2 rate / n) + epsilon.
double dsvm_expected_bound(const SvmBoundParams& p);

// The same bounds evaluated at (K <- 1, n <- n*K) with refit defaults.
double centralized_expected_bound(int n, int clients, double margin,
                                  double feature_norm_bound, double sigma = 1.0);
double centralized_tail_bound(int n, int clients, double margin,
                              double feature_norm_bound, double delta,
                              double sigma = 1.0);

// Deterministic coordinate-descent search over (m, c1, c2, nu) minimizing
// the expected bound (or the tail bound when delta is given). The default
// parameter point is always part of the search, so the returned value never
// exceeds the default-parameter value.
struct SvmBoundSearchResult {
  SvmBoundParams params;
  double value = 0.0;
};
SvmBoundSearchResult optimize_svm_bound(int n, int clients, double margin,
                                        double feature_norm_bound,
                                        std::optional<double> delta = std::nullopt,
                                        double sigma = 1.0);

// min(2 * cbrt(2 L sigma^2 sigma_W^2 / (n K^2)), 2 L sigma_W^2 / K^2) for
// deterministic local algorithms with Lipschitz loss.
struct LipschitzBoundParams {
  double lipschitz = 1.0;       // L > 0
  double sigma = 1.0;           // subgaussian parameter
  double hypothesis_var = 1.0;  // sigma_W^2
  int n = 1;
  int clients = 1;
};
double lipschitz_expected_bound(const LipschitzBoundParams& p);

// Inputs for the federated-SGLD bound
//   (sqrt(2b) sigma / (2 n K sqrt(K)))
//     * sum_j sum_i sqrt(sum_{t in T_ij} beta_t eta_t Var_{i,t})
// where T_ij collects the rounds at which client i used minibatch j.
// grad_variance[i][t] estimates Var(grad of the surrogate at round t for
// client i); rounds_minibatch[i][t] gives j_t (0-based).
struct FsgldBoundInputs {
  std::vector<double> eta;
  std::vector<double> beta;
  std::vector<std::vector<int>> rounds_minibatch;   // [client][round]
  std::vector<std::vector<double>> grad_variance;   // [client][round]
  int minibatch_count = 1;                          // m = n / b
  int minibatch_size = 1;                           // b
  int samples_per_client = 1;                       // n
  double sigma = 1.0;
};
double fsgld_bound(const FsgldBoundInputs& in);

}  // namespace distgen
