#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "distgen/bounds.hpp"
#include "distgen/dataset.hpp"
#include "distgen/features.hpp"
#include "distgen/learners.hpp"
#include "distgen/rng.hpp"

namespace distgen {

// Parameters of the compressed-hypothesis construction. Shared defaults
// with SvmBoundParams (same m, c1, c2, nu, theta, B, K).
struct CompressionParams {
  int jl_dim = 1;       // m
  double c1 = 1.0;
  double c2 = 1.0;
  double nu = 0.5;      // ball-noise radius
  double margin = 0.2;  // theta
  double feature_norm_bound = 1.0;  // B
  int clients = 1;      // K

  static CompressionParams from_bound_params(const SvmBoundParams& p);
};

// One client's compressed hypothesis: the owner's block is JL-projected to
// m dimensions and dithered on a nu-ball; the peers are carried verbatim.
struct CompressedHypothesis {
  Eigen::VectorXd own_block;         // m-dimensional
  std::vector<Hypothesis> peers;     // K-1 untouched hypotheses
  int owner = 0;
  const JlMatrix* projection = nullptr;
};

// Uniform draw from the m-ball of the given radius: normalized Gaussian
// direction, radius scaled by U^(1/m).
Eigen::VectorXd sample_uniform_ball(Eigen::Index dim, double radius, Rng& rng);

// own_block = A^T w_i + ball noise when ||A^T w_i|| <= c2, otherwise ball
// noise around the origin. ||own_block|| <= c2 + nu always.
CompressedHypothesis compress(const Hypothesis& own,
                              const std::vector<Hypothesis>& peers,
                              const JlMatrix& projection,
                              const CompressionParams& params, Rng& rng);

// (<A^T x, own_block> + sum_peers <x, w_j>) / K.
double compressed_score(const Eigen::VectorXd& x, const CompressedHypothesis& ch);

// 1 iff y * compressed_score < theta / 2.
int compressed_loss(const Eigen::VectorXd& x, double y,
                    const CompressedHypothesis& ch, double theta);

// Monte Carlo estimate of the two-term distortion
//   D_A = E_pop 1{ |<X, w_i> - <A^T X, own>| / K > theta/2 }
//       + E_shard (1/n) sum_j 1{ ... }
// with fresh ball noise per draw. population stands in for the unknown
// data law; shard is the client's own sample.
struct DistortionEstimate {
  double value = 0.0;
  double std_err = 0.0;
  double population_term = 0.0;
  double empirical_term = 0.0;
};

DistortionEstimate estimate_distortion(const Dataset& population,
                                       const Dataset& shard,
                                       const Hypothesis& own,
                                       const JlMatrix& projection,
                                       const CompressionParams& params,
                                       int mc_samples, std::uint64_t seed);

// Data model for the distortion validation: Gaussian features scaled to a
// typical norm below B and clipped onto the B-ball, labels by a fixed
// direction. Hypotheses are unit-norm random directions.
struct ValidationModel {
  int dim = 64;
  double feature_norm_bound = 1.0;  // B
  double typical_norm = 0.7;        // pre-clip norm scale, as a fraction of B
};

struct DistortionGridPoint {
  CompressionParams params;
  double empirical_mean = 0.0;   // mean over sampled projections of D_A
  double std_err = 0.0;          // across-projection standard error
  double analytic_epsilon = 0.0;
  bool pass = false;             // empirical - 2 SE <= analytic
  // Per-term diagnostics matching the four-way split of D_A.
  double term1 = 0.0;  // inner-product perturbation by A^T A
  double term2 = 0.0;  // ball-noise perturbation, conditioned on the norms
  double term3 = 0.0;  // 2 P(||A^T X|| >= c1 B)
  double term4 = 0.0;  // 2 P(||A^T W|| >= c2)
};

struct Lemma3Report {
  std::vector<DistortionGridPoint> points;
  bool all_pass = false;
};

Lemma3Report validate_lemma3(const std::vector<CompressionParams>& grid,
                             const ValidationModel& model, int mc_samples,
                             int matrix_samples, std::uint64_t seed);

}  // namespace distgen
