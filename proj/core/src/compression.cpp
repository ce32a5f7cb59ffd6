#include "distgen/compression.hpp"

#include <cmath>

#include "distgen/errors.hpp"

namespace distgen {

CompressionParams CompressionParams::from_bound_params(const SvmBoundParams& p) {
  CompressionParams out;
  out.jl_dim = p.jl_dim;
  out.c1 = p.c1;
  out.c2 = p.c2;
  out.nu = p.nu;
  out.margin = p.margin;
  out.feature_norm_bound = p.feature_norm_bound;
  out.clients = p.clients;
  return out;
}

Eigen::VectorXd sample_uniform_ball(Eigen::Index dim, double radius, Rng& rng) {
  if (dim < 1 || radius <= 0.0) {
    throw ConfigError("sample_uniform_ball: dim >= 1 and radius > 0 required");
  }
  Eigen::VectorXd direction = rng.gaussian_vector(dim);
  double norm = direction.norm();
  while (norm == 0.0) {
    direction = rng.gaussian_vector(dim);
    norm = direction.norm();
  }
  const double u = rng.uniform();
  const double r = radius * std::pow(u, 1.0 / static_cast<double>(dim));
  return direction * (r / norm);
}

CompressedHypothesis compress(const Hypothesis& own,
                              const std::vector<Hypothesis>& peers,
                              const JlMatrix& projection,
                              const CompressionParams& params, Rng& rng) {
  if (own.dim() != projection.input_dim()) {
    throw ConfigError("compress: hypothesis dimension mismatch");
  }
  CompressedHypothesis out;
  out.peers = peers;
  out.projection = &projection;
  const Eigen::VectorXd projected = projection.project(own.w);
  const Eigen::VectorXd noise =
      sample_uniform_ball(projection.target_dim(), params.nu, rng);
  out.own_block = projected.norm() <= params.c2 ? projected + noise : noise;
  return out;
}

double compressed_score(const Eigen::VectorXd& x, const CompressedHypothesis& ch) {
  if (ch.projection == nullptr) throw ConfigError("compressed_score: missing projection");
  double total = ch.projection->project(x).dot(ch.own_block);
  for (const auto& peer : ch.peers) total += peer.score(x);
  return total / static_cast<double>(ch.peers.size() + 1);
}

int compressed_loss(const Eigen::VectorXd& x, double y,
                    const CompressedHypothesis& ch, double theta) {
  return y * compressed_score(x, ch) < theta / 2.0 ? 1 : 0;
}

DistortionEstimate estimate_distortion(const Dataset& population,
                                       const Dataset& shard,
                                       const Hypothesis& own,
                                       const JlMatrix& projection,
                                       const CompressionParams& params,
                                       int mc_samples, std::uint64_t seed) {
  if (mc_samples < 100) throw ConfigError("estimate_distortion: mc_samples >= 100 required");
  if (population.size() == 0 || shard.size() == 0) {
    throw ConfigError("estimate_distortion: empty data");
  }
  Rng rng(child_seed(seed, "distortion"));
  const double threshold = params.margin / 2.0;
  const double k = static_cast<double>(params.clients);
  const Eigen::VectorXd projected = projection.project(own.w);
  const bool in_ball = projected.norm() <= params.c2;

  // Projections do not depend on the noise draw; hoist them.
  const Eigen::MatrixXd pop_proj = population.features * projection.entries();
  const Eigen::VectorXd pop_own = population.features * own.w;
  const Eigen::MatrixXd shard_proj = shard.features * projection.entries();
  const Eigen::VectorXd shard_own = shard.features * own.w;

  long long pop_hits = 0;
  double pop_sq = 0.0, emp_mean_sum = 0.0, emp_sq = 0.0;
  for (int s = 0; s < mc_samples; ++s) {
    const Eigen::VectorXd noise =
        sample_uniform_ball(projection.target_dim(), params.nu, rng);
    const Eigen::VectorXd own_block = in_ball ? (projected + noise).eval() : noise;

    const auto pop_row = static_cast<Eigen::Index>(
        rng.next_u64() % static_cast<std::uint64_t>(population.size()));
    const double pop_gap =
        (pop_own[pop_row] - pop_proj.row(pop_row).dot(own_block)) / k;
    const int pop_hit = std::abs(pop_gap) > threshold ? 1 : 0;
    pop_hits += pop_hit;
    pop_sq += pop_hit;

    // Empirical term: average over the whole shard for this noise draw.
    const Eigen::VectorXd gaps = (shard_own - shard_proj * own_block) / k;
    const double shard_mean =
        static_cast<double>((gaps.array().abs() > threshold).count()) /
        static_cast<double>(shard.size());
    emp_mean_sum += shard_mean;
    emp_sq += shard_mean * shard_mean;
  }

  DistortionEstimate out;
  const double draws = static_cast<double>(mc_samples);
  out.population_term = static_cast<double>(pop_hits) / draws;
  out.empirical_term = emp_mean_sum / draws;
  out.value = out.population_term + out.empirical_term;
  const double pop_var =
      std::max(0.0, pop_sq / draws - out.population_term * out.population_term);
  const double emp_var =
      std::max(0.0, emp_sq / draws - out.empirical_term * out.empirical_term);
  out.std_err = std::sqrt((pop_var + emp_var) / draws);
  return out;
}

Lemma3Report validate_lemma3(const std::vector<CompressionParams>& grid,
                             const ValidationModel& model, int mc_samples,
                             int matrix_samples, std::uint64_t seed) {
  if (matrix_samples < 2) throw ConfigError("validate_lemma3: need >= 2 matrices");
  Lemma3Report report;
  report.all_pass = true;

  for (std::size_t g = 0; g < grid.size(); ++g) {
    const CompressionParams& params = grid[g];
    SvmBoundParams bound;
    bound.n = 1;
    bound.clients = params.clients;
    bound.feature_norm_bound = params.feature_norm_bound;
    bound.margin = params.margin;
    bound.jl_dim = params.jl_dim;
    bound.c1 = params.c1;
    bound.c2 = params.c2;
    bound.nu = params.nu;

    DistortionGridPoint point;
    point.params = params;
    point.analytic_epsilon = epsilon_terms(bound).total;

    Rng model_rng(child_seed(seed, "lemma3-model", static_cast<std::uint64_t>(g)));
    const double scale =
        model.typical_norm * model.feature_norm_bound / std::sqrt(static_cast<double>(model.dim));

    // Bounded data model: scaled Gaussians clipped onto the B-ball.
    const auto draw_x = [&](Rng& rng) {
      Eigen::VectorXd x = scale * rng.gaussian_vector(model.dim);
      const double norm = x.norm();
      if (norm > model.feature_norm_bound) x *= model.feature_norm_bound / norm;
      return x;
    };

    Dataset population;
    population.features.resize(mc_samples, model.dim);
    population.labels = Eigen::VectorXd::Ones(mc_samples);
    for (int i = 0; i < mc_samples; ++i) {
      population.features.row(i) = draw_x(model_rng).transpose();
    }
    Dataset shard;
    const int shard_size = 64;
    shard.features.resize(shard_size, model.dim);
    shard.labels = Eigen::VectorXd::Ones(shard_size);
    for (int i = 0; i < shard_size; ++i) {
      shard.features.row(i) = draw_x(model_rng).transpose();
    }
    Hypothesis own;
    own.w = model_rng.gaussian_vector(model.dim);
    own.w.normalize();

    double sum = 0.0, sum_sq = 0.0;
    double mc_var_sum = 0.0;
    long long t1_hits = 0, t2_hits = 0, t2_draws = 0, t3_hits = 0, t4_hits = 0;
    long long diag_draws = 0;
    for (int a = 0; a < matrix_samples; ++a) {
      const std::uint64_t mseed =
          child_seed(seed, "lemma3-matrix", static_cast<std::uint64_t>(g) * 1000 + a);
      JlMatrix projection(model.dim, params.jl_dim, mseed);
      const auto est = estimate_distortion(population, shard, own, projection,
                                           params, mc_samples, mseed);
      sum += est.value;
      sum_sq += est.value * est.value;
      mc_var_sum += est.std_err * est.std_err;

      // Per-term diagnostics on fresh draws.
      Rng diag_rng(child_seed(mseed, "diag"));
      const Eigen::VectorXd proj_w = projection.project(own.w);
      for (int s = 0; s < mc_samples / 10 + 1; ++s) {
        const Eigen::VectorXd x = draw_x(diag_rng);
        const Eigen::VectorXd proj_x = projection.project(x);
        const double k = static_cast<double>(params.clients);
        if (std::abs(own.score(x) - proj_x.dot(proj_w)) / k > params.margin / 4.0) ++t1_hits;
        if (proj_x.norm() <= params.c1 * params.feature_norm_bound &&
            proj_w.norm() <= params.c2) {
          const Eigen::VectorXd noise =
              sample_uniform_ball(params.jl_dim, params.nu, diag_rng);
          if (std::abs(proj_x.dot(noise)) / k > params.margin / 4.0) ++t2_hits;
          ++t2_draws;
        }
        if (proj_x.norm() >= params.c1 * params.feature_norm_bound) ++t3_hits;
        if (proj_w.norm() >= params.c2) ++t4_hits;
        ++diag_draws;
      }
    }

    const double m_count = static_cast<double>(matrix_samples);
    point.empirical_mean = sum / m_count;
    const double across_var =
        std::max(0.0, sum_sq / m_count - point.empirical_mean * point.empirical_mean);
    // Across-matrix spread plus the averaged within-matrix MC noise.
    point.std_err =
        std::sqrt(across_var / m_count + mc_var_sum / (m_count * m_count));
    point.pass = point.empirical_mean - 2.0 * point.std_err <= point.analytic_epsilon;

    const double dd = static_cast<double>(diag_draws);
    point.term1 = 2.0 * static_cast<double>(t1_hits) / dd;
    point.term2 = t2_draws > 0 ? 2.0 * static_cast<double>(t2_hits) /
                                     static_cast<double>(t2_draws)
                               : 0.0;
    point.term3 = 2.0 * static_cast<double>(t3_hits) / dd;
    point.term4 = 2.0 * static_cast<double>(t4_hits) / dd;

    report.all_pass = report.all_pass && point.pass;
    report.points.push_back(std::move(point));
  }
  return report;
}

}  // namespace distgen
