#include "distgen/rate_distortion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "distgen/errors.hpp"

namespace distgen {

namespace {

constexpr double kTiny = 1e-300;

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace

void FinitePmf::validate(double tol) const {
  double sum = 0.0;
  for (const double p : probs) {
    if (p < 0.0 || !std::isfinite(p)) throw ConfigError("FinitePmf: negative or non-finite mass");
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol) {
    throw ConfigError("FinitePmf: probabilities sum to " + std::to_string(sum));
  }
}

FinitePmf FinitePmf::uniform(int n) {
  FinitePmf pmf;
  pmf.probs.assign(static_cast<std::size_t>(n), 1.0 / static_cast<double>(n));
  return pmf;
}

double mutual_information(const Eigen::MatrixXd& joint) {
  const Eigen::VectorXd row = joint.rowwise().sum();
  const Eigen::VectorXd col = joint.colwise().sum();
  double mi = 0.0;
  for (Eigen::Index i = 0; i < joint.rows(); ++i) {
    for (Eigen::Index j = 0; j < joint.cols(); ++j) {
      const double p = joint(i, j);
      if (p > 0.0) mi += p * std::log(p / (row[i] * col[j]));
    }
  }
  return std::max(0.0, mi);
}

namespace {

// Core alternating-minimization loop. Runs until the dual sandwich gap
// ln(max c) falls below tol or max_iter is reached, then reports the exact
// (rate, distortion) of the final joint together with the remaining gap.
BaPoint ba_iterate(const RdInstance& inst, double slope, double tol,
                   int max_iter) {
  inst.source.validate();
  if (slope > 0.0) throw ConfigError("blahut_arimoto: slope must be <= 0");
  if (!inst.distortion.allFinite()) throw ConfigError("blahut_arimoto: non-finite distortion");
  const Eigen::Index nx = inst.distortion.rows();
  const Eigen::Index nr = inst.distortion.cols();
  if (nx != static_cast<Eigen::Index>(inst.source.size()) || nr < 1) {
    throw ConfigError("blahut_arimoto: shape mismatch");
  }

  Eigen::Map<const Eigen::VectorXd> p(inst.source.probs.data(), nx);

  // Row-shifted exponential weights keep exp() in range at steep slopes.
  Eigen::MatrixXd weight(nx, nr);
  for (Eigen::Index i = 0; i < nx; ++i) {
    const double row_min = inst.distortion.row(i).minCoeff();
    weight.row(i) = ((inst.distortion.row(i).array() - row_min) * slope).exp();
  }

  Eigen::VectorXd q = Eigen::VectorXd::Constant(nr, 1.0 / static_cast<double>(nr));
  Eigen::VectorXd z(nx), c(nr), q_next(nr);

  BaPoint out;
  out.dual_gap = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= max_iter; ++iter) {
    z = weight * q;
    // c(xhat) = sum_x p(x) w(x,xhat) / z(x); the dual gap is ln(max c).
    c = weight.transpose() * (p.array() / z.array().max(kTiny)).matrix();
    double cmax = 0.0;
    for (Eigen::Index j = 0; j < nr; ++j) {
      if (q[j] > 0.0) cmax = std::max(cmax, c[j]);
    }
    q_next = q.array() * c.array();
    q = q_next / q_next.sum();
    out.iterations = iter;
    out.dual_gap = std::max(0.0, std::log(std::max(cmax, kTiny)));
    if (out.dual_gap < tol) break;
  }

  // Final conditional and its exact rate/distortion.
  z = weight * q;
  Eigen::MatrixXd cond = weight.array().rowwise() * q.transpose().array();
  cond = cond.array().colwise() / z.array().max(kTiny);
  Eigen::MatrixXd joint = cond.array().colwise() * p.array();
  out.rate = mutual_information(joint);
  out.distortion = (joint.array() * inst.distortion.array()).sum();
  return out;
}

}  // namespace

BaPoint blahut_arimoto(const RdInstance& inst, double slope, double tol,
                       int max_iter) {
  auto point = ba_iterate(inst, slope, tol, max_iter);
  if (point.dual_gap >= tol) {
    throw NumericError("blahut_arimoto: no convergence after " +
                       std::to_string(max_iter) + " iterations (dual gap " +
                       std::to_string(point.dual_gap) + ", rate " +
                       std::to_string(point.rate) + ", distortion " +
                       std::to_string(point.distortion) + ")");
  }
  return point;
}

namespace {

// Aggregate point reported by one parametric solve: an achievable
// (rate, distortion) pair plus the residual dual gap of the inner solver.
struct SlopePoint {
  double rate = 0.0;
  double distortion = 0.0;
  double gap = 0.0;
};

// Shared slope-bisection machinery. Maintains the convexity sandwich around
// the target distortion: achievable points with distortion at or under the
// target give upper bounds, tangent lines (corrected by the inner dual gap)
// give lower bounds.
struct SlopeBisection {
  double target = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  double lower = 0.0;

  void absorb(const SlopePoint& p, double slope) {
    if (p.distortion <= target) upper = std::min(upper, p.rate);
    lower = std::max(lower, p.rate + slope * (target - p.distortion) - p.gap);
  }
  bool converged(double tol) const { return upper - lower <= tol; }
};

double solve_by_slope(
    const std::function<SlopePoint(double)>& eval,
    double zero_rate_distortion, double min_distortion, double target,
    const RdSolveOptions& opts) {
  if (target < min_distortion - 1e-12) {
    throw NumericError("infeasible distortion target " + std::to_string(target) +
                       " < minimum achievable " + std::to_string(min_distortion));
  }
  if (target >= zero_rate_distortion) return 0.0;

  SlopeBisection bis;
  bis.target = target;

  const double span = std::max(zero_rate_distortion - min_distortion, 1e-12);
  double flat = -1e-9 / span;
  double steep = -2.0 / span;
  // Grow the steep end until its distortion falls at or below the target.
  double steep_distortion = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 80; ++i) {
    const auto point = eval(steep);
    bis.absorb(point, steep);
    steep_distortion = point.distortion;
    if (point.distortion <= target) break;
    steep *= 4.0;
  }
  if (steep_distortion > target) {
    // The curve plateaus above the target within numeric range: treat the
    // remaining gap as resolution of the curve's vertical segment.
    return bis.upper == std::numeric_limits<double>::infinity() ? bis.lower
                                                                : bis.upper;
  }

  double lo = steep, hi = flat;  // D(lo) <= target < D(hi) (generically)
  for (int i = 0; i < opts.max_bisect && !bis.converged(opts.tol); ++i) {
    const double mid = (lo + hi) / 2.0;
    const auto point = eval(mid);
    bis.absorb(point, mid);
    if (point.distortion <= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return bis.upper;
}

}  // namespace

double rd_at_distortion(const RdInstance& inst, double target_distortion,
                        const RdSolveOptions& opts) {
  inst.source.validate();
  const Eigen::Index nx = inst.distortion.rows();
  Eigen::Map<const Eigen::VectorXd> p(inst.source.probs.data(), nx);

  double min_distortion = 0.0;
  for (Eigen::Index i = 0; i < nx; ++i) {
    min_distortion += p[i] * inst.distortion.row(i).minCoeff();
  }
  const double zero_rate_distortion =
      (p.transpose() * inst.distortion).minCoeff();

  const auto eval = [&](double slope) {
    const auto point = ba_iterate(inst, slope, opts.ba_tol, opts.ba_max_iter);
    return SlopePoint{point.rate, point.distortion, point.dual_gap};
  };
  return solve_by_slope(eval, zero_rate_distortion, min_distortion,
                        target_distortion, opts);
}

double algorithm_rd(const AlgorithmRdInstance& inst, double epsilon,
                    const RdSolveOptions& opts) {
  if (inst.joint.rows() != inst.gen.rows() || inst.joint.cols() != inst.gen.cols() ||
      inst.gen_hat.rows() != inst.joint.rows()) {
    throw ConfigError("algorithm_rd: table shapes disagree");
  }
  const double base_gen = (inst.joint.array() * inst.gen.array()).sum();

  RdInstance reduced;
  reduced.source.probs.assign(static_cast<std::size_t>(inst.joint.rows()), 0.0);
  for (Eigen::Index i = 0; i < inst.joint.rows(); ++i) {
    reduced.source.probs[static_cast<std::size_t>(i)] = inst.joint.row(i).sum();
  }
  reduced.distortion = -inst.gen_hat;
  return rd_at_distortion(reduced, epsilon - base_gen, opts);
}

double conditional_algorithm_rd(const ConditionalRdInstance& inst,
                                double epsilon, const RdSolveOptions& opts) {
  const Eigen::Index ns = inst.joint_su.rows();
  const Eigen::Index nu = inst.joint_su.cols();
  if (inst.gen_bar.rows() != ns || inst.gen_bar.cols() != nu ||
      static_cast<Eigen::Index>(inst.gen_hat.size()) != nu) {
    throw ConfigError("conditional_algorithm_rd: table shapes disagree");
  }
  const double total = inst.joint_su.sum();
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("conditional_algorithm_rd: joint must sum to 1");
  }

  const double base_gen = (inst.joint_su.array() * inst.gen_bar.array()).sum();
  const double target = epsilon - base_gen;

  // Per-u subinstances with conditional sources.
  struct Sub {
    double weight;
    RdInstance inst;
  };
  std::vector<Sub> subs;
  for (Eigen::Index u = 0; u < nu; ++u) {
    const double qu = inst.joint_su.col(u).sum();
    if (qu <= 0.0) continue;
    Sub sub;
    sub.weight = qu;
    sub.inst.source.probs.resize(static_cast<std::size_t>(ns));
    for (Eigen::Index s = 0; s < ns; ++s) {
      sub.inst.source.probs[static_cast<std::size_t>(s)] = inst.joint_su(s, u) / qu;
    }
    sub.inst.distortion = -inst.gen_hat[static_cast<std::size_t>(u)];
    subs.push_back(std::move(sub));
  }
  if (subs.empty()) throw ConfigError("conditional_algorithm_rd: empty joint");

  double min_distortion = 0.0;
  double zero_rate_distortion = 0.0;
  for (const auto& sub : subs) {
    Eigen::Map<const Eigen::VectorXd> p(sub.inst.source.probs.data(), ns);
    double dmin = 0.0;
    for (Eigen::Index s = 0; s < ns; ++s) {
      dmin += p[s] * sub.inst.distortion.row(s).minCoeff();
    }
    min_distortion += sub.weight * dmin;
    zero_rate_distortion +=
        sub.weight * (p.transpose() * sub.inst.distortion).minCoeff();
  }

  const auto eval = [&](double slope) {
    SlopePoint out;
    for (const auto& sub : subs) {
      const auto point =
          ba_iterate(sub.inst, slope, opts.ba_tol, opts.ba_max_iter);
      out.rate += sub.weight * point.rate;
      out.distortion += sub.weight * point.distortion;
      out.gap += sub.weight * point.dual_gap;
    }
    return out;
  };
  return solve_by_slope(eval, zero_rate_distortion, min_distortion, target, opts);
}

double robust_rd(const ConditionalRdInstance& base, double delta, double epsilon,
                 const RobustGridSpec& spec, const RdSolveOptions& opts) {
  if (delta <= 0.0 || delta > 1.0) throw ConfigError("robust_rd: delta must be in (0,1]");
  const Eigen::Index ns = base.joint_su.rows();
  const Eigen::Index nu = base.joint_su.cols();
  if (ns * nu > spec.max_support) {
    throw ConfigError("robust_rd: joint support exceeds the documented cap");
  }
  const double radius = std::log(1.0 / delta);

  double best = conditional_algorithm_rd(base, epsilon, opts);
  if (radius <= 0.0) return best;

  // KL((1-l) P + l delta_a || P), finite only for atoms inside the support.
  const auto mix_kl = [&](Eigen::Index s, Eigen::Index u, double l) {
    double kl = 0.0;
    for (Eigen::Index i = 0; i < ns; ++i) {
      for (Eigen::Index j = 0; j < nu; ++j) {
        const double p = base.joint_su(i, j);
        if (p <= 0.0) continue;
        const double q = (1.0 - l) * p + ((i == s && j == u) ? l : 0.0);
        kl += xlogx(q) - q * std::log(p);
      }
    }
    return kl;
  };

  for (Eigen::Index s = 0; s < ns; ++s) {
    for (Eigen::Index u = 0; u < nu; ++u) {
      if (base.joint_su(s, u) <= 0.0) continue;
      // Largest feasible mixture weight for this atom.
      double lo = 0.0, hi = 1.0;
      if (mix_kl(s, u, 1.0) > radius) {
        for (int it = 0; it < 60; ++it) {
          const double mid = (lo + hi) / 2.0;
          (mix_kl(s, u, mid) <= radius ? lo : hi) = mid;
        }
      } else {
        lo = 1.0;
      }
      for (int step = 1; step <= spec.mixture_steps; ++step) {
        const double l = lo * static_cast<double>(step) /
                         static_cast<double>(spec.mixture_steps);
        if (l <= 0.0) continue;
        ConditionalRdInstance tilted = base;
        tilted.joint_su *= (1.0 - l);
        tilted.joint_su(s, u) += l;
        best = std::max(best, conditional_algorithm_rd(tilted, epsilon, opts));
      }
    }
  }
  return best;
}

namespace {

// Iterates over all |Z|^count index tuples.
class TupleCounter {
 public:
  TupleCounter(int base, int count)
      : base_(base), digits_(static_cast<std::size_t>(count), 0) {}

  const std::vector<int>& digits() const { return digits_; }

  bool advance() {
    for (std::size_t i = 0; i < digits_.size(); ++i) {
      if (++digits_[i] < base_) return true;
      digits_[i] = 0;
    }
    return false;
  }

 private:
  int base_;
  std::vector<int> digits_;
};

}  // namespace

AlgorithmRdInstance toy_per_sample_instance(const DistributedToy& toy,
                                            int client, int sample) {
  toy.data_pmf.validate();
  const int nz = toy.data_pmf.size();
  const int n = toy.samples_per_client;
  const int K = toy.clients;
  const double total_configs = std::pow(static_cast<double>(nz), n * K);
  if (total_configs > 1e6) throw ConfigError("toy enumeration too large");

  Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(nz, toy.aggregate_count);
  TupleCounter counter(nz, n * K);
  std::vector<int> hypotheses(static_cast<std::size_t>(K));
  std::vector<int> shard(static_cast<std::size_t>(n));
  do {
    const auto& cfg = counter.digits();
    double prob = 1.0;
    for (const int z : cfg) prob *= toy.data_pmf.probs[static_cast<std::size_t>(z)];
    if (prob <= 0.0) continue;
    for (int i = 0; i < K; ++i) {
      for (int j = 0; j < n; ++j) {
        shard[static_cast<std::size_t>(j)] = cfg[static_cast<std::size_t>(i * n + j)];
      }
      hypotheses[static_cast<std::size_t>(i)] = toy.local_rule(shard);
    }
    const int wbar = toy.aggregate_rule(hypotheses);
    const int z = cfg[static_cast<std::size_t>(client * n + sample)];
    joint(z, wbar) += prob;
  } while (counter.advance());

  // gen(z, wbar) = population risk of wbar minus the single-sample loss.
  Eigen::VectorXd pop_risk(toy.aggregate_count);
  for (int w = 0; w < toy.aggregate_count; ++w) {
    double r = 0.0;
    for (int z = 0; z < nz; ++z) r += toy.data_pmf.probs[static_cast<std::size_t>(z)] * toy.loss(z, w);
    pop_risk[w] = r;
  }
  AlgorithmRdInstance inst;
  inst.joint = joint;
  inst.gen = (-toy.loss).rowwise() + pop_risk.transpose();
  inst.gen_hat = inst.gen;
  return inst;
}

Theorem4Result theorem4_bounds(const DistributedToy& toy, double sigma,
                               double epsilon, const RdSolveOptions& opts) {
  toy.data_pmf.validate();
  const int nz = toy.data_pmf.size();
  const int n = toy.samples_per_client;
  const int K = toy.clients;
  if (n < 1 || K < 1 || toy.hypothesis_count < 1 || toy.aggregate_count < 1) {
    throw ConfigError("theorem4_bounds: invalid toy sizes");
  }
  const double total_configs = std::pow(static_cast<double>(nz), n * K);
  if (total_configs > 1e6) throw ConfigError("theorem4_bounds: enumeration too large");

  const int dataset_count = static_cast<int>(std::lround(std::pow(nz, n)));
  int peer_count = 1;
  for (int i = 1; i < K; ++i) peer_count *= toy.hypothesis_count;

  Eigen::VectorXd pop_risk(toy.aggregate_count);
  for (int w = 0; w < toy.aggregate_count; ++w) {
    double r = 0.0;
    for (int z = 0; z < nz; ++z) r += toy.data_pmf.probs[static_cast<std::size_t>(z)] * toy.loss(z, w);
    pop_risk[w] = r;
  }
  const Eigen::MatrixXd gen_sample = (-toy.loss).rowwise() + pop_risk.transpose();

  // Dataset-level gen(s_i, wbar) tables over the |Z|^n shard alphabet.
  Eigen::MatrixXd gen_dataset(dataset_count, toy.aggregate_count);
  {
    TupleCounter shard_counter(nz, n);
    int s_index = 0;
    do {
      const auto& shard = shard_counter.digits();
      for (int w = 0; w < toy.aggregate_count; ++w) {
        double emp = 0.0;
        for (const int z : shard) emp += toy.loss(z, w);
        gen_dataset(s_index, w) = pop_risk[w] - emp / static_cast<double>(n);
      }
      ++s_index;
    } while (shard_counter.advance());
  }

  // One enumeration pass accumulating every joint the four terms need.
  std::vector<Eigen::MatrixXd> joint_zw(
      static_cast<std::size_t>(K) * static_cast<std::size_t>(n),
      Eigen::MatrixXd::Zero(nz, toy.aggregate_count));
  // Per (i, j): P(z, u) and P(z, u, wbar) folded into E[gen | z, u].
  std::vector<Eigen::MatrixXd> joint_zu(
      joint_zw.size(), Eigen::MatrixXd::Zero(nz, peer_count));
  std::vector<Eigen::MatrixXd> gensum_zu(
      joint_zw.size(), Eigen::MatrixXd::Zero(nz, peer_count));
  std::vector<Eigen::MatrixXd> joint_su(
      static_cast<std::size_t>(K), Eigen::MatrixXd::Zero(dataset_count, peer_count));
  std::vector<Eigen::MatrixXd> gensum_su(
      static_cast<std::size_t>(K), Eigen::MatrixXd::Zero(dataset_count, peer_count));
  const int full_count = static_cast<int>(std::lround(total_configs));
  Eigen::MatrixXd joint_full = Eigen::MatrixXd::Zero(full_count, toy.aggregate_count);

  TupleCounter counter(nz, n * K);
  std::vector<int> hypotheses(static_cast<std::size_t>(K));
  std::vector<int> shard(static_cast<std::size_t>(n));
  std::vector<int> shard_index(static_cast<std::size_t>(K));
  int config_index = 0;
  do {
    const auto& cfg = counter.digits();
    double prob = 1.0;
    for (const int z : cfg) prob *= toy.data_pmf.probs[static_cast<std::size_t>(z)];
    if (prob > 0.0) {
      for (int i = 0; i < K; ++i) {
        // Shard index matches the TupleCounter order used for gen_dataset:
        // digit j advances fastest for low j, i.e. little-endian.
        int sidx = 0;
        int mult = 1;
        for (int j = 0; j < n; ++j) {
          shard[static_cast<std::size_t>(j)] = cfg[static_cast<std::size_t>(i * n + j)];
          sidx += shard[static_cast<std::size_t>(j)] * mult;
          mult *= nz;
        }
        shard_index[static_cast<std::size_t>(i)] = sidx;
        hypotheses[static_cast<std::size_t>(i)] = toy.local_rule(shard);
      }
      const int wbar = toy.aggregate_rule(hypotheses);
      joint_full(config_index, wbar) += prob;

      for (int i = 0; i < K; ++i) {
        int u = 0;
        for (int other = 0; other < K; ++other) {
          if (other == i) continue;
          u = u * toy.hypothesis_count + hypotheses[static_cast<std::size_t>(other)];
        }
        joint_su[static_cast<std::size_t>(i)](shard_index[static_cast<std::size_t>(i)], u) += prob;
        gensum_su[static_cast<std::size_t>(i)](shard_index[static_cast<std::size_t>(i)], u) +=
            prob * gen_dataset(shard_index[static_cast<std::size_t>(i)], wbar);
        for (int j = 0; j < n; ++j) {
          const std::size_t slot = static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                                   static_cast<std::size_t>(j);
          const int z = cfg[static_cast<std::size_t>(i * n + j)];
          joint_zw[slot](z, wbar) += prob;
          joint_zu[slot](z, u) += prob;
          gensum_zu[slot](z, u) += prob * gen_sample(z, wbar);
        }
      }
    }
    ++config_index;
  } while (counter.advance());

  const auto to_conditional = [](const Eigen::MatrixXd& joint,
                                 const Eigen::MatrixXd& gensum,
                                 const Eigen::MatrixXd& gen_hat_table) {
    ConditionalRdInstance inst;
    inst.joint_su = joint;
    inst.gen_bar = Eigen::MatrixXd::Zero(joint.rows(), joint.cols());
    for (Eigen::Index s = 0; s < joint.rows(); ++s) {
      for (Eigen::Index u = 0; u < joint.cols(); ++u) {
        if (joint(s, u) > 0.0) inst.gen_bar(s, u) = gensum(s, u) / joint(s, u);
      }
    }
    inst.gen_hat.assign(static_cast<std::size_t>(joint.cols()), gen_hat_table);
    return inst;
  };

  Theorem4Result out;
  const double two_sigma_sq = 2.0 * sigma * sigma;

  double marginal_sum = 0.0;
  double conditional_sum = 0.0;
  for (int j = 0; j < n; ++j) {
    double max_cond = 0.0;
    for (int i = 0; i < K; ++i) {
      const std::size_t slot = static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                               static_cast<std::size_t>(j);
      AlgorithmRdInstance marg;
      marg.joint = joint_zw[slot];
      marg.gen = gen_sample;
      marg.gen_hat = gen_sample;
      marginal_sum += std::sqrt(two_sigma_sq * algorithm_rd(marg, epsilon, opts));

      const auto cond = to_conditional(joint_zu[slot], gensum_zu[slot], gen_sample);
      max_cond = std::max(max_cond, conditional_algorithm_rd(cond, epsilon, opts));
    }
    conditional_sum += std::sqrt(two_sigma_sq * max_cond);
  }
  const double n_real = static_cast<double>(n);
  const double K_real = static_cast<double>(K);
  out.per_sample_marginal = (marginal_sum / K_real + epsilon) / n_real;
  out.per_sample_conditional = (conditional_sum + epsilon) / n_real;
  out.eq7 = std::min(out.per_sample_marginal, out.per_sample_conditional);

  // Dataset-level terms. The marginal one treats the whole (s_1..s_K) tuple
  // as the source; its gen is the K-client average gap.
  {
    AlgorithmRdInstance full;
    full.joint = joint_full;
    full.gen = Eigen::MatrixXd::Zero(full_count, toy.aggregate_count);
    {
      TupleCounter c2(nz, n * K);
      int idx = 0;
      std::vector<int> sh(static_cast<std::size_t>(n));
      do {
        const auto& cfg = c2.digits();
        for (int w = 0; w < toy.aggregate_count; ++w) {
          double g = 0.0;
          for (int i = 0; i < K; ++i) {
            int sidx = 0;
            int mult = 1;
            for (int j = 0; j < n; ++j) {
              sh[static_cast<std::size_t>(j)] = cfg[static_cast<std::size_t>(i * n + j)];
              sidx += sh[static_cast<std::size_t>(j)] * mult;
              mult *= nz;
            }
            g += gen_dataset(sidx, w);
          }
          full.gen(idx, w) = g / K_real;
        }
        ++idx;
      } while (c2.advance());
    }
    full.gen_hat = full.gen;
    const double rd_full = algorithm_rd(full, epsilon, opts);
    out.dataset_marginal =
        (std::sqrt(two_sigma_sq * rd_full / K_real) + epsilon) / std::sqrt(n_real);

    double max_cond = 0.0;
    for (int i = 0; i < K; ++i) {
      const auto cond = to_conditional(joint_su[static_cast<std::size_t>(i)],
                                       gensum_su[static_cast<std::size_t>(i)],
                                       gen_dataset);
      max_cond = std::max(max_cond, conditional_algorithm_rd(cond, epsilon, opts));
    }
    out.dataset_conditional =
        (std::sqrt(two_sigma_sq * max_cond) + epsilon) / std::sqrt(n_real);
    out.eq8 = std::min(out.dataset_marginal, out.dataset_conditional);
  }
  return out;
}

}  // namespace distgen
