#include "distgen/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "distgen/errors.hpp"

namespace distgen {

namespace {

void check_common(const SvmBoundParams& p) {
  if (p.n < 1 || p.clients < 1 || p.jl_dim < 1 || p.feature_norm_bound <= 0.0 ||
      p.margin <= 0.0 || p.nu <= 0.0 || p.c1 <= 0.0 || p.c2 <= 0.0 ||
      p.sigma <= 0.0) {
    throw ConfigError("SvmBoundParams: all parameters must be positive");
  }
}

}  // namespace

SvmBoundParams SvmBoundParams::fit_defaults(int n, int clients, double margin,
                                            double feature_norm_bound,
                                            double delta, double sigma) {
  if (n < 1 || clients < 1 || margin <= 0.0 || feature_norm_bound <= 0.0) {
    throw ConfigError("SvmBoundParams::fit_defaults: invalid inputs");
  }
  SvmBoundParams p;
  p.n = n;
  p.clients = clients;
  p.margin = margin;
  p.feature_norm_bound = feature_norm_bound;
  p.delta = delta;
  p.sigma = sigma;
  const double K = static_cast<double>(clients);
  const double ratio = feature_norm_bound / (K * margin);
  p.jl_dim = static_cast<int>(std::ceil(
      112.0 * ratio * ratio * std::log(static_cast<double>(n) * K * std::sqrt(K))));
  p.jl_dim = std::max(p.jl_dim, 1);
  p.c1 = std::sqrt(K * K * margin * margin /
                       (20.0 * feature_norm_bound * feature_norm_bound) +
                   1.0);
  p.c2 = p.c1;
  p.nu = 1.0 / (2.0 * p.c1);
  return p;
}

EpsilonBreakdown epsilon_terms(const SvmBoundParams& p) {
  check_common(p);
  const double m = static_cast<double>(p.jl_dim);
  const double K = static_cast<double>(p.clients);
  const double B = p.feature_norm_bound;
  const double theta = p.margin;

  EpsilonBreakdown out;
  const double margin_ratio = K * theta / (4.0 * B);
  out.term1 = 8.0 * std::exp(-(m / 7.0) * margin_ratio * margin_ratio);

  const double t = K * theta / (4.0 * p.c1 * p.nu * B);
  out.term2_log = std::log(2.0 * m / std::sqrt(std::numbers::pi)) +
                  m * std::log(p.nu) - ((m + 1.0) / 2.0) * t * t;
  out.term2 = (p.tight_term2 && t >= 1.0) ? 0.0 : std::exp(out.term2_log);

  out.term3 = 4.0 * std::exp(-0.21 * m * (p.c1 * p.c1 - 1.0));
  out.term4 = 4.0 * std::exp(-0.21 * m * (p.c2 * p.c2 - 1.0));
  out.total = out.term1 + out.term2 + out.term3 + out.term4;
  return out;
}

double dsvm_rate_term(const SvmBoundParams& p) {
  check_common(p);
  return static_cast<double>(p.jl_dim) * std::log((p.c2 + p.nu) / p.nu);
}

double dsvm_tail_bound(const SvmBoundParams& p) {
  if (p.delta <= 0.0 || p.delta >= 1.0) {
    throw ConfigError("dsvm_tail_bound: delta must be in (0,1)");
  }
  const double rate = dsvm_rate_term(p);
  const double eps = epsilon_terms(p).total;
  return std::sqrt(2.0 * p.sigma * p.sigma * (rate + std::log(1.0 / p.delta)) /
                   static_cast<double>(p.n)) +
         eps;
}

double dsvm_expected_bound(const SvmBoundParams& p) {
  const double rate = dsvm_rate_term(p);
  const double eps = epsilon_terms(p).total;
  return std::sqrt(2.0 * p.sigma * p.sigma * rate / static_cast<double>(p.n)) + eps;
}

double centralized_expected_bound(int n, int clients, double margin,
                                  double feature_norm_bound, double sigma) {
  return dsvm_expected_bound(SvmBoundParams::fit_defaults(
      n * clients, 1, margin, feature_norm_bound, 0.05, sigma));
}

double centralized_tail_bound(int n, int clients, double margin,
                              double feature_norm_bound, double delta,
                              double sigma) {
  return dsvm_tail_bound(SvmBoundParams::fit_defaults(
      n * clients, 1, margin, feature_norm_bound, delta, sigma));
}

SvmBoundSearchResult optimize_svm_bound(int n, int clients, double margin,
                                        double feature_norm_bound,
                                        std::optional<double> delta,
                                        double sigma) {
  const auto base = SvmBoundParams::fit_defaults(
      n, clients, margin, feature_norm_bound, delta.value_or(0.05), sigma);
  const auto objective = [&](const SvmBoundParams& p) {
    return delta ? dsvm_tail_bound(p) : dsvm_expected_bound(p);
  };

  SvmBoundSearchResult best{base, objective(base)};

  // Coordinate descent over multiplicative grids, two sweeps. Every
  // candidate keeps c1, c2 >= 1 and nu > 0; jl_dim stays integral.
  const std::vector<double> factors = {0.25, 0.4, 0.5, 0.63, 0.8, 1.0,
                                       1.25, 1.6,  2.0, 2.5,  4.0};
  for (int sweep = 0; sweep < 2; ++sweep) {
    for (int coord = 0; coord < 4; ++coord) {
      SvmBoundSearchResult local = best;
      for (const double f : factors) {
        SvmBoundParams cand = best.params;
        switch (coord) {
          case 0:
            cand.jl_dim = std::max(
                1, static_cast<int>(std::lround(best.params.jl_dim * f)));
            break;
          case 1:
            cand.c1 = std::max(1.0, best.params.c1 * f);
            break;
          case 2:
            cand.c2 = std::max(1.0, best.params.c2 * f);
            break;
          default:
            cand.nu = best.params.nu * f;
            break;
        }
        const double value = objective(cand);
        if (value < local.value) local = {cand, value};
      }
      best = local;
    }
  }
  return best;
}

double lipschitz_expected_bound(const LipschitzBoundParams& p) {
  if (p.lipschitz <= 0.0 || p.sigma <= 0.0 || p.hypothesis_var < 0.0 ||
      p.n < 1 || p.clients < 1) {
    throw ConfigError("lipschitz_expected_bound: invalid parameters");
  }
  const double K = static_cast<double>(p.clients);
  const double cube = 2.0 * std::cbrt(2.0 * p.lipschitz * p.sigma * p.sigma *
                                      p.hypothesis_var /
                                      (static_cast<double>(p.n) * K * K));
  const double direct = 2.0 * p.lipschitz * p.hypothesis_var / (K * K);
  return std::min(cube, direct);
}

double fsgld_bound(const FsgldBoundInputs& in) {
  const std::size_t clients = in.grad_variance.size();
  if (clients == 0 || in.rounds_minibatch.size() != clients) {
    throw ConfigError("fsgld_bound: inconsistent client count");
  }
  const std::size_t rounds = in.eta.size();
  if (in.beta.size() != rounds) throw ConfigError("fsgld_bound: schedule size mismatch");
  if (in.minibatch_count < 1 || in.minibatch_size < 1 || in.samples_per_client < 1) {
    throw ConfigError("fsgld_bound: invalid sizes");
  }

  double total = 0.0;
  for (std::size_t i = 0; i < clients; ++i) {
    if (in.rounds_minibatch[i].size() != rounds ||
        in.grad_variance[i].size() != rounds) {
      throw ConfigError("fsgld_bound: per-round data missing for a client");
    }
    std::vector<double> per_minibatch(static_cast<std::size_t>(in.minibatch_count), 0.0);
    for (std::size_t t = 0; t < rounds; ++t) {
      const int j = in.rounds_minibatch[i][t];
      if (j < 0 || j >= in.minibatch_count) {
        throw ConfigError("fsgld_bound: minibatch index out of range");
      }
      const double var = in.grad_variance[i][t];
      if (!(var >= 0.0) || !std::isfinite(var)) {
        throw NumericError("fsgld_bound: missing or invalid variance estimate");
      }
      per_minibatch[static_cast<std::size_t>(j)] += in.beta[t] * in.eta[t] * var;
    }
    for (const double s : per_minibatch) total += std::sqrt(s);
  }

  const double K = static_cast<double>(clients);
  const double n = static_cast<double>(in.samples_per_client);
  const double b = static_cast<double>(in.minibatch_size);
  return std::sqrt(2.0 * b) * in.sigma / (2.0 * n * K * std::sqrt(K)) * total;
}

}  // namespace distgen
