#include "distgen/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "distgen/errors.hpp"

namespace distgen {

int loss_zero_one(const Eigen::VectorXd& x, double y, const Hypothesis& h) {
  return y * h.score(x) < 0.0 ? 1 : 0;
}

int loss_margin(const Eigen::VectorXd& x, double y, const Hypothesis& h,
                double theta) {
  return y * h.score(x) < theta ? 1 : 0;
}

namespace {

double mean_margin_loss(const Dataset& data, const Hypothesis& h, double theta) {
  if (data.size() == 0) throw ConfigError("empirical risk of an empty dataset");
  const Eigen::VectorXd scores = data.features * h.w;
  Eigen::Index errors = 0;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    if (data.labels[i] * scores[i] < theta) ++errors;
  }
  return static_cast<double>(errors) / static_cast<double>(data.size());
}

}  // namespace

double empirical_risk_zero_one(const Dataset& data, const Hypothesis& h) {
  return mean_margin_loss(data, h, 0.0);
}

double empirical_risk_margin(const Dataset& data, const Hypothesis& h,
                             double theta) {
  return mean_margin_loss(data, h, theta);
}

double population_risk_estimate(const Dataset& test, const Hypothesis& h) {
  return empirical_risk_zero_one(test, h);
}

SgdResult sgd_train_svm(const Dataset& shard, const SgdParams& params) {
  if (shard.size() == 0) throw ConfigError("sgd_train_svm: empty shard");
  if (params.batch_size < 1 || params.max_epochs < 1 || params.eta0 <= 0.0) {
    throw ConfigError("sgd_train_svm: invalid parameters");
  }

  const Eigen::Index n = shard.size();
  const Eigen::Index d = shard.dim();
  SgdResult result;
  result.hypothesis.w = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd& w = result.hypothesis.w;

  Rng rng(child_seed(params.seed, "sgd"));
  std::vector<int> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = static_cast<int>(i);

  double eta = params.eta0;
  double best_objective = std::numeric_limits<double>::infinity();
  int stall_epochs = 0;
  Eigen::VectorXd grad(d);

  for (int epoch = 0; epoch < params.max_epochs; ++epoch) {
    rng.shuffle(order);
    double objective_sum = 0.0;
    for (Eigen::Index start = 0; start < n; start += params.batch_size) {
      const Eigen::Index stop = std::min<Eigen::Index>(start + params.batch_size, n);
      grad.setZero();
      for (Eigen::Index k = start; k < stop; ++k) {
        const int row = order[static_cast<std::size_t>(k)];
        const double y = shard.labels[row];
        const double margin = y * shard.features.row(row).dot(w);
        const double hinge = std::max(0.0, 1.0 - margin);
        objective_sum += hinge + 0.5 * params.alpha * w.squaredNorm();
        if (margin < 1.0) grad -= y * shard.features.row(row).transpose();
      }
      const double batch = static_cast<double>(stop - start);
      w *= (1.0 - eta * params.alpha);
      w -= (eta / batch) * grad;
    }
    const double objective = objective_sum / static_cast<double>(n);
    if (!std::isfinite(objective) || !w.allFinite()) {
      throw NumericError("sgd_train_svm: divergence");
    }
    result.objective_trace.push_back(objective);
    result.train_risk_trace.push_back(empirical_risk_zero_one(shard, result.hypothesis));
    result.epochs_run = epoch + 1;

    if (result.train_risk_trace.back() < params.target_train_risk) {
      result.reached_target = true;
      break;
    }
    if (objective > best_objective - params.no_improve_tol) {
      if (++stall_epochs >= params.no_improve_epochs) {
        eta *= params.lr_decay_factor;
        stall_epochs = 0;
      }
    } else {
      stall_epochs = 0;
    }
    best_objective = std::min(best_objective, objective);
  }
  return result;
}

Eigen::VectorXd surrogate_grad_logistic(const Eigen::VectorXd& x, double y,
                                        const Eigen::VectorXd& w) {
  if (x.size() != w.size()) throw ConfigError("surrogate_grad_logistic: dimension mismatch");
  const double margin = y * w.dot(x);
  // sigma(-margin) without overflow for large |margin|.
  double weight = 0.0;
  if (margin >= 0.0) {
    const double e = std::exp(-margin);
    weight = e / (1.0 + e);
  } else {
    weight = 1.0 / (1.0 + std::exp(margin));
  }
  return -y * weight * x;
}

Hypothesis sgld_step(const Hypothesis& w_in, const Dataset& minibatch,
                     const SgldStepParams& params, const SurrogateGrad& grad,
                     Rng& noise_rng) {
  if (minibatch.size() == 0) throw ConfigError("sgld_step: empty minibatch");
  if (params.eta <= 0.0 || params.beta <= 0.0) {
    throw ConfigError("sgld_step: eta and beta must be positive");
  }
  Eigen::VectorXd g = Eigen::VectorXd::Zero(w_in.dim());
  for (Eigen::Index i = 0; i < minibatch.size(); ++i) {
    g += grad(minibatch.features.row(i).transpose(), minibatch.labels[i], w_in.w);
  }
  g /= static_cast<double>(minibatch.size());
  if (!g.allFinite()) throw NumericError("sgld_step: non-finite gradient");

  const double noise_scale = std::sqrt(2.0 * params.eta / params.beta);
  Hypothesis out;
  out.w = w_in.w - params.eta * g + noise_scale * noise_rng.gaussian_vector(w_in.dim());
  return out;
}

}  // namespace distgen
