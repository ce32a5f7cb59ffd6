#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "distgen/dataset.hpp"
#include "distgen/rng.hpp"

namespace distgen {

struct Hypothesis {
  Eigen::VectorXd w;

  Eigen::Index dim() const { return w.size(); }
  double norm() const { return w.norm(); }
  double score(const Eigen::VectorXd& x) const { return w.dot(x); }
};

// 1 iff y * <x, w> < 0. Ties count as correct (strict inequality).
int loss_zero_one(const Eigen::VectorXd& x, double y, const Hypothesis& h);

// 1 iff y * <x, w> < theta. theta = 0 reduces to loss_zero_one.
int loss_margin(const Eigen::VectorXd& x, double y, const Hypothesis& h,
                double theta);

double empirical_risk_zero_one(const Dataset& data, const Hypothesis& h);
double empirical_risk_margin(const Dataset& data, const Hypothesis& h,
                             double theta);

// Population risk stand-in: 0-1 risk on a held-out test set.
double population_risk_estimate(const Dataset& test, const Hypothesis& h);

// Hinge-loss SGD with L2 regularization. Defaults: eta0 = 0.01,
// alpha = 1e-5, batch_size = 1, up to 200 epochs or until the training
// 0-1 risk drops below target_train_risk. The learning rate is multiplied
// by lr_decay_factor whenever the epoch objective fails to improve by more
// than no_improve_tol for no_improve_epochs consecutive epochs.
struct SgdParams {
  double eta0 = 0.01;
  double alpha = 1e-5;
  int batch_size = 1;
  int max_epochs = 200;
  double lr_decay_factor = 0.2;
  double no_improve_tol = 0.01;
  int no_improve_epochs = 10;
  double target_train_risk = 0.001;
  std::uint64_t seed = 0;
};

struct SgdResult {
  Hypothesis hypothesis;
  std::vector<double> train_risk_trace;  // 0-1 risk per epoch
  std::vector<double> objective_trace;   // mean hinge objective per epoch
  int epochs_run = 0;
  bool reached_target = false;
};

SgdResult sgd_train_svm(const Dataset& shard, const SgdParams& params);

// Gradient of the surrogate loss at a single sample; inputs (x, y, w).
using SurrogateGrad = std::function<Eigen::VectorXd(
    const Eigen::VectorXd&, double, const Eigen::VectorXd&)>;

// d/dw log(1 + exp(-y <x, w>)), evaluated in a saturation-safe form.
Eigen::VectorXd surrogate_grad_logistic(const Eigen::VectorXd& x, double y,
                                        const Eigen::VectorXd& w);

struct SgldStepParams {
  double eta = 0.0;   // learning rate, > 0
  double beta = 1.0;  // inverse temperature, > 0
};

// One Langevin iteration: w - eta * mean-gradient + sqrt(2*eta/beta) * V,
// with V ~ N(0, I) drawn from noise_rng. The gradient is averaged over the
// minibatch samples.
Hypothesis sgld_step(const Hypothesis& w_in, const Dataset& minibatch,
                     const SgldStepParams& params, const SurrogateGrad& grad,
                     Rng& noise_rng);

}  // namespace distgen
