#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "distgen/dataset.hpp"

namespace distgen {

// Random Fourier feature map approximating the Gaussian kernel
// k(x, x') = exp(-gamma * ||x - x'||^2). Each output coordinate is
// sqrt(2/p) * cos(<w_j, x> + b_j) with w_j ~ N(0, 2*gamma*I) and
// b_j ~ U[0, 2*pi).
class RffMap {
 public:
  RffMap(Eigen::Index input_dim, Eigen::Index feature_dim, double gamma,
         std::uint64_t seed);

  Eigen::VectorXd transform(const Eigen::VectorXd& x) const;
  Dataset transform(const Dataset& data) const;

  Eigen::Index input_dim() const { return frequencies_.cols(); }
  Eigen::Index feature_dim() const { return frequencies_.rows(); }
  double gamma() const { return gamma_; }
  std::uint64_t seed() const { return seed_; }
  const Eigen::MatrixXd& frequencies() const { return frequencies_; }
  const Eigen::VectorXd& phases() const { return phases_; }

 private:
  Eigen::MatrixXd frequencies_;  // p x d
  Eigen::VectorXd phases_;       // p
  double gamma_;
  std::uint64_t seed_;
};

// Gaussian random projection. Entries are i.i.d. N(0, 1/m) so that
// E||project(x)||^2 = ||x||^2.
class JlMatrix {
 public:
  JlMatrix(Eigen::Index input_dim, Eigen::Index target_dim, std::uint64_t seed);

  // x in R^d -> R^m.
  Eigen::VectorXd project(const Eigen::VectorXd& x) const;

  Eigen::Index input_dim() const { return entries_.rows(); }
  Eigen::Index target_dim() const { return entries_.cols(); }
  std::uint64_t seed() const { return seed_; }
  const Eigen::MatrixXd& entries() const { return entries_; }

 private:
  Eigen::MatrixXd entries_;  // d x m
  std::uint64_t seed_;
};

}  // namespace distgen
