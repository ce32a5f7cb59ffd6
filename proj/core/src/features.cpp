#include "distgen/features.hpp"

#include <cmath>
#include <numbers>

#include "distgen/errors.hpp"
#include "distgen/rng.hpp"

namespace distgen {

RffMap::RffMap(Eigen::Index input_dim, Eigen::Index feature_dim, double gamma,
               std::uint64_t seed)
    : gamma_(gamma), seed_(seed) {
  if (input_dim < 1 || feature_dim < 1 || gamma <= 0.0) {
    throw ConfigError("RffMap: dimensions must be positive and gamma > 0");
  }
  Rng rng(child_seed(seed, "rff"));
  const double freq_std = std::sqrt(2.0 * gamma);
  frequencies_.resize(feature_dim, input_dim);
  for (Eigen::Index i = 0; i < feature_dim; ++i) {
    for (Eigen::Index j = 0; j < input_dim; ++j) {
      frequencies_(i, j) = freq_std * rng.gaussian();
    }
  }
  phases_.resize(feature_dim);
  for (Eigen::Index i = 0; i < feature_dim; ++i) {
    phases_[i] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
}

Eigen::VectorXd RffMap::transform(const Eigen::VectorXd& x) const {
  if (x.size() != input_dim()) throw ConfigError("RffMap: input dimension mismatch");
  const double scale = std::sqrt(2.0 / static_cast<double>(feature_dim()));
  return (((frequencies_ * x) + phases_).array().cos() * scale).matrix();
}

Dataset RffMap::transform(const Dataset& data) const {
  if (data.dim() != input_dim()) throw ConfigError("RffMap: input dimension mismatch");
  Dataset out;
  out.labels = data.labels;
  const double scale = std::sqrt(2.0 / static_cast<double>(feature_dim()));
  out.features = (((data.features * frequencies_.transpose()).rowwise() +
                   phases_.transpose())
                      .array()
                      .cos() *
                  scale)
                     .matrix();
  return out;
}

JlMatrix::JlMatrix(Eigen::Index input_dim, Eigen::Index target_dim,
                   std::uint64_t seed)
    : seed_(seed) {
  if (input_dim < 1 || target_dim < 1) {
    throw ConfigError("JlMatrix: dimensions must be positive");
  }
  Rng rng(child_seed(seed, "jl"));
  const double entry_std = 1.0 / std::sqrt(static_cast<double>(target_dim));
  entries_.resize(input_dim, target_dim);
  for (Eigen::Index i = 0; i < input_dim; ++i) {
    for (Eigen::Index j = 0; j < target_dim; ++j) {
      entries_(i, j) = entry_std * rng.gaussian();
    }
  }
}

Eigen::VectorXd JlMatrix::project(const Eigen::VectorXd& x) const {
  if (x.size() != input_dim()) throw ConfigError("JlMatrix: input dimension mismatch");
  return entries_.transpose() * x;
}

}  // namespace distgen
