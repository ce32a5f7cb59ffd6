#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace distgen {

// One step of the splitmix64 generator. Used for seed hashing only.
std::uint64_t splitmix64_next(std::uint64_t& state);

// Stable 64-bit hash of (master seed, component label, index). Adding a new
// labelled component never shifts the streams of existing ones.
std::uint64_t child_seed(std::uint64_t master, std::string_view label,
                         std::uint64_t index = 0);

// Deterministic random stream. The engine is std::mt19937_64 (bit-exact by
// the standard); all value transforms are implemented here rather than via
// std::*_distribution, whose outputs vary across standard libraries.
// Gaussians use the Box-Muller transform with a cached second value.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi);

  double gaussian();
  Eigen::VectorXd gaussian_vector(Eigen::Index n);

  // Sample `count` distinct indices from {0, ..., pool_size-1}, partial
  // Fisher-Yates. Order of the returned indices is part of the contract.
  std::vector<int> sample_without_replacement(int pool_size, int count);

  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(next_u64() % i);
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double cached_gaussian_ = 0.0;
  bool has_cached_gaussian_ = false;
};

}  // namespace distgen
