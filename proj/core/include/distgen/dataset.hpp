#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace distgen {

// Binary-labelled sample matrix. Rows are samples, labels are strictly +1/-1.
struct Dataset {
  Eigen::MatrixXd features;  // n x d
  Eigen::VectorXd labels;    // entries in {-1, +1}

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }
};

// Raw IDX content before class filtering; labels are the original digits.
struct RawIdxData {
  Eigen::MatrixXd features;  // n x (rows*cols), pixel values in [0, 255]
  std::vector<int> labels;

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }
};

struct StandardizeStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;  // entries > 0; constant coordinates get 1
};

struct ShardPlan {
  int clients = 1;             // K
  int samples_per_client = 1;  // n, drawn without replacement per client
  std::uint64_t seed = 0;
};

// Reads an IDX image/label file pair. Images are flattened row-major.
// Throws DataError with a distinct message for bad magic, truncation and
// image/label count mismatch.
RawIdxData load_idx(const std::string& images_path,
                    const std::string& labels_path);

// Keeps only the two requested digits, remapping pos_digit -> +1 and
// neg_digit -> -1. Row order and feature bytes are preserved.
Dataset filter_binary(const RawIdxData& raw, int pos_digit, int neg_digit);

// Per-coordinate moments with the population (divide by n) convention, so
// that apply-after-fit gives exactly zero mean and unit variance.
StandardizeStats standardize_fit(const Dataset& data);
Dataset standardize_apply(const Dataset& data, const StandardizeStats& stats);

// Two spherical Gaussian clusters centred at +/-(separation/2)*e1. Each
// label is flipped independently with probability label_noise.
Dataset synth_two_gaussians(int dim, int n_total, double separation,
                            double label_noise, std::uint64_t seed);

// Index sets behind shard(); exposed so tests can fingerprint them.
// Each client draws without replacement; clients draw independently, so
// shards of distinct clients may overlap.
std::vector<std::vector<int>> shard_indices(int pool_size,
                                            const ShardPlan& plan);

std::vector<Dataset> shard(const Dataset& pool, const ShardPlan& plan);

// Subset by row indices, in the given order.
Dataset take_rows(const Dataset& data, const std::vector<int>& rows);

}  // namespace distgen
