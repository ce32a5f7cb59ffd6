#include "distgen/dataset.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>

#include "distgen/errors.hpp"
#include "distgen/rng.hpp"

namespace distgen {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::uint32_t read_be_u32(std::istream& in, const std::string& path) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  if (!in) throw DataError("truncated IDX file: " + path);
  return (static_cast<std::uint32_t>(buf[0]) << 24) |
         (static_cast<std::uint32_t>(buf[1]) << 16) |
         (static_cast<std::uint32_t>(buf[2]) << 8) |
         static_cast<std::uint32_t>(buf[3]);
}

std::ifstream open_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open IDX file: " + path);
  return in;
}

}  // namespace

RawIdxData load_idx(const std::string& images_path,
                    const std::string& labels_path) {
  auto images = open_binary(images_path);
  if (const auto magic = read_be_u32(images, images_path); magic != kImagesMagic) {
    throw DataError("bad magic in image file " + images_path + ": expected 0x00000803");
  }
  const std::uint32_t n_images = read_be_u32(images, images_path);
  const std::uint32_t rows = read_be_u32(images, images_path);
  const std::uint32_t cols = read_be_u32(images, images_path);
  const std::size_t pixels = static_cast<std::size_t>(rows) * cols;

  auto labels = open_binary(labels_path);
  if (const auto magic = read_be_u32(labels, labels_path); magic != kLabelsMagic) {
    throw DataError("bad magic in label file " + labels_path + ": expected 0x00000801");
  }
  const std::uint32_t n_labels = read_be_u32(labels, labels_path);
  if (n_images != n_labels) {
    throw DataError("image/label count mismatch: " + std::to_string(n_images) +
                    " images vs " + std::to_string(n_labels) + " labels");
  }

  RawIdxData out;
  out.features.resize(n_images, static_cast<Eigen::Index>(pixels));
  out.labels.resize(n_images);

  std::vector<unsigned char> row(pixels);
  for (std::uint32_t i = 0; i < n_images; ++i) {
    images.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(pixels));
    if (!images) throw DataError("truncated IDX file: " + images_path);
    for (std::size_t j = 0; j < pixels; ++j) {
      out.features(i, static_cast<Eigen::Index>(j)) = static_cast<double>(row[j]);
    }
    char label = 0;
    labels.read(&label, 1);
    if (!labels) throw DataError("truncated IDX file: " + labels_path);
    out.labels[i] = static_cast<int>(static_cast<unsigned char>(label));
  }
  return out;
}

Dataset filter_binary(const RawIdxData& raw, int pos_digit, int neg_digit) {
  if (pos_digit == neg_digit || pos_digit < 0 || pos_digit > 9 || neg_digit < 0 ||
      neg_digit > 9) {
    throw ConfigError("filter_binary: digits must be distinct and in 0-9");
  }
  std::vector<int> keep;
  Eigen::Index pos_count = 0, neg_count = 0;
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    const int label = raw.labels[static_cast<std::size_t>(i)];
    if (label == pos_digit || label == neg_digit) {
      keep.push_back(static_cast<int>(i));
      (label == pos_digit ? pos_count : neg_count) += 1;
    }
  }
  if (pos_count == 0 || neg_count == 0) {
    throw DataError("no samples for class pair (" + std::to_string(pos_digit) +
                    ", " + std::to_string(neg_digit) + ")");
  }
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(keep.size()), raw.dim());
  out.labels.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t r = 0; r < keep.size(); ++r) {
    out.features.row(static_cast<Eigen::Index>(r)) = raw.features.row(keep[r]);
    out.labels[static_cast<Eigen::Index>(r)] =
        raw.labels[static_cast<std::size_t>(keep[r])] == pos_digit ? 1.0 : -1.0;
  }
  return out;
}

StandardizeStats standardize_fit(const Dataset& data) {
  if (data.size() < 2) throw ConfigError("standardize_fit: need at least 2 samples");
  StandardizeStats stats;
  const double n = static_cast<double>(data.size());
  stats.mean = data.features.colwise().sum() / n;
  Eigen::VectorXd var(data.dim());
  for (Eigen::Index j = 0; j < data.dim(); ++j) {
    var[j] = (data.features.col(j).array() - stats.mean[j]).square().sum() / n;
  }
  stats.stddev = var.array().sqrt();
  for (Eigen::Index j = 0; j < data.dim(); ++j) {
    if (stats.stddev[j] <= 0.0) stats.stddev[j] = 1.0;
  }
  return stats;
}

Dataset standardize_apply(const Dataset& data, const StandardizeStats& stats) {
  if (stats.mean.size() != data.dim() || stats.stddev.size() != data.dim()) {
    throw ConfigError("standardize_apply: stats dimension mismatch");
  }
  Dataset out;
  out.features = (data.features.rowwise() - stats.mean.transpose()).array().rowwise() /
                 stats.stddev.transpose().array();
  out.labels = data.labels;
  return out;
}

Dataset synth_two_gaussians(int dim, int n_total, double separation,
                            double label_noise, std::uint64_t seed) {
  if (dim < 1 || n_total < 2 || separation < 0.0 || label_noise < 0.0 ||
      label_noise >= 0.5) {
    throw ConfigError("synth_two_gaussians: invalid parameters");
  }
  Rng rng(seed);
  Dataset out;
  out.features.resize(n_total, dim);
  out.labels.resize(n_total);
  for (int i = 0; i < n_total; ++i) {
    const double cluster = rng.uniform() < 0.5 ? 1.0 : -1.0;
    Eigen::VectorXd x = rng.gaussian_vector(dim);
    x[0] += cluster * separation / 2.0;
    double label = cluster;
    if (rng.uniform() < label_noise) label = -label;
    out.features.row(i) = x;
    out.labels[i] = label;
  }
  return out;
}

std::vector<std::vector<int>> shard_indices(int pool_size, const ShardPlan& plan) {
  if (plan.clients < 1) throw ConfigError("shard: need at least one client");
  if (plan.samples_per_client > pool_size) {
    throw ConfigError("shard: samples_per_client exceeds pool size");
  }
  std::vector<std::vector<int>> out;
  out.reserve(static_cast<std::size_t>(plan.clients));
  for (int i = 0; i < plan.clients; ++i) {
    Rng rng(child_seed(plan.seed, "shard", static_cast<std::uint64_t>(i)));
    out.push_back(rng.sample_without_replacement(pool_size, plan.samples_per_client));
  }
  return out;
}

std::vector<Dataset> shard(const Dataset& pool, const ShardPlan& plan) {
  const auto indices = shard_indices(static_cast<int>(pool.size()), plan);
  std::vector<Dataset> out;
  out.reserve(indices.size());
  for (const auto& idx : indices) out.push_back(take_rows(pool, idx));
  return out;
}

Dataset take_rows(const Dataset& data, const std::vector<int>& rows) {
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), data.dim());
  out.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.features.row(static_cast<Eigen::Index>(r)) = data.features.row(rows[r]);
    out.labels[static_cast<Eigen::Index>(r)] = data.labels[rows[r]];
  }
  return out;
}

}  // namespace distgen
