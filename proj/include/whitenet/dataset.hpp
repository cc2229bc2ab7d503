#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "whitenet/errors.hpp"

namespace whitenet {

/// Synthetic long-tailed dataset description. Class counts decay
/// exponentially from n_max down to n_max/gamma; features are class-
/// conditional Gaussians with means placed at class_distance from the origin
/// (scaled basis vectors when the class count fits the feature dimension,
/// random unit directions otherwise) and shared isotropic noise.
struct ImbalanceSpec {
  int num_classes = 10;
  long n_max = 500;
  double gamma = 100.0;     ///< largest/smallest class count ratio
  int feature_dim = 40;
  double class_distance = 3.0;
  double noise_scale = 1.0;
  int test_per_class = 100; ///< balanced test split
  std::uint64_t seed = 0;
};

/// count_k = round(n_max * gamma^(-(k-1)/(N-1))), clamped to >= 1.
std::vector<long> longtail_counts(int num_classes, long n_max, double gamma);

struct Dataset {
  Eigen::MatrixXd features;  ///< D x M, one sample per column
  std::vector<int> labels;   ///< length M
  int num_classes = 0;
  std::vector<std::vector<long>> class_indices;  ///< sample ids per class

  long size() const { return static_cast<long>(labels.size()); }
  int dim() const { return static_cast<int>(features.rows()); }
  std::vector<long> class_counts() const;
};

struct SplitDataset {
  Dataset train;
  Dataset test;
};

/// Deterministic per seed. Train counts follow the long-tailed profile
/// exactly; the test split is balanced with test_per_class samples per class.
SplitDataset generate(const ImbalanceSpec& spec);

/// Rebuild class_indices/num_classes from labels (num_classes <= 0 infers
/// max label + 1).
void reindex(Dataset& dataset, int num_classes = -1);

/// Classes with zero samples (label gaps); loaders surface these to callers.
std::vector<int> missing_classes(const Dataset& dataset);

/// Loads rows of "label, f1, ..., fD". Ragged rows, non-numeric fields and
/// negative labels produce errors carrying the 1-based line number. An empty
/// file is an error, not an empty dataset.
Dataset load_tabular(const std::filesystem::path& path);

/// Writes the same format back with round-trip-exact doubles.
void save_tabular(const Dataset& dataset, const std::filesystem::path& path);

}  // namespace whitenet
