#pragma once

#include <Eigen/Dense>

#include "whitenet/errors.hpp"

namespace whitenet {

/// A mini batch of pre-classifier features: C channels x B samples, one
/// sample per column.
struct FeatureBatch {
  Eigen::MatrixXd data;

  FeatureBatch() = default;
  FeatureBatch(Eigen::MatrixXd m) : data(std::move(m)) {}

  Eigen::Index channels() const { return data.rows(); }
  Eigen::Index batch_size() const { return data.cols(); }
};

/// Throws InputError if the batch has no channels, fewer than min_batch
/// samples, or any non-finite entry.
void validate_batch(const FeatureBatch& batch, Eigen::Index min_batch = 2);

}  // namespace whitenet
