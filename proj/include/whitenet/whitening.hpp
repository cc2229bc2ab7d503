#pragma once

#include <Eigen/Dense>
#include <utility>

#include "whitenet/feature_batch.hpp"

namespace whitenet {

/// Normalizer for the batch covariance estimate. SampleCount (1/B) makes the
/// whitened batch covariance exactly the identity; ChannelCount (1/C) is kept
/// selectable for fidelity experiments.
enum class CovarianceDivisor { SampleCount, ChannelCount };

struct WhiteningConfig {
  double epsilon = 1e-5;     ///< added to the covariance diagonal
  double momentum = 0.1;     ///< running-average update weight
  CovarianceDivisor divisor = CovarianceDivisor::SampleCount;
  /// Eigenvalue gaps below this floor contribute no gradient through the
  /// eigenvector term (the pairwise factor is zeroed).
  double degeneracy_floor = 1e-8;
};

/// State of the ZCA channel-whitening layer.
///
/// Training-mode statistics (batch_mean, covariance, the eigendecomposition
/// and transform) are refreshed from each batch by fit_batch. Inference uses
/// the exponentially averaged running_mean / running_transform instead.
struct WhiteningState {
  WhiteningConfig config;

  Eigen::VectorXd batch_mean;    ///< u, length C
  Eigen::MatrixXd covariance;    ///< Sigma = (1/B) Xc Xc^T + eps I
  Eigen::VectorXd eigenvalues;   ///< descending
  Eigen::MatrixXd eigenvectors;  ///< columns, ordered to match eigenvalues
  Eigen::MatrixXd transform;     ///< W = V diag(max(lambda,eps))^{-1/2} V^T

  Eigen::VectorXd running_mean;
  Eigen::MatrixXd running_transform;
  bool running_initialized = false;

  /// Count of eigenvalue pairs whose gradient was zeroed by the degeneracy
  /// floor, accumulated across zca_backward calls. Informational only.
  long degenerate_pair_warnings = 0;

  Eigen::Index channels() const { return running_transform.rows(); }
  bool has_batch_stats() const { return batch_mean.size() > 0; }

  /// Fresh state for a C-channel layer: no batch statistics yet,
  /// running_mean = 0, running_transform = I.
  static WhiteningState make(Eigen::Index channels, WhiteningConfig config = {});
};

/// Batch mean and regularized covariance:
///   mean_c = (1/B) sum_i X_ci
///   cov    = (1/divisor) (X - u 1^T)(X - u 1^T)^T + epsilon I
/// Rejects non-finite input, B < 2, and epsilon < 0.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> compute_covariance(
    const FeatureBatch& batch, double epsilon,
    CovarianceDivisor divisor = CovarianceDivisor::SampleCount);

/// Refresh all training-mode statistics of `state` from `batch`: mean,
/// covariance, eigendecomposition, and the inverse-square-root transform.
/// Eigenvalues are clamped below at epsilon before inversion, so
/// rank-deficient batches (including B < C) stay finite.
void fit_batch(WhiteningState& state, const FeatureBatch& batch);

/// Training-mode whitening: V diag(max(lambda,eps))^{-1/2} V^T (X - u 1^T).
/// Precondition: state was fit on this batch.
FeatureBatch zca_forward(const FeatureBatch& batch, const WhiteningState& state);

/// Gradient of training-mode whitening: given dL/d phi(X), returns dL/dX,
/// propagating through the mean, the covariance, and the eigendecomposition
/// of Sigma^{-1/2}. Degenerate eigenvalue pairs (gap below the configured
/// floor) contribute zero and bump state.degenerate_pair_warnings.
FeatureBatch zca_backward(const FeatureBatch& grad_output,
                          const FeatureBatch& batch, WhiteningState& state);

/// running <- (1 - momentum) * running + momentum * current, for both the
/// mean and the transform. Requires batch statistics from fit_batch.
void update_running_stats(WhiteningState& state);

/// Inference-mode whitening with the running statistics. Accepts any B >= 1
/// and does not mutate state. Throws InputError before the first
/// update_running_stats.
FeatureBatch zca_inference(const FeatureBatch& batch, const WhiteningState& state);

}  // namespace whitenet
