#include "whitenet/whitening.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>

namespace whitenet {

void validate_batch(const FeatureBatch& batch, Eigen::Index min_batch) {
  if (batch.channels() < 1) {
    throw InputError("feature batch has no channels");
  }
  if (batch.batch_size() < min_batch) {
    std::ostringstream msg;
    msg << "feature batch needs at least " << min_batch << " samples, got "
        << batch.batch_size();
    throw InputError(msg.str());
  }
  if (!batch.data.allFinite()) {
    throw InputError("feature batch contains non-finite entries");
  }
}

WhiteningState WhiteningState::make(Eigen::Index channels, WhiteningConfig config) {
  WhiteningState state;
  state.config = config;
  state.running_mean = Eigen::VectorXd::Zero(channels);
  state.running_transform = Eigen::MatrixXd::Identity(channels, channels);
  return state;
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> compute_covariance(
    const FeatureBatch& batch, double epsilon, CovarianceDivisor divisor) {
  validate_batch(batch, 2);
  if (epsilon < 0.0 || !std::isfinite(epsilon)) {
    throw InputError("covariance epsilon must be finite and non-negative");
  }
  const auto C = batch.channels();
  const auto B = batch.batch_size();

  Eigen::VectorXd mean = batch.data.rowwise().mean();
  Eigen::MatrixXd centered = batch.data.colwise() - mean;
  const double denom = divisor == CovarianceDivisor::SampleCount
                           ? static_cast<double>(B)
                           : static_cast<double>(C);
  Eigen::MatrixXd cov = (centered * centered.transpose()) / denom;
  cov.diagonal().array() += epsilon;
  return {std::move(mean), std::move(cov)};
}

namespace {

// Inverse square root of a clamped eigenvalue; a direction with no
// data extent (lambda <= 0 after clamping) maps to zero instead of blowing up.
double inv_sqrt_clamped(double lambda, double epsilon) {
  const double clamped = std::max(lambda, epsilon);
  return clamped > 0.0 ? 1.0 / std::sqrt(clamped) : 0.0;
}

double condition_estimate(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(sv.size() - 1) <= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return sv(0) / sv(sv.size() - 1);
}

}  // namespace

void fit_batch(WhiteningState& state, const FeatureBatch& batch) {
  if (state.channels() != batch.channels()) {
    throw InputError("whitening state dimension does not match batch channels");
  }
  auto [mean, cov] = compute_covariance(batch, state.config.epsilon,
                                        state.config.divisor);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eigendecomposition of the batch covariance did not converge "
        << "(condition estimate " << condition_estimate(cov) << ")";
    throw LinalgError(msg.str());
  }

  const auto C = batch.channels();
  state.batch_mean = std::move(mean);
  state.covariance = std::move(cov);
  // Eigen returns ascending order; store descending.
  state.eigenvalues = solver.eigenvalues().reverse();
  state.eigenvectors = solver.eigenvectors().rowwise().reverse();

  Eigen::VectorXd inv_sqrt(C);
  for (Eigen::Index i = 0; i < C; ++i) {
    inv_sqrt(i) = inv_sqrt_clamped(state.eigenvalues(i), state.config.epsilon);
  }
  state.transform = state.eigenvectors * inv_sqrt.asDiagonal() *
                    state.eigenvectors.transpose();
}

FeatureBatch zca_forward(const FeatureBatch& batch, const WhiteningState& state) {
  validate_batch(batch, 1);
  if (!state.has_batch_stats()) {
    throw InputError("zca_forward requires batch statistics; call fit_batch first");
  }
  if (state.batch_mean.size() != batch.channels()) {
    throw InputError("whitening state dimension does not match batch channels");
  }
  return FeatureBatch{state.transform * (batch.data.colwise() - state.batch_mean)};
}

FeatureBatch zca_backward(const FeatureBatch& grad_output,
                          const FeatureBatch& batch, WhiteningState& state) {
  if (!state.has_batch_stats()) {
    throw InputError("zca_backward requires batch statistics; call fit_batch first");
  }
  if (grad_output.data.rows() != batch.data.rows() ||
      grad_output.data.cols() != batch.data.cols()) {
    throw InputError("grad_output shape does not match batch shape");
  }
  const auto C = batch.channels();
  const auto B = batch.batch_size();
  const double eps = state.config.epsilon;
  const Eigen::MatrixXd& V = state.eigenvectors;
  const Eigen::VectorXd& lam = state.eigenvalues;
  const Eigen::MatrixXd& G = grad_output.data;

  Eigen::MatrixXd centered = batch.data.colwise() - state.batch_mean;

  // f(lambda) = max(lambda,eps)^{-1/2}; f' is zero where the clamp is active.
  Eigen::VectorXd f(C), fprime(C);
  for (Eigen::Index i = 0; i < C; ++i) {
    f(i) = inv_sqrt_clamped(lam(i), eps);
    fprime(i) = lam(i) >= eps && lam(i) > 0.0
                    ? -0.5 * std::pow(lam(i), -1.5)
                    : 0.0;
  }

  // Y = W Xc with W = V f(Lambda) V^T, so dL/dW = G Xc^T and the direct
  // input path is W^T G (W symmetric).
  Eigen::MatrixXd grad_transform = G * centered.transpose();
  Eigen::MatrixXd grad_centered = state.transform * G;

  // Backprop W = V f(Lambda) V^T to the eigenpairs.
  Eigen::MatrixXd sym = grad_transform + grad_transform.transpose();
  Eigen::MatrixXd grad_eigvec = sym * V * f.asDiagonal();
  Eigen::VectorXd grad_eigval =
      (V.transpose() * grad_transform * V).diagonal().cwiseProduct(fprime);

  // Backprop the eigendecomposition Sigma = V Lambda V^T:
  //   dL/dSigma = V (K o (V^T dL/dV) + diag(dL/dlambda)) V^T
  // with the pairwise factor K_ab = 1/(lambda_b - lambda_a) for a != b.
  // Gaps below the degeneracy floor contribute nothing.
  Eigen::MatrixXd projected = V.transpose() * grad_eigvec;
  Eigen::MatrixXd inner(C, C);
  long degenerate = 0;
  for (Eigen::Index a = 0; a < C; ++a) {
    for (Eigen::Index b = 0; b < C; ++b) {
      if (a == b) {
        inner(a, b) = grad_eigval(a);
        continue;
      }
      const double gap = lam(b) - lam(a);
      if (std::abs(gap) < state.config.degeneracy_floor) {
        inner(a, b) = 0.0;
        if (a < b) ++degenerate;
      } else {
        inner(a, b) = projected(a, b) / gap;
      }
    }
  }
  state.degenerate_pair_warnings += degenerate;

  Eigen::MatrixXd grad_cov = V * inner * V.transpose();
  grad_cov = 0.5 * (grad_cov + grad_cov.transpose()).eval();

  // Sigma = (1/denom) Xc Xc^T + eps I.
  const double denom = state.config.divisor == CovarianceDivisor::SampleCount
                           ? static_cast<double>(B)
                           : static_cast<double>(C);
  grad_centered.noalias() += (2.0 / denom) * grad_cov * centered;

  // Xc = X - mean(X) per channel: subtract the channel means of the gradient.
  Eigen::VectorXd channel_mean = grad_centered.rowwise().mean();
  return FeatureBatch{grad_centered.colwise() - channel_mean};
}

void update_running_stats(WhiteningState& state) {
  if (!state.has_batch_stats()) {
    throw InputError("update_running_stats requires batch statistics");
  }
  const double m = state.config.momentum;
  state.running_mean = (1.0 - m) * state.running_mean + m * state.batch_mean;
  state.running_transform =
      (1.0 - m) * state.running_transform + m * state.transform;
  state.running_initialized = true;
}

FeatureBatch zca_inference(const FeatureBatch& batch, const WhiteningState& state) {
  if (!state.running_initialized) {
    throw InputError(
        "whitening running statistics not initialized; train at least one step");
  }
  validate_batch(batch, 1);
  if (batch.channels() != state.channels()) {
    throw InputError("whitening state dimension does not match batch channels");
  }
  return FeatureBatch{state.running_transform *
                      (batch.data.colwise() - state.running_mean)};
}

}  // namespace whitenet
