#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "whitenet/feature_batch.hpp"

namespace whitenet {

/// Pairwise channel correlation of a feature batch.
struct CorrelationReport {
  Eigen::MatrixXd rho;       ///< C x C, entries in [-1, 1]
  double mean_abs_offdiag = 0.0;
  int epoch = 0;
};

/// Singular values of the centered batch matrix, descending.
struct SpectrumReport {
  Eigen::VectorXd singular_values;
  int epoch = 0;

  /// Fraction of singular values strictly below `threshold`.
  double frac_below(double threshold) const;
};

/// Per-batch covariance-trace values recorded over a training run.
/// modes tags each entry with the sampler that produced the batch
/// (0 = random/baseline, 1 = grbs).
struct StabilityTrace {
  std::vector<double> per_batch_E;
  std::vector<int> modes;
  std::vector<std::size_t> epoch_markers;  ///< index of the first batch of each epoch

  void record(double e, int mode) {
    per_batch_E.push_back(e);
    modes.push_back(mode);
  }
  void mark_epoch() { epoch_markers.push_back(per_batch_E.size()); }
};

/// Pearson product-moment correlation matrix across channels. Zero-variance
/// channels take the convention rho = 0 off-diagonal, 1 on-diagonal.
CorrelationReport ppmcc(const FeatureBatch& batch);

/// Singular values of the row-centered batch matrix.
SpectrumReport singular_spectrum(const FeatureBatch& batch);

/// Sum of per-channel variances: the trace of the covariance matrix.
double stability_E(const Eigen::MatrixXd& covariance);

/// Histogram of the off-diagonal rho entries over `bins` equal-width bins on
/// [-1, 1]; counts returned as doubles.
std::vector<double> rho_histogram(const Eigen::MatrixXd& rho, int bins = 20);

/// One JSON-lines record per epoch. Field names are a stability contract:
/// {"epoch", "mean_abs_offdiag", "rho_hist", "singular_values",
///  "E_per_batch", "E_modes", "train_loss"}.
struct EpochRecord {
  int epoch = 0;
  double mean_abs_offdiag = 0.0;
  std::vector<double> rho_hist;
  std::vector<double> singular_values;
  std::vector<double> E_per_batch;
  std::vector<int> E_modes;
  double train_loss = 0.0;
};

/// Append-only JSON-lines report writer. I/O failures carry the path.
class DiagnosticsWriter {
 public:
  explicit DiagnosticsWriter(std::filesystem::path path);
  void write(const EpochRecord& record);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

/// Loads a JSON-lines report back; inverse of DiagnosticsWriter.
std::vector<EpochRecord> load_report(const std::filesystem::path& path);

}  // namespace whitenet
