#include "whitenet/diagnostics.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

namespace whitenet {

namespace {

// A channel whose centered sum of squares is at this level or below is
// treated as constant; the bound absorbs the rounding of the mean pass.
double dead_channel_floor(const Eigen::RowVectorXd& row) {
  const double maxsq = row.cwiseAbs().maxCoeff();
  const double eps = std::numeric_limits<double>::epsilon();
  return 4.0 * static_cast<double>(row.size()) * (eps * maxsq) * (eps * maxsq);
}

}  // namespace

CorrelationReport ppmcc(const FeatureBatch& batch) {
  validate_batch(batch, 2);
  const auto c = batch.channels();

  Eigen::MatrixXd centered =
      batch.data.colwise() - batch.data.rowwise().mean().eval();
  Eigen::VectorXd ss = centered.rowwise().squaredNorm();
  std::vector<bool> dead(static_cast<std::size_t>(c));
  for (Eigen::Index i = 0; i < c; ++i) {
    dead[static_cast<std::size_t>(i)] = ss(i) <= dead_channel_floor(batch.data.row(i));
  }

  CorrelationReport report;
  report.rho = Eigen::MatrixXd::Identity(c, c);
  double abs_sum = 0.0;
  for (Eigen::Index i = 0; i < c; ++i) {
    for (Eigen::Index j = i + 1; j < c; ++j) {
      double value = 0.0;
      if (!dead[static_cast<std::size_t>(i)] && !dead[static_cast<std::size_t>(j)]) {
        value = centered.row(i).dot(centered.row(j)) /
                (std::sqrt(ss(i)) * std::sqrt(ss(j)));
        value = std::clamp(value, -1.0, 1.0);
      }
      report.rho(i, j) = value;
      report.rho(j, i) = value;
      abs_sum += std::abs(value);
    }
  }
  const auto pairs = static_cast<double>(c * (c - 1) / 2);
  report.mean_abs_offdiag = pairs > 0 ? abs_sum / pairs : 0.0;
  return report;
}

SpectrumReport singular_spectrum(const FeatureBatch& batch) {
  validate_batch(batch, 1);
  Eigen::MatrixXd centered =
      batch.data.colwise() - batch.data.rowwise().mean().eval();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
  SpectrumReport report;
  report.singular_values = svd.singularValues();
  return report;
}

double SpectrumReport::frac_below(double threshold) const {
  if (singular_values.size() == 0) return 0.0;
  const auto below =
      (singular_values.array() < threshold).count();
  return static_cast<double>(below) /
         static_cast<double>(singular_values.size());
}

double stability_E(const Eigen::MatrixXd& covariance) {
  if (covariance.rows() != covariance.cols()) {
    throw InputError("stability metric needs a square covariance matrix");
  }
  return covariance.trace();
}

std::vector<double> rho_histogram(const Eigen::MatrixXd& rho, int bins) {
  std::vector<double> hist(static_cast<std::size_t>(bins), 0.0);
  const auto c = rho.rows();
  for (Eigen::Index i = 0; i < c; ++i) {
    for (Eigen::Index j = i + 1; j < c; ++j) {
      const double v = std::clamp(rho(i, j), -1.0, 1.0);
      auto bin = static_cast<int>((v + 1.0) / 2.0 * bins);
      bin = std::clamp(bin, 0, bins - 1);
      hist[static_cast<std::size_t>(bin)] += 1.0;
    }
  }
  return hist;
}

DiagnosticsWriter::DiagnosticsWriter(std::filesystem::path path)
    : path_(std::move(path)), out_(path_, std::ios::app) {
  if (!out_) {
    throw IoError("cannot open diagnostics report for writing: " + path_.string());
  }
}

void DiagnosticsWriter::write(const EpochRecord& record) {
  nlohmann::json line = {
      {"epoch", record.epoch},
      {"mean_abs_offdiag", record.mean_abs_offdiag},
      {"rho_hist", record.rho_hist},
      {"singular_values", record.singular_values},
      {"E_per_batch", record.E_per_batch},
      {"E_modes", record.E_modes},
      {"train_loss", record.train_loss},
  };
  out_ << line.dump() << '\n';
  out_.flush();
  if (!out_) {
    throw IoError("write to diagnostics report failed: " + path_.string());
  }
}

std::vector<EpochRecord> load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open diagnostics report: " + path.string());
  }
  std::vector<EpochRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw IoError(path.string() + ":" + std::to_string(line_no) +
                    ": bad report line: " + e.what());
    }
    EpochRecord r;
    r.epoch = j.at("epoch").get<int>();
    r.mean_abs_offdiag = j.at("mean_abs_offdiag").get<double>();
    r.rho_hist = j.at("rho_hist").get<std::vector<double>>();
    r.singular_values = j.at("singular_values").get<std::vector<double>>();
    r.E_per_batch = j.at("E_per_batch").get<std::vector<double>>();
    r.E_modes = j.at("E_modes").get<std::vector<int>>();
    r.train_loss = j.at("train_loss").get<double>();
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace whitenet
