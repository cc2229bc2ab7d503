#include "whitenet/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "whitenet/rng.hpp"

namespace whitenet {

std::vector<long> longtail_counts(int num_classes, long n_max, double gamma) {
  if (num_classes < 1 || n_max < 1 || gamma < 1.0) {
    throw InputError("long-tail profile needs num_classes >= 1, n_max >= 1, gamma >= 1");
  }
  std::vector<long> counts(static_cast<std::size_t>(num_classes));
  for (int k = 0; k < num_classes; ++k) {
    const double exponent =
        num_classes > 1 ? -static_cast<double>(k) / (num_classes - 1) : 0.0;
    const double value = static_cast<double>(n_max) * std::pow(gamma, exponent);
    counts[static_cast<std::size_t>(k)] = std::max(1L, std::lround(value));
  }
  return counts;
}

std::vector<long> Dataset::class_counts() const {
  std::vector<long> counts(static_cast<std::size_t>(num_classes), 0);
  for (int label : labels) counts[static_cast<std::size_t>(label)]++;
  return counts;
}

void reindex(Dataset& dataset, int num_classes) {
  if (num_classes <= 0) {
    int max_label = -1;
    for (int label : dataset.labels) max_label = std::max(max_label, label);
    num_classes = max_label + 1;
  }
  dataset.num_classes = num_classes;
  dataset.class_indices.assign(static_cast<std::size_t>(num_classes), {});
  for (long i = 0; i < dataset.size(); ++i) {
    const int label = dataset.labels[static_cast<std::size_t>(i)];
    if (label < 0 || label >= num_classes) {
      throw InputError("label " + std::to_string(label) + " out of range");
    }
    dataset.class_indices[static_cast<std::size_t>(label)].push_back(i);
  }
}

std::vector<int> missing_classes(const Dataset& dataset) {
  std::vector<int> missing;
  for (int k = 0; k < dataset.num_classes; ++k) {
    if (dataset.class_indices[static_cast<std::size_t>(k)].empty()) {
      missing.push_back(k);
    }
  }
  return missing;
}

namespace {

Eigen::MatrixXd class_means(const ImbalanceSpec& spec) {
  Eigen::MatrixXd means(spec.feature_dim, spec.num_classes);
  if (spec.num_classes <= spec.feature_dim) {
    means.setZero();
    for (int k = 0; k < spec.num_classes; ++k) {
      means(k, k) = spec.class_distance;
    }
  } else {
    for (int k = 0; k < spec.num_classes; ++k) {
      Rng rng(derive_seed(spec.seed, 0x6d65616e00ull + static_cast<std::uint64_t>(k)));
      Eigen::VectorXd dir(spec.feature_dim);
      for (int d = 0; d < spec.feature_dim; ++d) dir(d) = rng.normal();
      means.col(k) = spec.class_distance * dir.normalized();
    }
  }
  return means;
}

Dataset draw_split(const ImbalanceSpec& spec, const Eigen::MatrixXd& means,
                   const std::vector<long>& counts, std::uint64_t split_tag) {
  long total = 0;
  for (long c : counts) total += c;

  Dataset out;
  out.features.resize(spec.feature_dim, total);
  out.labels.reserve(static_cast<std::size_t>(total));

  long col = 0;
  for (int k = 0; k < spec.num_classes; ++k) {
    Rng rng(derive_seed(spec.seed, split_tag + static_cast<std::uint64_t>(k)));
    for (long i = 0; i < counts[static_cast<std::size_t>(k)]; ++i) {
      for (int d = 0; d < spec.feature_dim; ++d) {
        out.features(d, col) = means(d, k) + spec.noise_scale * rng.normal();
      }
      out.labels.push_back(k);
      ++col;
    }
  }
  reindex(out, spec.num_classes);
  return out;
}

}  // namespace

SplitDataset generate(const ImbalanceSpec& spec) {
  if (spec.num_classes < 1 || spec.feature_dim < 1 || spec.n_max < 1 ||
      spec.gamma < 1.0 || spec.noise_scale < 0.0 || spec.test_per_class < 1) {
    throw InputError("invalid imbalance spec");
  }
  const Eigen::MatrixXd means = class_means(spec);
  const auto train_counts = longtail_counts(spec.num_classes, spec.n_max, spec.gamma);
  const std::vector<long> test_counts(static_cast<std::size_t>(spec.num_classes),
                                      spec.test_per_class);
  SplitDataset split;
  split.train = draw_split(spec, means, train_counts, 0x747261696e00ull);
  split.test = draw_split(spec, means, test_counts, 0x7465737400ull);
  return split;
}

namespace {

double parse_field(const std::string& field, const std::filesystem::path& path,
                   std::size_t line_no) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t' || *(end - 1) == '\r'))
    --end;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || begin == end) {
    throw InputError(path.string() + ":" + std::to_string(line_no) +
                     ": non-numeric field '" + field + "'");
  }
  return value;
}

}  // namespace

Dataset load_tabular(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open dataset file: " + path.string());
  }

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      fields.push_back(parse_field(field, path, line_no));
    }
    if (fields.size() < 2) {
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": expected 'label, f1, ..., fD'");
    }
    const double label_value = fields[0];
    const int label = static_cast<int>(label_value);
    if (label < 0 || static_cast<double>(label) != label_value) {
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": label must be a non-negative integer");
    }
    if (dim == 0) {
      dim = fields.size() - 1;
    } else if (fields.size() - 1 != dim) {
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": ragged row, expected " + std::to_string(dim) +
                       " features, got " + std::to_string(fields.size() - 1));
    }
    labels.push_back(label);
    rows.push_back(std::vector<double>(fields.begin() + 1, fields.end()));
  }
  if (rows.empty()) {
    throw InputError(path.string() + ": dataset file has no rows");
  }

  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(dim),
                      static_cast<Eigen::Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t d = 0; d < dim; ++d) {
      out.features(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(j)) =
          rows[j][d];
    }
  }
  out.labels = std::move(labels);
  reindex(out);
  return out;
}

void save_tabular(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open dataset file for writing: " + path.string());
  }
  out.precision(17);
  for (long j = 0; j < dataset.size(); ++j) {
    out << dataset.labels[static_cast<std::size_t>(j)];
    for (int d = 0; d < dataset.dim(); ++d) {
      out << ',' << dataset.features(d, j);
    }
    out << '\n';
  }
  if (!out) {
    throw IoError("write failed: " + path.string());
  }
}

}  // namespace whitenet
