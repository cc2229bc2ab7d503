#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "whitenet/dataset.hpp"
#include "whitenet/rng.hpp"

namespace whitenet {

/// Per-class sample counts sorted descending, with the mapping between
/// original class ids and sorted ranks.
struct ClassInventory {
  std::vector<long> counts;        ///< descending
  std::vector<int> rank_to_class;  ///< rank (0-based) -> original class id
  std::vector<int> class_to_rank;

  int num_classes() const { return static_cast<int>(counts.size()); }
  long smallest_count() const { return counts.back(); }
  double imbalance_factor() const {
    return static_cast<double>(counts.front()) / static_cast<double>(counts.back());
  }

  /// counts_by_class[k] is the sample count of class id k; all must be >= 1.
  /// Ties sort by class id for determinism.
  static ClassInventory from_counts(const std::vector<long>& counts_by_class);
  static ClassInventory from_dataset(const Dataset& dataset);
};

/// The full grouped-sampling artifact: stride group assignment, natural
/// per-group ratios, and the corrected sampling probabilities.
struct GroupPlan {
  struct ClassSlot {
    int rank = 0;      ///< 0-based sorted rank
    int class_id = 0;  ///< original class id
    long count = 0;
    double natural_ratio = 0.0;  ///< R, count / group total
    double prob = 0.0;           ///< r, corrected sampling probability
    bool boosted = false;        ///< receives exactly r_min
  };
  struct Group {
    std::vector<ClassSlot> classes;
    int boosted_count = 0;   ///< F'
    bool degenerate = false; ///< fell back to uniform because every ratio was boosted
  };

  int group_count = 0;      ///< G
  int classes_per_group = 0;///< F = ceil(N/G); individual groups may hold one less
  int batch_size = 0;       ///< B
  double r0 = 0.0;
  double alpha = 0.0;
  double scale = 0.0;       ///< S = (Q_N / alpha) / (B / F)
  double r_min = 0.0;
  bool probabilities_ready = false;
  std::vector<Group> groups;

  static constexpr double kScaleThreshold = 10.0;  ///< S0
};

/// Stride assignment: group g holds sorted ranks {g, g+G, g+2G, ...}
/// (1-based), so group sizes differ by at most one when G does not divide N.
/// Fills groups and natural ratios; probabilities come from compute_probs.
GroupPlan build_groups(const ClassInventory& inventory, int group_count);

/// Minimum sampling probability for tail classes:
///   S = (Q_N / alpha) / (B / F)
///   r_min = r0 if S < 1; S*r0 if 1 <= S < S0; 1/F if S >= S0
/// clamped to at most 1/F. Requires r0 in (0, 1/F], alpha > 0, B >= F.
double compute_r_min(const ClassInventory& inventory, const GroupPlan& plan,
                     double r0, double alpha, int batch_size);

/// Completes the plan: per group, classes with natural ratio <= r_min receive
/// exactly r_min (they define F'); the rest share 1 - F'*r_min proportionally
/// to their natural ratios. When r_min reaches 1/F the group becomes
/// uniform (the class-balanced limit of the scale rule).
GroupPlan compute_probs(GroupPlan plan, double r_min);

/// build_groups + compute_r_min + compute_probs, with the scalars recorded.
GroupPlan build_plan(const ClassInventory& inventory, int group_count,
                     double r0, double alpha, int batch_size);

/// Auditable JSON dump of the plan (groups, R, r, r_min, S, F', sum_r).
nlohmann::json plan_to_json(const GroupPlan& plan);

/// One drawn training example.
struct BatchItem {
  long sample_index = 0;
  int class_id = 0;
};
using Batch = std::vector<BatchItem>;

/// A source of mini batches. Generators are infinite; finite streams signal
/// exhaustion with nullopt.
class BatchStream {
 public:
  virtual ~BatchStream() = default;
  virtual std::optional<Batch> next() = 0;
};

/// GRBS batches: groups are visited round-robin; within the selected group,
/// B class labels are drawn i.i.d. from the corrected probabilities, then one
/// sample uniformly with replacement inside each drawn class.
class GrbsBatchSampler : public BatchStream {
 public:
  GrbsBatchSampler(const Dataset& dataset, GroupPlan plan, std::uint64_t seed);
  std::optional<Batch> next() override;
  const GroupPlan& plan() const { return plan_; }

 private:
  const Dataset* dataset_;
  GroupPlan plan_;
  std::vector<std::vector<double>> group_cdfs_;
  Rng rng_;
  int next_group_ = 0;
};

/// Uniform i.i.d. draws over all samples, with replacement.
class RandomBatchSampler : public BatchStream {
 public:
  RandomBatchSampler(const Dataset& dataset, int batch_size, std::uint64_t seed);
  std::optional<Batch> next() override;

 private:
  const Dataset* dataset_;
  int batch_size_;
  Rng rng_;
};

/// Uniform over classes, then uniform within the class.
class ClassBalancedBatchSampler : public BatchStream {
 public:
  ClassBalancedBatchSampler(const Dataset& dataset, int batch_size,
                            std::uint64_t seed);
  std::optional<Batch> next() override;

 private:
  const Dataset* dataset_;
  int batch_size_;
  Rng rng_;
};

}  // namespace whitenet
