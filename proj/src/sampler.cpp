#include "whitenet/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

namespace whitenet {

ClassInventory ClassInventory::from_counts(const std::vector<long>& counts_by_class) {
  if (counts_by_class.empty()) {
    throw InputError("class inventory needs at least one class");
  }
  const int n = static_cast<int>(counts_by_class.size());
  for (int k = 0; k < n; ++k) {
    if (counts_by_class[static_cast<std::size_t>(k)] < 1) {
      throw InputError("class " + std::to_string(k) +
                       " has no samples; every class needs a count >= 1");
    }
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return counts_by_class[static_cast<std::size_t>(a)] >
           counts_by_class[static_cast<std::size_t>(b)];
  });

  ClassInventory inv;
  inv.counts.resize(static_cast<std::size_t>(n));
  inv.rank_to_class.resize(static_cast<std::size_t>(n));
  inv.class_to_rank.resize(static_cast<std::size_t>(n));
  for (int rank = 0; rank < n; ++rank) {
    const int cls = order[static_cast<std::size_t>(rank)];
    inv.counts[static_cast<std::size_t>(rank)] =
        counts_by_class[static_cast<std::size_t>(cls)];
    inv.rank_to_class[static_cast<std::size_t>(rank)] = cls;
    inv.class_to_rank[static_cast<std::size_t>(cls)] = rank;
  }
  return inv;
}

ClassInventory ClassInventory::from_dataset(const Dataset& dataset) {
  return from_counts(dataset.class_counts());
}

GroupPlan build_groups(const ClassInventory& inventory, int group_count) {
  const int n = inventory.num_classes();
  if (group_count < 1) {
    throw InputError("group count must be >= 1");
  }
  if (group_count > n) {
    throw InputError("group count " + std::to_string(group_count) +
                     " exceeds class count " + std::to_string(n));
  }

  GroupPlan plan;
  plan.group_count = group_count;
  plan.classes_per_group = (n + group_count - 1) / group_count;
  plan.groups.resize(static_cast<std::size_t>(group_count));
  for (int g = 0; g < group_count; ++g) {
    auto& group = plan.groups[static_cast<std::size_t>(g)];
    long group_total = 0;
    for (int rank = g; rank < n; rank += group_count) {
      GroupPlan::ClassSlot slot;
      slot.rank = rank;
      slot.class_id = inventory.rank_to_class[static_cast<std::size_t>(rank)];
      slot.count = inventory.counts[static_cast<std::size_t>(rank)];
      group.classes.push_back(slot);
      group_total += slot.count;
    }
    for (auto& slot : group.classes) {
      slot.natural_ratio =
          static_cast<double>(slot.count) / static_cast<double>(group_total);
    }
  }
  return plan;
}

double compute_r_min(const ClassInventory& inventory, const GroupPlan& plan,
                     double r0, double alpha, int batch_size) {
  const double f = static_cast<double>(plan.classes_per_group);
  if (!(r0 > 0.0) || r0 > 1.0 / f + 1e-12) {
    throw InputError("r0 must lie in (0, 1/F]");
  }
  if (!(alpha > 0.0)) {
    throw InputError("alpha must be positive");
  }
  if (batch_size < plan.classes_per_group) {
    throw InputError("batch size must be at least the group size F");
  }

  const double smallest = static_cast<double>(inventory.smallest_count());
  const double scale = (smallest / alpha) / (static_cast<double>(batch_size) / f);

  double r_min;
  if (scale < 1.0) {
    r_min = r0;
  } else if (scale < GroupPlan::kScaleThreshold) {
    r_min = scale * r0;
  } else {
    r_min = 1.0 / f;
  }
  // The middle branch can overshoot the per-group budget; a minimum
  // probability above 1/F is meaningless, so cap at the class-balanced limit.
  return std::min(r_min, 1.0 / f);
}

GroupPlan compute_probs(GroupPlan plan, double r_min) {
  for (auto& group : plan.groups) {
    const int f_g = static_cast<int>(group.classes.size());
    const double uniform = 1.0 / static_cast<double>(f_g);

    if (r_min >= uniform - 1e-12) {
      // Class-balanced limit: every class in the group samples uniformly.
      for (auto& slot : group.classes) {
        slot.prob = uniform;
        slot.boosted = true;
      }
      group.boosted_count = f_g;
      continue;
    }

    double boosted_mass = 0.0;
    double remaining_ratio = 0.0;
    int boosted = 0;
    for (auto& slot : group.classes) {
      slot.boosted = slot.natural_ratio <= r_min;
      if (slot.boosted) {
        ++boosted;
        boosted_mass += r_min;
      } else {
        remaining_ratio += slot.natural_ratio;
      }
    }
    group.boosted_count = boosted;

    if (boosted == f_g) {
      if (std::abs(boosted_mass - 1.0) > 1e-9) {
        for (auto& slot : group.classes) slot.prob = uniform;
        group.degenerate = true;
      } else {
        for (auto& slot : group.classes) slot.prob = r_min;
      }
      continue;
    }

    const double rescale = (1.0 - boosted_mass) / remaining_ratio;
    for (auto& slot : group.classes) {
      slot.prob = slot.boosted ? r_min : slot.natural_ratio * rescale;
    }
  }
  plan.r_min = r_min;
  plan.probabilities_ready = true;
  return plan;
}

GroupPlan build_plan(const ClassInventory& inventory, int group_count,
                     double r0, double alpha, int batch_size) {
  GroupPlan plan = build_groups(inventory, group_count);
  const double r_min = compute_r_min(inventory, plan, r0, alpha, batch_size);
  plan = compute_probs(std::move(plan), r_min);
  plan.batch_size = batch_size;
  plan.r0 = r0;
  plan.alpha = alpha;
  plan.scale = (static_cast<double>(inventory.smallest_count()) / alpha) /
               (static_cast<double>(batch_size) /
                static_cast<double>(plan.classes_per_group));
  return plan;
}

nlohmann::json plan_to_json(const GroupPlan& plan) {
  nlohmann::json groups = nlohmann::json::array();
  for (std::size_t g = 0; g < plan.groups.size(); ++g) {
    const auto& group = plan.groups[g];
    nlohmann::json classes = nlohmann::json::array();
    double sum_r = 0.0;
    for (const auto& slot : group.classes) {
      classes.push_back({{"rank", slot.rank + 1},
                         {"class_id", slot.class_id},
                         {"count", slot.count},
                         {"R", slot.natural_ratio},
                         {"r", slot.prob},
                         {"boosted", slot.boosted}});
      sum_r += slot.prob;
    }
    groups.push_back({{"index", g + 1},
                      {"size", group.classes.size()},
                      {"F_prime", group.boosted_count},
                      {"degenerate", group.degenerate},
                      {"sum_r", sum_r},
                      {"classes", std::move(classes)}});
  }
  return nlohmann::json{{"G", plan.group_count},
                        {"F", plan.classes_per_group},
                        {"B", plan.batch_size},
                        {"r0", plan.r0},
                        {"alpha", plan.alpha},
                        {"S", plan.scale},
                        {"S0", GroupPlan::kScaleThreshold},
                        {"r_min", plan.r_min},
                        {"groups", std::move(groups)}};
}

GrbsBatchSampler::GrbsBatchSampler(const Dataset& dataset, GroupPlan plan,
                                   std::uint64_t seed)
    : dataset_(&dataset), plan_(std::move(plan)), rng_(seed) {
  if (!plan_.probabilities_ready) {
    throw InputError("grbs sampler needs a completed plan (compute_probs)");
  }
  if (plan_.batch_size < 1) {
    throw InputError("grbs plan has no batch size");
  }
  for (const auto& group : plan_.groups) {
    std::vector<double> cdf;
    cdf.reserve(group.classes.size());
    double acc = 0.0;
    for (const auto& slot : group.classes) {
      acc += slot.prob;
      cdf.push_back(acc);
    }
    cdf.back() = 1.0;
    group_cdfs_.push_back(std::move(cdf));
  }
}

std::optional<Batch> GrbsBatchSampler::next() {
  const auto g = static_cast<std::size_t>(next_group_);
  next_group_ = (next_group_ + 1) % plan_.group_count;
  const auto& group = plan_.groups[g];
  const auto& cdf = group_cdfs_[g];

  Batch batch;
  batch.reserve(static_cast<std::size_t>(plan_.batch_size));
  for (int i = 0; i < plan_.batch_size; ++i) {
    const auto slot_idx = sample_from_cdf(cdf, rng_.uniform());
    const auto& slot = group.classes[slot_idx];
    const auto& members =
        dataset_->class_indices[static_cast<std::size_t>(slot.class_id)];
    if (members.empty()) {
      throw InputError("class " + std::to_string(slot.class_id) +
                       " has no samples in the dataset");
    }
    const long sample = members[rng_.uniform_index(members.size())];
    batch.push_back({sample, slot.class_id});
  }
  return batch;
}

RandomBatchSampler::RandomBatchSampler(const Dataset& dataset, int batch_size,
                                       std::uint64_t seed)
    : dataset_(&dataset), batch_size_(batch_size), rng_(seed) {
  if (dataset.size() < 1) throw InputError("empty dataset");
  if (batch_size < 1) throw InputError("batch size must be >= 1");
}

std::optional<Batch> RandomBatchSampler::next() {
  Batch batch;
  batch.reserve(static_cast<std::size_t>(batch_size_));
  for (int i = 0; i < batch_size_; ++i) {
    const long sample =
        static_cast<long>(rng_.uniform_index(static_cast<std::size_t>(dataset_->size())));
    batch.push_back({sample, dataset_->labels[static_cast<std::size_t>(sample)]});
  }
  return batch;
}

ClassBalancedBatchSampler::ClassBalancedBatchSampler(const Dataset& dataset,
                                                     int batch_size,
                                                     std::uint64_t seed)
    : dataset_(&dataset), batch_size_(batch_size), rng_(seed) {
  if (dataset.num_classes < 1) throw InputError("dataset has no classes");
  if (batch_size < 1) throw InputError("batch size must be >= 1");
  for (int k = 0; k < dataset.num_classes; ++k) {
    if (dataset.class_indices[static_cast<std::size_t>(k)].empty()) {
      throw InputError("class " + std::to_string(k) +
                       " has no samples; class-balanced sampling impossible");
    }
  }
}

std::optional<Batch> ClassBalancedBatchSampler::next() {
  Batch batch;
  batch.reserve(static_cast<std::size_t>(batch_size_));
  for (int i = 0; i < batch_size_; ++i) {
    const int cls = static_cast<int>(
        rng_.uniform_index(static_cast<std::size_t>(dataset_->num_classes)));
    const auto& members = dataset_->class_indices[static_cast<std::size_t>(cls)];
    const long sample = members[rng_.uniform_index(members.size())];
    batch.push_back({sample, cls});
  }
  return batch;
}

}  // namespace whitenet
