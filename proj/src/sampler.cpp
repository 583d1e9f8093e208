#include "stem/sampler.hpp"

#include <algorithm>
#include <set>

#include "stem/error.hpp"
#include "stem/rng.hpp"

namespace stem {

std::map<int, std::size_t> BalancedSubset::class_counts() const {
  std::map<int, std::size_t> counts;
  for (const auto& item : items) ++counts[item.ti];
  return counts;
}

BalancedSubset sample_balanced_subset(const StsPool& pool, std::size_t m, std::uint64_t seed,
                                      const SubsetOptions& options) {
  if (m == 0) throw ArgumentError("per-class count m must be positive");

  std::vector<int> classes = options.classes;
  if (classes.empty()) {
    for (int k = 1; k <= pool.max_class(); ++k) classes.push_back(k);
  }
  std::ranges::sort(classes);
  if (std::ranges::adjacent_find(classes) != classes.end())
    throw ArgumentError("duplicate class in class list");
  for (int k : classes)
    if (k < 1 || k > pool.max_class())
      throw ArgumentError("class " + std::to_string(k) + " outside 1.." +
                          std::to_string(pool.max_class()));

  BalancedSubset subset;
  subset.per_class_count = m;
  subset.seed = seed;
  subset.family_id = pool.family_id;
  subset.benchmark_id = pool.benchmark_id;

  // Check every class before drawing so a failure names the first short class.
  for (int k : classes) {
    const auto it = pool.buckets.find(k);
    const std::size_t available = it == pool.buckets.end() ? 0 : it->second.size();
    if (available < m && !options.allow_underfill)
      throw DataError("class " + std::to_string(k) + " has " + std::to_string(available) +
                      " < " + std::to_string(m));
  }

  Rng rng(seed);
  for (int k : classes) {
    const auto it = pool.buckets.find(k);
    if (it == pool.buckets.end()) {
      subset.warnings.push_back("class " + std::to_string(k) + " has 0 < " + std::to_string(m));
      continue;
    }
    std::vector<std::string> bucket = it->second;
    std::ranges::sort(bucket);
    const std::size_t take = std::min(m, bucket.size());
    if (take < m)
      subset.warnings.push_back("class " + std::to_string(k) + " has " +
                                std::to_string(bucket.size()) + " < " + std::to_string(m));
    for (std::size_t idx : rng.sample_indices(bucket.size(), take))
      subset.items.push_back({bucket[idx], k});
  }
  return subset;
}

const char* to_string(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::ClassCount: return "class_count";
    case ViolationKind::Membership: return "membership";
    case ViolationKind::Duplicate: return "duplicate";
  }
  return "unknown";
}

std::size_t SubsetValidation::count(ViolationKind kind) const {
  return static_cast<std::size_t>(
      std::ranges::count_if(violations, [kind](const Violation& v) { return v.kind == kind; }));
}

SubsetValidation validate_subset(const BalancedSubset& subset, const StsPool& pool) {
  SubsetValidation report;
  report.class_counts = subset.class_counts();

  std::set<std::string> seen;
  for (const auto& item : subset.items) {
    if (!seen.insert(item.sample_id).second)
      report.violations.push_back({ViolationKind::Duplicate, item.sample_id, item.ti,
                                   "sample " + item.sample_id + " appears more than once"});
    const auto it = pool.buckets.find(item.ti);
    const bool member =
        it != pool.buckets.end() && std::ranges::find(it->second, item.sample_id) != it->second.end();
    if (!member)
      report.violations.push_back({ViolationKind::Membership, item.sample_id, item.ti,
                                   "sample " + item.sample_id + " is not in pool class " +
                                       std::to_string(item.ti)});
  }

  // A class may legitimately hold fewer than m items only when its bucket is
  // smaller than m (underfill mode).
  for (const auto& [k, count] : report.class_counts) {
    const auto it = pool.buckets.find(k);
    const std::size_t available = it == pool.buckets.end() ? 0 : it->second.size();
    const std::size_t expected = std::min(subset.per_class_count, available);
    if (count != expected)
      report.violations.push_back({ViolationKind::ClassCount, "", k,
                                   "class " + std::to_string(k) + " has " + std::to_string(count) +
                                       " items, expected " + std::to_string(expected)});
  }
  return report;
}

}  // namespace stem
