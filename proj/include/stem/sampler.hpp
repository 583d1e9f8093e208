#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stem/transition.hpp"

namespace stem {

struct SubsetItem {
  std::string sample_id;
  int ti = 0;

  friend bool operator==(const SubsetItem&, const SubsetItem&) = default;
};

struct BalancedSubset {
  std::size_t per_class_count = 0;  // m
  std::uint64_t seed = 0;
  std::string family_id;
  std::string benchmark_id;
  /// Ordered by class ascending, then draw order.
  std::vector<SubsetItem> items;
  /// One entry per underfilled class when underfill was allowed.
  std::vector<std::string> warnings;

  std::map<int, std::size_t> class_counts() const;
};

struct SubsetOptions {
  /// Classes to draw from; empty means all of 1..n+1.
  std::vector<int> classes;
  /// Take min(m, available) instead of failing on a short bucket.
  bool allow_underfill = false;
};

/// Draws m samples per class uniformly without replacement. A single Rng
/// seeded with `seed` walks the classes in ascending order; each bucket is
/// drawn by partial Fisher-Yates over its sample_id-sorted contents.
BalancedSubset sample_balanced_subset(const StsPool& pool, std::size_t m, std::uint64_t seed,
                                      const SubsetOptions& options = {});

enum class ViolationKind { ClassCount, Membership, Duplicate };

const char* to_string(ViolationKind kind) noexcept;

struct Violation {
  ViolationKind kind;
  std::string sample_id;  // empty for class-count violations
  int ti = 0;
  std::string message;
};

struct SubsetValidation {
  std::vector<Violation> violations;
  std::map<int, std::size_t> class_counts;

  bool ok() const noexcept { return violations.empty(); }
  std::size_t count(ViolationKind kind) const;
};

SubsetValidation validate_subset(const BalancedSubset& subset, const StsPool& pool);

}  // namespace stem
