#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stem/ingestion.hpp"
#include "stem/types.hpp"

namespace stem {

enum class IrvKind { Valid, NonMonotonic, InferenceError };

const char* to_string(IrvKind kind) noexcept;

struct IrvClass {
  IrvKind kind = IrvKind::Valid;
  /// 1-based index of the smallest model answering correctly; n+1 when no
  /// model does. Present iff kind == Valid.
  std::optional<int> transition_index;

  friend bool operator==(const IrvClass&, const IrvClass&) = default;
};

/// Classifies an inference result vector (length >= 2):
///   any -1                       -> InferenceError
///   0/1 but not non-decreasing   -> NonMonotonic
///   0^a 1^b                      -> Valid with TI = a + 1
IrvClass classify_irv(std::span<const Outcome> irv);

/// Samples bucketed by transition index. Keys are exactly 1..n+1; each
/// bucket is sorted by sample_id.
struct StsPool {
  std::string family_id;
  std::string benchmark_id;
  std::size_t model_count = 0;
  std::map<int, std::vector<std::string>> buckets;

  std::size_t size() const;
  int max_class() const { return static_cast<int>(model_count) + 1; }
};

struct PoolSummary {
  std::size_t total = 0;
  std::map<int, std::size_t> per_ti_count;
  std::size_t abnormal_count = 0;  // NonMonotonic
  std::size_t error_count = 0;     // InferenceError

  double per_ti_fraction(int k) const;
  double abnormal_fraction() const;
  double error_fraction() const;
  /// Abnormal and erroneous together, i.e. everything outside the pool.
  double rejected_fraction() const;
};

struct PoolReject {
  std::string sample_id;
  IrvClass cls;
};

struct PoolBuild {
  StsPool pool;
  PoolSummary summary;
  std::vector<PoolReject> rejects;  // sorted by sample_id
};

PoolBuild build_sts_pool(const OutcomeMatrix& matrix);

/// NonMonotonic sample ids, sorted. Inference errors are not contamination.
std::vector<std::string> flag_contamination(const OutcomeMatrix& matrix);

}  // namespace stem
