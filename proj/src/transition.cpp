#include "stem/transition.hpp"

#include <algorithm>

#include "stem/error.hpp"

namespace stem {

const char* to_string(IrvKind kind) noexcept {
  switch (kind) {
    case IrvKind::Valid: return "valid";
    case IrvKind::NonMonotonic: return "non_monotonic";
    case IrvKind::InferenceError: return "inference_error";
  }
  return "unknown";
}

IrvClass classify_irv(std::span<const Outcome> irv) {
  if (irv.size() < 2) throw ArgumentError("IRV must have at least 2 entries");
  if (std::ranges::find(irv, Outcome::Error) != irv.end()) return {IrvKind::InferenceError, {}};

  const auto first_correct = std::ranges::find(irv, Outcome::Correct);
  if (std::find(first_correct, irv.end(), Outcome::Wrong) != irv.end())
    return {IrvKind::NonMonotonic, {}};
  return {IrvKind::Valid, static_cast<int>(first_correct - irv.begin()) + 1};
}

std::size_t StsPool::size() const {
  std::size_t n = 0;
  for (const auto& [_, ids] : buckets) n += ids.size();
  return n;
}

double PoolSummary::per_ti_fraction(int k) const {
  const auto it = per_ti_count.find(k);
  if (total == 0 || it == per_ti_count.end()) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(total);
}

double PoolSummary::abnormal_fraction() const {
  return total == 0 ? 0.0 : static_cast<double>(abnormal_count) / static_cast<double>(total);
}

double PoolSummary::error_fraction() const {
  return total == 0 ? 0.0 : static_cast<double>(error_count) / static_cast<double>(total);
}

double PoolSummary::rejected_fraction() const {
  return total == 0 ? 0.0
                    : static_cast<double>(abnormal_count + error_count) / static_cast<double>(total);
}

PoolBuild build_sts_pool(const OutcomeMatrix& matrix) {
  if (matrix.entries.empty()) throw DataError("cannot build a pool from an empty matrix");
  const std::size_t n = matrix.family.size();

  PoolBuild out;
  out.pool.family_id = matrix.family.family_id();
  out.pool.benchmark_id = matrix.benchmark_id;
  out.pool.model_count = n;
  for (int k = 1; k <= static_cast<int>(n) + 1; ++k) {
    out.pool.buckets[k];
    out.summary.per_ti_count[k] = 0;
  }

  // entries is an ordered map, so buckets and rejects come out sorted.
  for (const auto& [sid, vec] : matrix.entries) {
    if (vec.size() != n)
      throw DataError("sample " + sid + " has " + std::to_string(vec.size()) +
                      " outcomes, family has " + std::to_string(n));
    const IrvClass cls = classify_irv(vec);
    ++out.summary.total;
    switch (cls.kind) {
      case IrvKind::Valid:
        out.pool.buckets[*cls.transition_index].push_back(sid);
        ++out.summary.per_ti_count[*cls.transition_index];
        break;
      case IrvKind::NonMonotonic:
        ++out.summary.abnormal_count;
        out.rejects.push_back({sid, cls});
        break;
      case IrvKind::InferenceError:
        ++out.summary.error_count;
        out.rejects.push_back({sid, cls});
        break;
    }
  }
  return out;
}

std::vector<std::string> flag_contamination(const OutcomeMatrix& matrix) {
  if (matrix.entries.empty()) throw DataError("cannot scan an empty matrix");
  std::vector<std::string> flagged;
  for (const auto& [sid, vec] : matrix.entries)
    if (classify_irv(vec).kind == IrvKind::NonMonotonic) flagged.push_back(sid);
  return flagged;
}

}  // namespace stem
