#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stem/sampler.hpp"
#include "stem/types.hpp"

namespace stem {

struct ClassTally {
  std::size_t correct = 0;
  std::size_t wrong = 0;
  std::size_t error = 0;

  std::size_t total() const noexcept { return correct + wrong + error; }
};

/// Accuracy of one model on each TI class of a balanced subset.
struct TIAccuracyProfile {
  std::map<int, double> accuracy;  // percent
  std::map<int, ClassTally> counts;
  std::uint64_t subset_seed = 0;
  std::string benchmark_id;
};

/// -1 outcomes count as incorrect and are tallied in the error column.
TIAccuracyProfile ti_accuracy_profile(const BalancedSubset& subset,
                                      const std::map<std::string, Outcome>& outcomes);

/// Builds a profile directly from per-class accuracies (no tallies).
TIAccuracyProfile profile_from_accuracies(std::map<int, double> accuracy);

struct Drop {
  int from = 0;
  int to = 0;
  double magnitude = 0.0;  // percentage points
};

/// Every k with accuracy(k) - accuracy(k+1) >= threshold_pp, ascending.
std::vector<Drop> qualifying_drops(const TIAccuracyProfile& profile, double threshold_pp);

/// The first qualifying drop, if any. The profile must cover 1..K
/// consecutively.
std::optional<Drop> detect_drop(const TIAccuracyProfile& profile, double threshold_pp);

inline constexpr double kDefaultDropThreshold = 15.0;
inline constexpr double kDefaultFloorPct = 50.0;

struct CapabilityEstimate {
  Interval interval;
  std::optional<Drop> drop;
  std::vector<std::string> confidence_flags;
};

/// Below-family when accuracy(1) < floor_pct; otherwise (M_k, M_{k+1}) for
/// the first drop at (k, k+1), or (M_n, above_family) when nothing drops.
CapabilityEstimate estimate_capability(const TIAccuracyProfile& profile, const ModelFamily& family,
                                       double threshold_pp = kDefaultDropThreshold,
                                       double floor_pct = kDefaultFloorPct);

struct TrialAggregate {
  std::size_t trials = 0;
  std::map<Interval, std::size_t> interval_histogram;
  std::size_t matches = 0;
  double accuracy_rate = 0.0;
};

TrialAggregate aggregate_trials(const std::vector<CapabilityEstimate>& estimates,
                                const Interval& ground_truth);
TrialAggregate aggregate_intervals(const std::vector<Interval>& intervals,
                                   const Interval& ground_truth);

}  // namespace stem
