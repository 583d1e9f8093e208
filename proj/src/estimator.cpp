#include "stem/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stem/error.hpp"

namespace stem {

namespace {
// Differences such as 72.58 - 38.71 must compare equal to a 33.87 threshold.
constexpr double kDropEpsilon = 1e-9;

void require_consecutive(const TIAccuracyProfile& profile) {
  if (profile.accuracy.empty()) throw ArgumentError("accuracy profile is empty");
  int expected = 1;
  for (const auto& [k, _] : profile.accuracy) {
    if (k != expected)
      throw ArgumentError("accuracy profile must cover consecutive classes from 1; missing " +
                          std::to_string(expected));
    ++expected;
  }
}

std::string format_pp(double v) {
  std::ostringstream ss;
  ss.precision(4);
  ss << v;
  return ss.str();
}
}  // namespace

TIAccuracyProfile ti_accuracy_profile(const BalancedSubset& subset,
                                      const std::map<std::string, Outcome>& outcomes) {
  TIAccuracyProfile profile;
  profile.subset_seed = subset.seed;
  profile.benchmark_id = subset.benchmark_id;
  for (const auto& item : subset.items) {
    const auto it = outcomes.find(item.sample_id);
    if (it == outcomes.end()) throw DataError("no outcome for subset sample " + item.sample_id);
    auto& tally = profile.counts[item.ti];
    switch (it->second) {
      case Outcome::Correct: ++tally.correct; break;
      case Outcome::Wrong: ++tally.wrong; break;
      case Outcome::Error: ++tally.error; break;
    }
  }
  for (const auto& [k, tally] : profile.counts)
    profile.accuracy[k] =
        100.0 * static_cast<double>(tally.correct) / static_cast<double>(tally.total());
  return profile;
}

TIAccuracyProfile profile_from_accuracies(std::map<int, double> accuracy) {
  TIAccuracyProfile profile;
  profile.accuracy = std::move(accuracy);
  return profile;
}

std::vector<Drop> qualifying_drops(const TIAccuracyProfile& profile, double threshold_pp) {
  require_consecutive(profile);
  std::vector<Drop> drops;
  for (auto it = profile.accuracy.begin(); std::next(it) != profile.accuracy.end(); ++it) {
    const auto nx = std::next(it);
    const double magnitude = it->second - nx->second;
    if (magnitude >= threshold_pp - kDropEpsilon) drops.push_back({it->first, nx->first, magnitude});
  }
  return drops;
}

std::optional<Drop> detect_drop(const TIAccuracyProfile& profile, double threshold_pp) {
  const auto drops = qualifying_drops(profile, threshold_pp);
  if (drops.empty()) return std::nullopt;
  return drops.front();
}

CapabilityEstimate estimate_capability(const TIAccuracyProfile& profile, const ModelFamily& family,
                                       double threshold_pp, double floor_pct) {
  const int n = static_cast<int>(family.size());
  require_consecutive(profile);
  if (static_cast<int>(profile.accuracy.size()) != n + 1)
    throw ArgumentError("accuracy profile must cover classes 1.." + std::to_string(n + 1) +
                        ", got " + std::to_string(profile.accuracy.size()));

  CapabilityEstimate est;
  const auto drops = qualifying_drops(profile, threshold_pp);
  if (drops.size() > 1) {
    std::string list;
    for (const auto& d : drops)
      list += (list.empty() ? "" : ",") + std::to_string(d.from) + "-" + std::to_string(d.to);
    est.confidence_flags.push_back("multiple_drops:" + list);
  }

  const double top = profile.accuracy.at(1);
  if (top < floor_pct) {
    est.interval = {kBelowFamily, family.model_id(0)};
    est.confidence_flags.push_back("class_1_below_floor:" + format_pp(top));
    return est;
  }
  if (drops.empty()) {
    est.interval = {family.model_id(n - 1), kAboveFamily};
    return est;
  }

  const Drop& first = drops.front();
  est.drop = first;
  est.interval.lower = family.model_id(first.from - 1);
  est.interval.upper = first.to <= n ? family.model_id(first.to - 1) : kAboveFamily;
  if (first.magnitude < 1.2 * threshold_pp)
    est.confidence_flags.push_back("borderline_drop:" + format_pp(first.magnitude));
  if (drops.size() > 1) {
    const auto largest = std::ranges::max_element(drops, {}, &Drop::magnitude);
    if (largest->from != first.from)
      est.confidence_flags.push_back("largest_drop_at:" + std::to_string(largest->from) + "-" +
                                     std::to_string(largest->to));
  }
  return est;
}

TrialAggregate aggregate_intervals(const std::vector<Interval>& intervals,
                                   const Interval& ground_truth) {
  if (intervals.empty()) throw ArgumentError("cannot aggregate zero trials");
  TrialAggregate agg;
  agg.trials = intervals.size();
  for (const auto& iv : intervals) {
    ++agg.interval_histogram[iv];
    if (iv == ground_truth) ++agg.matches;
  }
  agg.accuracy_rate = static_cast<double>(agg.matches) / static_cast<double>(agg.trials);
  return agg;
}

TrialAggregate aggregate_trials(const std::vector<CapabilityEstimate>& estimates,
                                const Interval& ground_truth) {
  std::vector<Interval> intervals;
  intervals.reserve(estimates.size());
  for (const auto& e : estimates) intervals.push_back(e.interval);
  return aggregate_intervals(intervals, ground_truth);
}

}  // namespace stem
