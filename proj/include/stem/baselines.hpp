#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stem/stats.hpp"
#include "stem/types.hpp"

namespace stem {

struct RandomTrial {
  std::uint64_t seed = 0;
  std::vector<std::string> sampled_ids;  // draw order
  double score = 0.0;                    // percent, -1 counted incorrect
};

/// Draws n ids uniformly without replacement from the sorted population
/// (same generator contract as sample_balanced_subset) and scores them.
RandomTrial random_subset_trial(const std::vector<std::string>& all_sample_ids, std::size_t n,
                                std::uint64_t seed, const std::map<std::string, Outcome>& outcomes);

/// Reference models sorted ascending by score; scores must be strictly
/// increasing.
class ReferenceLadder {
 public:
  explicit ReferenceLadder(std::vector<RankedModel> models);
  static ReferenceLadder from_ranking(const ReferenceRanking& ranking);

  const std::vector<RankedModel>& models() const noexcept { return models_; }

 private:
  std::vector<RankedModel> models_;
};

/// Lower-inclusive bracketing: ref(low) <= score < ref(high).
Interval placement_from_score(double score, const ReferenceLadder& reference);

double baseline_accuracy_rate(const std::vector<Interval>& placements, const Interval& ground_truth);

enum class PlacementMode { PerBenchmark, Aggregate };

const char* to_string(PlacementMode mode) noexcept;
PlacementMode placement_mode_from_string(const std::string& text);

/// Unknown-model outcomes for one benchmark.
struct BenchmarkOutcomes {
  std::string benchmark_id;
  std::map<std::string, Outcome> outcomes;
};

struct BaselineConfig {
  std::size_t n = 100;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  PlacementMode mode = PlacementMode::PerBenchmark;
  /// Aggregate mode: weights over benchmarks; empty means uniform mean.
  std::map<std::string, double> weights;
};

struct BaselineTrialResult {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::string benchmark_id;  // "aggregate" in aggregate mode
  double score = 0.0;
  Interval placement;
};

struct BaselineRun {
  PlacementMode mode = PlacementMode::PerBenchmark;
  std::vector<BaselineTrialResult> trials;
};

/// Repeats random-sampling evaluation. Trial t draws each benchmark with
/// seed derive_seed(seed, t) mixed with the benchmark's index. Per-benchmark
/// mode places each benchmark's score on that benchmark's ladder; aggregate
/// mode places the weighted mean score on `aggregate_ladder`.
BaselineRun run_random_baseline(const std::vector<BenchmarkOutcomes>& benchmarks,
                                const BaselineConfig& config,
                                const std::map<std::string, ReferenceLadder>& per_benchmark_ladders,
                                const ReferenceLadder* aggregate_ladder);

}  // namespace stem
