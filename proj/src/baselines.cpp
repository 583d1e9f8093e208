#include "stem/baselines.hpp"

#include <algorithm>
#include <set>

#include "stem/error.hpp"
#include "stem/rng.hpp"

namespace stem {

RandomTrial random_subset_trial(const std::vector<std::string>& all_sample_ids, std::size_t n,
                                std::uint64_t seed, const std::map<std::string, Outcome>& outcomes) {
  if (n == 0) throw ArgumentError("random trial size must be positive");
  std::vector<std::string> population = all_sample_ids;
  std::ranges::sort(population);
  if (std::ranges::adjacent_find(population) != population.end())
    throw ArgumentError("random trial population contains duplicate sample ids");
  if (n > population.size())
    throw ArgumentError("random trial size " + std::to_string(n) + " exceeds population " +
                        std::to_string(population.size()));

  RandomTrial trial;
  trial.seed = seed;
  Rng rng(seed);
  std::size_t correct = 0;
  for (std::size_t idx : rng.sample_indices(population.size(), n)) {
    const auto& sid = population[idx];
    const auto it = outcomes.find(sid);
    if (it == outcomes.end()) throw DataError("no outcome for sample " + sid);
    if (it->second == Outcome::Correct) ++correct;
    trial.sampled_ids.push_back(sid);
  }
  trial.score = 100.0 * static_cast<double>(correct) / static_cast<double>(n);
  return trial;
}

ReferenceLadder::ReferenceLadder(std::vector<RankedModel> models) : models_(std::move(models)) {
  if (models_.empty()) throw ArgumentError("reference ladder is empty");
  std::ranges::stable_sort(models_, {}, &RankedModel::score);
  for (std::size_t i = 1; i < models_.size(); ++i)
    if (!(models_[i - 1].score < models_[i].score))
      throw ArgumentError("reference scores must be strictly ordered (" + models_[i - 1].model_id +
                          " and " + models_[i].model_id + " tie)");
}

ReferenceLadder ReferenceLadder::from_ranking(const ReferenceRanking& ranking) {
  return ReferenceLadder(ranking.ranking);
}

Interval placement_from_score(double score, const ReferenceLadder& reference) {
  const auto& ms = reference.models();
  if (score < ms.front().score) return {kBelowFamily, ms.front().model_id};
  for (std::size_t i = 0; i + 1 < ms.size(); ++i)
    if (ms[i].score <= score && score < ms[i + 1].score) return {ms[i].model_id, ms[i + 1].model_id};
  return {ms.back().model_id, kAboveFamily};
}

double baseline_accuracy_rate(const std::vector<Interval>& placements, const Interval& ground_truth) {
  if (placements.empty()) throw ArgumentError("no placements to score");
  const auto hits = std::ranges::count(placements, ground_truth);
  return static_cast<double>(hits) / static_cast<double>(placements.size());
}

const char* to_string(PlacementMode mode) noexcept {
  return mode == PlacementMode::PerBenchmark ? "per_benchmark" : "aggregate";
}

PlacementMode placement_mode_from_string(const std::string& text) {
  if (text == "per_benchmark") return PlacementMode::PerBenchmark;
  if (text == "aggregate") return PlacementMode::Aggregate;
  throw ArgumentError("unknown placement mode '" + text + "'");
}

BaselineRun run_random_baseline(const std::vector<BenchmarkOutcomes>& benchmarks,
                                const BaselineConfig& config,
                                const std::map<std::string, ReferenceLadder>& per_benchmark_ladders,
                                const ReferenceLadder* aggregate_ladder) {
  if (benchmarks.empty()) throw ArgumentError("baseline needs at least one benchmark");
  if (config.trials == 0) throw ArgumentError("baseline needs at least one trial");

  std::map<std::string, double> weights = config.weights;
  if (config.mode == PlacementMode::Aggregate) {
    if (!aggregate_ladder) throw ArgumentError("aggregate mode needs an aggregate reference ladder");
    if (weights.empty())
      for (const auto& b : benchmarks) weights[b.benchmark_id] = 1.0;
    double total = 0.0;
    for (const auto& b : benchmarks) {
      const auto it = weights.find(b.benchmark_id);
      if (it == weights.end()) throw ArgumentError("no weight for benchmark " + b.benchmark_id);
      if (!(it->second >= 0.0)) throw DomainError("weights must be nonnegative");
      total += it->second;
    }
    if (!(total > 0.0)) throw DomainError("weights sum to zero");
    for (auto& [_, w] : weights) w /= total;
  } else {
    for (const auto& b : benchmarks)
      if (!per_benchmark_ladders.contains(b.benchmark_id))
        throw ArgumentError("no reference ladder for benchmark " + b.benchmark_id);
  }

  std::vector<std::vector<std::string>> populations;
  populations.reserve(benchmarks.size());
  for (const auto& b : benchmarks) {
    std::vector<std::string> ids;
    ids.reserve(b.outcomes.size());
    for (const auto& [sid, _] : b.outcomes) ids.push_back(sid);
    populations.push_back(std::move(ids));
  }

  BaselineRun run;
  run.mode = config.mode;
  for (std::size_t t = 0; t < config.trials; ++t) {
    const std::uint64_t trial_seed = derive_seed(config.seed, t);
    double combined = 0.0;
    for (std::size_t b = 0; b < benchmarks.size(); ++b) {
      const std::uint64_t s = derive_seed(trial_seed, b);
      const auto trial = random_subset_trial(populations[b], config.n, s, benchmarks[b].outcomes);
      const auto& id = benchmarks[b].benchmark_id;
      if (config.mode == PlacementMode::PerBenchmark) {
        run.trials.push_back(
            {t, s, id, trial.score, placement_from_score(trial.score, per_benchmark_ladders.at(id))});
      } else {
        combined += weights.at(id) * trial.score;
      }
    }
    if (config.mode == PlacementMode::Aggregate)
      run.trials.push_back(
          {t, trial_seed, "aggregate", combined, placement_from_score(combined, *aggregate_ladder)});
  }
  return run;
}

}  // namespace stem
