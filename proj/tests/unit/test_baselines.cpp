#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "stem/baselines.hpp"
#include "stem/error.hpp"
#include "support/reference_tables.hpp"

using namespace stem;

namespace {

struct Population {
  std::vector<std::string> ids;
  std::map<std::string, Outcome> outcomes;
};

Population planted(std::size_t size, std::size_t correct) {
  Population p;
  for (std::size_t i = 0; i < size; ++i) {
    const std::string id = "p" + std::to_string(100000 + i);
    p.ids.push_back(id);
    p.outcomes[id] = i < correct ? Outcome::Correct : (i % 2 ? Outcome::Wrong : Outcome::Error);
  }
  return p;
}

ReferenceLadder ladder(const std::map<std::string, double>& scores,
                       const std::set<std::string>& only = {}) {
  std::vector<RankedModel> rungs;
  for (const auto& [m, s] : scores)
    if (only.empty() || only.contains(m)) rungs.push_back({m, s});
  return ReferenceLadder(rungs);
}

double stddev_of_scores(const Population& p, std::size_t n) {
  double s = 0, s2 = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const double x = random_subset_trial(p.ids, n, seed, p.outcomes).score;
    s += x;
    s2 += x * x;
  }
  const double mean = s / 1000;
  return std::sqrt(s2 / 1000 - mean * mean);
}

const std::set<std::string> kQwen = {"Qwen3-0.6B", "Qwen3-1.7B", "Qwen3-4B",      "Qwen3-8B",
                                     "Qwen3-14B",  "Qwen3-30B-A3B", "Qwen3-32B", "Qwen3-235B-A22B"};

}  // namespace

TEST_SUITE("baselines") {
  TEST_CASE("random trials") {
    const auto p = planted(10, 5);
    const auto full = random_subset_trial(p.ids, 10, 1, p.outcomes);
    CHECK(full.score == 50.0);
    CHECK(std::set<std::string>(full.sampled_ids.begin(), full.sampled_ids.end()).size() == 10);

    const auto big = planted(500, 300);
    const auto a = random_subset_trial(big.ids, 50, 77, big.outcomes);
    const auto b = random_subset_trial(big.ids, 50, 77, big.outcomes);
    CHECK(a.sampled_ids == b.sampled_ids);
    CHECK(a.score == b.score);
    auto reversed = big.ids;
    std::ranges::reverse(reversed);
    CHECK(random_subset_trial(reversed, 50, 77, big.outcomes).sampled_ids == a.sampled_ids);

    CHECK_THROWS_AS(random_subset_trial(p.ids, 11, 1, p.outcomes), ArgumentError);
    CHECK_THROWS_AS(random_subset_trial(p.ids, 0, 1, p.outcomes), ArgumentError);
  }

  TEST_CASE("planted 80% accuracy stays inside the binomial band") {
    const auto p = planted(10000, 8000);
    int outside = 0;
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
      const double s = random_subset_trial(p.ids, 100, seed, p.outcomes).score;
      outside += s < 66 || s > 91;
    }
    CHECK(outside <= 10);
  }

  TEST_CASE("trial spread shrinks with sample size") {
    const auto p = planted(10000, 6000);
    CHECK(stddev_of_scores(p, 400) < stddev_of_scores(p, 100));
  }

  TEST_CASE("placement against the four-benchmark reference ranking") {
    const auto ref = ladder(stem::testing::kExpectedReference, kQwen);
    CHECK(placement_from_score(41.82, ref) == Interval{kBelowFamily, "Qwen3-0.6B"});
    CHECK(placement_from_score(54.98, ref) == Interval{"Qwen3-1.7B", "Qwen3-4B"});
    CHECK(placement_from_score(10.0, ref) == Interval{kBelowFamily, "Qwen3-0.6B"});
    CHECK(placement_from_score(99.0, ref) == Interval{"Qwen3-235B-A22B", kAboveFamily});
    CHECK(placement_from_score(43.86, ref) == Interval{"Qwen3-0.6B", "Qwen3-1.7B"});
    CHECK(placement_from_score(77.39, ref) == Interval{"Qwen3-235B-A22B", kAboveFamily});
    // The reference order need not follow parameter count.
    CHECK(placement_from_score(70.7, ref) == Interval{"Qwen3-30B-A3B", "Qwen3-14B"});
  }

  TEST_CASE("placement against the zero-shot weighted scores") {
    const auto ref = ladder(stem::testing::kExpectedZeroShotScore, kQwen);
    CHECK(placement_from_score(41.82, ref) == Interval{"Qwen3-0.6B", "Qwen3-1.7B"});
    CHECK(placement_from_score(54.98, ref) == Interval{"Qwen3-1.7B", "Qwen3-4B"});
  }

  TEST_CASE("placement is monotone in the score") {
    const auto ref = ladder(stem::testing::kExpectedReference);
    std::map<std::string, std::size_t> rank;
    rank[kBelowFamily] = 0;
    for (std::size_t i = 0; i < ref.models().size(); ++i) rank[ref.models()[i].model_id] = i + 1;
    std::size_t prev = 0;
    for (double s = 0; s <= 100; s += 0.1) {
      const auto iv = placement_from_score(s, ref);
      const std::size_t r = rank.at(iv.lower);
      CHECK(r >= prev);
      prev = r;
    }
  }

  TEST_CASE("ladders reject ties") {
    CHECK_THROWS_AS(ReferenceLadder({{"a", 1.0}, {"b", 1.0}}), ArgumentError);
    CHECK_THROWS_AS(ReferenceLadder({}), ArgumentError);
    const auto l = ReferenceLadder({{"hi", 9.0}, {"lo", 1.0}});
    CHECK(l.models().front().model_id == "lo");
  }

  TEST_CASE("accuracy rates") {
    const Interval truth{"Qwen3-1.7B", "Qwen3-4B"};
    const Interval wrong{"Qwen3-4B", "Qwen3-8B"};
    std::vector<Interval> p(88, truth);
    p.resize(100, wrong);
    CHECK(baseline_accuracy_rate(p, truth) == doctest::Approx(0.88));
    CHECK(baseline_accuracy_rate(std::vector<Interval>(100, truth), truth) == 1.0);
    CHECK(baseline_accuracy_rate(std::vector<Interval>(100, wrong), truth) == 0.0);
    CHECK_THROWS_AS(baseline_accuracy_rate({}, truth), ArgumentError);
  }

  TEST_CASE("repeated baseline runs") {
    const auto a = planted(2000, 1100);
    const auto b = planted(2000, 1500);
    const std::vector<BenchmarkOutcomes> benches = {{"x", a.outcomes}, {"y", b.outcomes}};
    std::map<std::string, ReferenceLadder> ladders;
    ladders.emplace("x", ReferenceLadder({{"m1", 40}, {"m2", 70}}));
    ladders.emplace("y", ReferenceLadder({{"m1", 50}, {"m2", 90}}));

    BaselineConfig cfg;
    cfg.n = 100;
    cfg.trials = 20;
    cfg.seed = 5;
    const auto run = run_random_baseline(benches, cfg, ladders, nullptr);
    CHECK(run.trials.size() == 40);
    const auto again = run_random_baseline(benches, cfg, ladders, nullptr);
    for (std::size_t i = 0; i < run.trials.size(); ++i) {
      CHECK(run.trials[i].score == again.trials[i].score);
      CHECK(run.trials[i].seed == again.trials[i].seed);
      CHECK(run.trials[i].placement.lower == "m1");
    }

    cfg.mode = PlacementMode::Aggregate;
    cfg.weights = {{"x", 1.0}, {"y", 3.0}};
    const auto agg_ladder = ReferenceLadder({{"m1", 50}, {"m2", 90}});
    const auto agg = run_random_baseline(benches, cfg, {}, &agg_ladder);
    REQUIRE(agg.trials.size() == 20);
    double mean = 0;
    for (const auto& t : agg.trials) {
      CHECK(t.benchmark_id == "aggregate");
      mean += t.score / 20;
    }
    CHECK(mean == doctest::Approx(0.25 * 55 + 0.75 * 75).epsilon(0.05));
    CHECK_THROWS_AS(run_random_baseline(benches, cfg, {}, nullptr), ArgumentError);
    cfg.mode = PlacementMode::PerBenchmark;
    CHECK_THROWS_AS(run_random_baseline(benches, cfg, {}, nullptr), ArgumentError);
    CHECK(placement_mode_from_string("aggregate") == PlacementMode::Aggregate);
    CHECK_THROWS_AS(placement_mode_from_string("mean"), ArgumentError);
  }
}
