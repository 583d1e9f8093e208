#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stem/ingestion.hpp"
#include "stem/sampler.hpp"

namespace stem {

/// One mixture component: difficulty ~ Uniform[mean - spread, mean + spread].
/// spread == 0 places every draw exactly at `mean`.
struct DifficultyComponent {
  double weight = 0.0;
  double mean = 0.0;
  double spread = 0.0;
};

struct SyntheticConfig {
  std::vector<double> capabilities;  // strictly increasing, one per reference model
  std::vector<std::string> model_ids;  // optional; defaults to M1..Mn
  std::string family_id = "synthetic";
  std::string benchmark_id = "synthetic";
  std::size_t sample_count = 1000;
  std::vector<DifficultyComponent> difficulty_mixture;
  double contamination_rate = 0.0;
  double error_rate = 0.0;
  double noise_temperature = 0.0;
  std::uint64_t seed = 0;

  /// Throws SchemaError when an invariant does not hold.
  void validate() const;
  ModelFamily family() const;
};

/// 55% of the mass at or below capability_1, 30% spread over
/// (capability_1, capability_n], 15% above capability_n.
std::vector<DifficultyComponent> polarized_mixture(const std::vector<double>& capabilities);

enum class PlantedFlag { Clean, Contaminated, Erroneous };

const char* to_string(PlantedFlag flag) noexcept;

struct SyntheticDataset {
  OutcomeMatrix matrix;
  std::map<std::string, double> latent_difficulty;
  std::map<std::string, PlantedFlag> planted_flags;
};

/// Probability that a model of `capability` answers an item of `difficulty`.
/// Zero temperature is the hard threshold capability >= difficulty.
double correctness_probability(double capability, double difficulty, double temperature);

/// Clean vectors are drawn by sampling one uniform u per sample and setting
/// v_i = 1 iff u < p_i; p_i rises with capability, so every clean vector is
/// monotone with the per-model marginals p_i. Contaminated samples get one
/// planted (1 then 0) inversion; erroneous samples get one or two -1 entries.
/// Sample s is generated from derive_seed(seed, s) alone.
SyntheticDataset generate_family(const SyntheticConfig& config);

/// Outcomes of an unknown model at `capability` under the same law. Each
/// sample's draw is seeded from (seed, sample_id) so the result does not
/// depend on the order or membership of `sample_ids`.
std::map<std::string, Outcome> generate_unknown(const SyntheticConfig& config,
                                                const SyntheticDataset& dataset, double capability,
                                                const std::vector<std::string>& sample_ids,
                                                std::uint64_t seed);
std::map<std::string, Outcome> generate_unknown(const SyntheticConfig& config,
                                                const SyntheticDataset& dataset, double capability,
                                                const BalancedSubset& subset, std::uint64_t seed);

/// Adjacent models bracketing `capability`, lower-inclusive.
Interval oracle_interval(double capability, const std::vector<double>& capabilities,
                         const std::vector<std::string>& model_ids);

}  // namespace stem
