#include "stem/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "stem/error.hpp"
#include "stem/rng.hpp"

namespace stem {

void SyntheticConfig::validate() const {
  if (capabilities.size() < 2) throw SchemaError("synthetic config: need at least 2 capabilities");
  for (std::size_t i = 0; i < capabilities.size(); ++i) {
    if (!std::isfinite(capabilities[i])) throw SchemaError("synthetic config: non-finite capability");
    if (i > 0 && !(capabilities[i - 1] < capabilities[i]))
      throw SchemaError("synthetic config: capabilities must be strictly increasing");
  }
  if (!model_ids.empty() && model_ids.size() != capabilities.size())
    throw SchemaError("synthetic config: model_ids and capabilities differ in length");
  if (sample_count == 0) throw SchemaError("synthetic config: sample_count must be positive");
  if (difficulty_mixture.empty()) throw SchemaError("synthetic config: empty difficulty mixture");
  double total = 0.0;
  for (const auto& c : difficulty_mixture) {
    if (!(c.weight >= 0.0) || !(c.spread >= 0.0) || !std::isfinite(c.mean))
      throw SchemaError("synthetic config: mixture weights and spreads must be nonnegative");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw SchemaError("synthetic config: mixture weights must sum to 1");
  for (double r : {contamination_rate, error_rate})
    if (!(r >= 0.0 && r <= 1.0)) throw SchemaError("synthetic config: rates must lie in [0,1]");
  if (contamination_rate + error_rate > 1.0 + 1e-12)
    throw SchemaError("synthetic config: contamination_rate + error_rate exceeds 1");
  if (!(noise_temperature >= 0.0) || !std::isfinite(noise_temperature))
    throw SchemaError("synthetic config: noise_temperature must be nonnegative");
}

ModelFamily SyntheticConfig::family() const {
  std::vector<ModelSpec> specs;
  for (std::size_t i = 0; i < capabilities.size(); ++i) {
    std::string id = model_ids.empty() ? "M" + std::to_string(i + 1) : model_ids[i];
    // Capabilities play the role of log parameter counts.
    specs.push_back({std::move(id), std::exp(capabilities[i])});
  }
  return ModelFamily(family_id, std::move(specs));
}

std::vector<DifficultyComponent> polarized_mixture(const std::vector<double>& capabilities) {
  if (capabilities.size() < 2) throw SchemaError("polarized mixture needs at least 2 capabilities");
  const double lo = capabilities.front();
  const double hi = capabilities.back();
  return {{0.55, lo - 0.5, 0.5}, {0.30, 0.5 * (lo + hi), 0.5 * (hi - lo)}, {0.15, hi + 0.5, 0.5}};
}

const char* to_string(PlantedFlag flag) noexcept {
  switch (flag) {
    case PlantedFlag::Clean: return "clean";
    case PlantedFlag::Contaminated: return "contaminated";
    case PlantedFlag::Erroneous: return "erroneous";
  }
  return "unknown";
}

double correctness_probability(double capability, double difficulty, double temperature) {
  if (temperature == 0.0) return capability >= difficulty ? 1.0 : 0.0;
  return 1.0 / (1.0 + std::exp(-(capability - difficulty) / temperature));
}

namespace {

std::string sample_name(std::size_t index, std::size_t total) {
  std::string digits = std::to_string(index);
  const std::size_t width = std::max<std::size_t>(5, std::to_string(total - 1).size());
  return "s" + std::string(width - std::min(width, digits.size()), '0') + digits;
}

double draw_difficulty(Rng& rng, const std::vector<DifficultyComponent>& mixture) {
  const double u = rng.uniform();
  double acc = 0.0;
  const DifficultyComponent* chosen = &mixture.back();
  for (const auto& c : mixture) {
    acc += c.weight;
    if (u < acc) {
      chosen = &c;
      break;
    }
  }
  const double v = rng.uniform();
  return chosen->mean + chosen->spread * (2.0 * v - 1.0);
}

}  // namespace

SyntheticDataset generate_family(const SyntheticConfig& config) {
  config.validate();
  const std::size_t n = config.capabilities.size();
  SyntheticDataset ds{OutcomeMatrix{config.family(), config.benchmark_id, {}}, {}, {}};

  for (std::size_t s = 0; s < config.sample_count; ++s) {
    Rng rng(derive_seed(config.seed, s));
    const std::string sid = sample_name(s, config.sample_count);
    const double difficulty = draw_difficulty(rng, config.difficulty_mixture);

    const double u = rng.uniform();
    std::vector<Outcome> irv(n);
    for (std::size_t i = 0; i < n; ++i)
      irv[i] = u < correctness_probability(config.capabilities[i], difficulty,
                                           config.noise_temperature)
                   ? Outcome::Correct
                   : Outcome::Wrong;

    const double f = rng.uniform();
    PlantedFlag flag = PlantedFlag::Clean;
    if (f < config.error_rate) {
      flag = PlantedFlag::Erroneous;
      const std::size_t count = std::min<std::size_t>(n, 1 + rng.below(2));
      for (std::size_t idx : rng.sample_indices(n, count)) irv[idx] = Outcome::Error;
    } else if (f < config.error_rate + config.contamination_rate) {
      flag = PlantedFlag::Contaminated;
      const std::size_t i = rng.below(n - 1);
      const std::size_t j = i + 1 + rng.below(n - 1 - i);
      irv[i] = Outcome::Correct;
      irv[j] = Outcome::Wrong;
    }

    ds.matrix.entries.emplace(sid, std::move(irv));
    ds.latent_difficulty.emplace(sid, difficulty);
    ds.planted_flags.emplace(sid, flag);
  }
  return ds;
}

std::map<std::string, Outcome> generate_unknown(const SyntheticConfig& config,
                                                const SyntheticDataset& dataset, double capability,
                                                const std::vector<std::string>& sample_ids,
                                                std::uint64_t seed) {
  if (!std::isfinite(capability)) throw ArgumentError("unknown capability must be finite");
  std::map<std::string, Outcome> out;
  for (const auto& sid : sample_ids) {
    const auto it = dataset.latent_difficulty.find(sid);
    if (it == dataset.latent_difficulty.end()) throw DataError("unknown sample " + sid);
    const double p = correctness_probability(capability, it->second, config.noise_temperature);
    Rng rng(derive_seed(seed, fnv1a64(sid)));
    out[sid] = rng.uniform() < p ? Outcome::Correct : Outcome::Wrong;
  }
  return out;
}

std::map<std::string, Outcome> generate_unknown(const SyntheticConfig& config,
                                                const SyntheticDataset& dataset, double capability,
                                                const BalancedSubset& subset, std::uint64_t seed) {
  std::vector<std::string> ids;
  ids.reserve(subset.items.size());
  for (const auto& item : subset.items) ids.push_back(item.sample_id);
  return generate_unknown(config, dataset, capability, ids, seed);
}

Interval oracle_interval(double capability, const std::vector<double>& capabilities,
                         const std::vector<std::string>& model_ids) {
  if (capabilities.empty() || capabilities.size() != model_ids.size())
    throw ArgumentError("oracle_interval: capabilities and model ids must align");
  for (std::size_t i = 1; i < capabilities.size(); ++i)
    if (!(capabilities[i - 1] < capabilities[i]))
      throw ArgumentError("oracle_interval: capabilities must be strictly increasing");
  if (capability < capabilities.front()) return {kBelowFamily, model_ids.front()};
  for (std::size_t i = 0; i + 1 < capabilities.size(); ++i)
    if (capabilities[i] <= capability && capability < capabilities[i + 1])
      return {model_ids[i], model_ids[i + 1]};
  return {model_ids.back(), kAboveFamily};
}

}  // namespace stem
