#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace stem {

/// Per-sample inference outcome.
enum class Outcome : std::int8_t { Error = -1, Wrong = 0, Correct = 1 };

inline int to_int(Outcome o) noexcept { return static_cast<int>(o); }

/// Maps -1/0/1 to an Outcome; throws SchemaError for anything else.
Outcome outcome_from_int(long long value);

struct ModelSpec {
  std::string model_id;
  double param_count_billions = 0.0;
};

/// Reference models, strictly ascending by parameter count.
class ModelFamily {
 public:
  ModelFamily(std::string family_id, std::vector<ModelSpec> models);

  const std::string& family_id() const noexcept { return family_id_; }
  const std::vector<ModelSpec>& models() const noexcept { return models_; }
  std::size_t size() const noexcept { return models_.size(); }
  const std::string& model_id(std::size_t index) const { return models_.at(index).model_id; }
  std::optional<std::size_t> index_of(const std::string& model_id) const;
  std::vector<double> param_counts() const;

  /// The eight-model Qwen3 ladder, 0.6B to 235B.
  static ModelFamily qwen3();

 private:
  std::string family_id_;
  std::vector<ModelSpec> models_;
};

inline constexpr const char* kBelowFamily = "below_family";
inline constexpr const char* kAboveFamily = "above_family";

/// A capability interval between two adjacent reference models. Either end
/// may be one of the sentinels kBelowFamily / kAboveFamily.
struct Interval {
  std::string lower;
  std::string upper;

  friend auto operator<=>(const Interval&, const Interval&) = default;
  std::string to_string() const { return "(" + lower + ", " + upper + ")"; }
};

}  // namespace stem
