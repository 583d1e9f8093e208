#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "stem/baselines.hpp"
#include "stem/error.hpp"
#include "stem/estimator.hpp"
#include "stem/ingestion.hpp"
#include "stem/model_client.hpp"
#include "stem/sampler.hpp"
#include "stem/stats.hpp"
#include "stem/synthetic.hpp"
#include "stem/transition.hpp"

namespace stem {

using Json = nlohmann::json;

/// NaN or infinity reached a report.
class SerializationError : public Error {
 public:
  using Error::Error;
};

/// Sorted keys, two-space indent, floats to 6 significant digits, trailing
/// newline. Equal documents always produce equal bytes.
std::string canonical_json(const Json& doc);

struct RunManifest {
  std::string command;
  std::string config_digest;
  std::vector<std::string> input_paths;
  std::optional<std::uint64_t> seed;
  std::string tool_version = STEM_VERSION;
  std::string timestamp;
};

/// Digest over the argument list and the bytes of every input file.
std::string config_digest(const std::vector<std::string>& args,
                          const std::vector<std::filesystem::path>& inputs);

/// SOURCE_DATE_EPOCH when set, otherwise the Unix epoch, as ISO-8601 UTC.
std::string manifest_timestamp();

Json to_json(const RunManifest& manifest);

/// Writes `payload` plus a "manifest" key as canonical JSON. "-" writes to
/// stdout. A null payload yields a manifest-only document.
void emit_report(Json payload, const RunManifest& manifest, const std::filesystem::path& path);
void emit_report(std::ostream& out, Json payload, const RunManifest& manifest,
                 const std::filesystem::path& path);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// ---------------------------------------------------------------------------
// Document conversions

Json to_json(const ModelFamily& family);
ModelFamily family_from_json(const Json& doc);

Json to_json(const Interval& interval);
Interval interval_from_json(const Json& doc);
/// "lower,upper"
Interval parse_interval(const std::string& text);

Json to_json(const MatrixBuild& build);
OutcomeMatrix matrix_from_json(const Json& doc);

/// {family_id, benchmark_id, buckets: {"1": [...], ...}}
Json to_json(const StsPool& pool);
StsPool pool_from_json(const Json& doc);
Json to_json(const PoolSummary& summary);
Json to_json(const std::vector<PoolReject>& rejects);

/// {seed, m, items: [{sample_id, ti}], pool_ref}
Json to_json(const BalancedSubset& subset);
BalancedSubset subset_from_json(const Json& doc);
Json to_json(const SubsetValidation& validation);

Json to_json(const TIAccuracyProfile& profile);
/// {interval, profile, drop, flags}
Json estimate_report(const CapabilityEstimate& estimate, const TIAccuracyProfile& profile);
Json to_json(const TrialAggregate& aggregate);

Json to_json(const BaselineRun& run, const BaselineConfig& config);

SyntheticConfig synthetic_config_from_json(const Json& doc);
Json to_json(const SyntheticConfig& config);

EndpointConfig endpoint_config_from_json(const Json& doc);

}  // namespace stem
