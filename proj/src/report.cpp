#include "stem/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "stem/rng.hpp"

namespace stem {

namespace {

void dump(const Json& j, std::string& out, int depth) {
  const auto pad = [&](int d) { out.append(static_cast<std::size_t>(d) * 2, ' '); };
  switch (j.type()) {
    case Json::value_t::null: out += "null"; break;
    case Json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; break;
    case Json::value_t::number_integer: out += std::to_string(j.get<std::int64_t>()); break;
    case Json::value_t::number_unsigned: out += std::to_string(j.get<std::uint64_t>()); break;
    case Json::value_t::number_float: {
      double v = j.get<double>();
      if (!std::isfinite(v)) throw SerializationError("non-finite number in report");
      if (v == 0.0) v = 0.0;  // no "-0"
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6g", v);
      out += buf;
      break;
    }
    case Json::value_t::string:
      out += Json(j.get_ref<const std::string&>()).dump(-1, ' ', false, Json::error_handler_t::replace);
      break;
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        break;
      }
      out += "[\n";
      bool first = true;
      for (const auto& item : j) {
        if (!first) out += ",\n";
        first = false;
        pad(depth + 1);
        dump(item, out, depth + 1);
      }
      out += '\n';
      pad(depth);
      out += ']';
      break;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        break;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        pad(depth + 1);
        out += Json(it.key()).dump(-1, ' ', false, Json::error_handler_t::replace);
        out += ": ";
        dump(it.value(), out, depth + 1);
      }
      out += '\n';
      pad(depth);
      out += '}';
      break;
    }
    case Json::value_t::binary:
    case Json::value_t::discarded:
      throw SerializationError("unsupported value in report");
  }
}

template <typename T>
T field(const Json& doc, const char* key, const std::string& ctx) {
  if (!doc.is_object()) throw SchemaError(ctx + ": expected a JSON object");
  const auto it = doc.find(key);
  if (it == doc.end()) throw SchemaError(ctx + ": missing key '" + key + "'");
  try {
    return it->get<T>();
  } catch (const Json::exception&) {
    throw SchemaError(ctx + ": key '" + key + "' has the wrong type");
  }
}

template <typename T>
T field_or(const Json& doc, const char* key, T fallback, const std::string& ctx) {
  if (!doc.contains(key)) return fallback;
  return field<T>(doc, key, ctx);
}

void reject_unknown_keys(const Json& doc, std::initializer_list<const char*> allowed,
                         const std::string& ctx) {
  for (const auto& [key, _] : doc.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw SchemaError(ctx + ": unknown key '" + key + "'");
  }
}

}  // namespace

std::string canonical_json(const Json& doc) {
  std::string out;
  dump(doc, out, 0);
  out += '\n';
  return out;
}

std::string config_digest(const std::vector<std::string>& args,
                          const std::vector<std::filesystem::path>& inputs) {
  std::string material;
  for (const auto& a : args) {
    material += a;
    material += '\0';
  }
  for (const auto& p : inputs) {
    std::ifstream in(p, std::ios::binary);
    if (!in) continue;
    std::ostringstream ss;
    ss << in.rdbuf();
    material += '\x1e';
    material += ss.str();
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(material)));
  return buf;
}

std::string manifest_timestamp() {
  std::time_t t = 0;
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env && *env) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end && *end == '\0' && v >= 0) t = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json to_json(const RunManifest& m) {
  Json doc = {{"command", m.command},
              {"config_digest", m.config_digest},
              {"input_paths", m.input_paths},
              {"tool_version", m.tool_version},
              {"timestamp", m.timestamp}};
  doc["seed"] = m.seed ? Json(*m.seed) : Json(nullptr);
  return doc;
}

void emit_report(Json payload, const RunManifest& manifest, const std::filesystem::path& path) {
  emit_report(std::cout, std::move(payload), manifest, path);
}

void emit_report(std::ostream& out, Json payload, const RunManifest& manifest,
                 const std::filesystem::path& path) {
  if (payload.is_null()) payload = Json::object();
  if (!payload.is_object()) throw SerializationError("report payload must be a JSON object");
  payload["manifest"] = to_json(manifest);
  const std::string text = canonical_json(payload);
  if (path == "-") {
    out << text;
    return;
  }
  write_text_file(path, text);
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  Json doc = Json::parse(ss.str(), nullptr, false);
  if (doc.is_discarded()) throw ParseError(path.string() + ": not valid JSON");
  return doc;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------

Json to_json(const ModelFamily& family) {
  Json models = Json::array();
  for (const auto& m : family.models())
    models.push_back({{"model_id", m.model_id}, {"param_count_billions", m.param_count_billions}});
  return {{"family_id", family.family_id()}, {"models", models}};
}

ModelFamily family_from_json(const Json& doc) {
  const std::string ctx = "model family";
  std::vector<ModelSpec> specs;
  const auto models = field<Json>(doc, "models", ctx);
  if (!models.is_array()) throw SchemaError(ctx + ": 'models' must be an array");
  for (const auto& m : models)
    specs.push_back({field<std::string>(m, "model_id", ctx),
                     field<double>(m, "param_count_billions", ctx)});
  return ModelFamily(field<std::string>(doc, "family_id", ctx), std::move(specs));
}

Json to_json(const Interval& interval) { return Json::array({interval.lower, interval.upper}); }

Interval interval_from_json(const Json& doc) {
  if (!doc.is_array() || doc.size() != 2 || !doc[0].is_string() || !doc[1].is_string())
    throw SchemaError("interval must be a [lower, upper] pair of strings");
  return {doc[0].get<std::string>(), doc[1].get<std::string>()};
}

Interval parse_interval(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos)
    throw ArgumentError("interval must be written lower,upper");
  Interval iv{text.substr(0, comma), text.substr(comma + 1)};
  if (iv.lower.empty() || iv.upper.empty()) throw ArgumentError("interval endpoints must be non-empty");
  return iv;
}

Json to_json(const MatrixBuild& build) {
  Json entries = Json::object();
  for (const auto& [sid, vec] : build.matrix.entries) {
    Json row = Json::array();
    for (Outcome o : vec) row.push_back(to_int(o));
    entries[sid] = row;
  }
  Json rejected = Json::array();
  for (const auto& r : build.rejected)
    rejected.push_back({{"sample_id", r.sample_id}, {"missing_models", r.missing_models}});
  return {{"benchmark_id", build.matrix.benchmark_id},
          {"family", to_json(build.matrix.family)},
          {"entries", entries},
          {"rejected", rejected},
          {"foreign_records", build.foreign_records}};
}

OutcomeMatrix matrix_from_json(const Json& doc) {
  const std::string ctx = "outcome matrix";
  OutcomeMatrix matrix{family_from_json(field<Json>(doc, "family", ctx)),
                       field<std::string>(doc, "benchmark_id", ctx), {}};
  const auto entries = field<Json>(doc, "entries", ctx);
  if (!entries.is_object()) throw SchemaError(ctx + ": 'entries' must be an object");
  for (const auto& [sid, row] : entries.items()) {
    if (!row.is_array() || row.size() != matrix.family.size())
      throw SchemaError(ctx + ": sample " + sid + " must have " +
                        std::to_string(matrix.family.size()) + " outcomes");
    std::vector<Outcome> vec;
    for (const auto& v : row) {
      if (!v.is_number_integer()) throw SchemaError(ctx + ": outcomes must be integers");
      vec.push_back(outcome_from_int(v.get<long long>()));
    }
    matrix.entries.emplace(sid, std::move(vec));
  }
  return matrix;
}

Json to_json(const StsPool& pool) {
  Json buckets = Json::object();
  for (const auto& [k, ids] : pool.buckets) buckets[std::to_string(k)] = ids;
  return {{"family_id", pool.family_id}, {"benchmark_id", pool.benchmark_id}, {"buckets", buckets}};
}

StsPool pool_from_json(const Json& doc) {
  const std::string ctx = "STS pool";
  StsPool pool;
  pool.family_id = field<std::string>(doc, "family_id", ctx);
  pool.benchmark_id = field<std::string>(doc, "benchmark_id", ctx);
  const auto buckets = field<Json>(doc, "buckets", ctx);
  if (!buckets.is_object() || buckets.size() < 3)
    throw SchemaError(ctx + ": 'buckets' must hold classes 1..n+1 for n >= 2");
  for (const auto& [key, ids] : buckets.items()) {
    int k = 0;
    try {
      std::size_t used = 0;
      k = std::stoi(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw SchemaError(ctx + ": bucket key '" + key + "' is not an integer");
    }
    try {
      pool.buckets[k] = ids.get<std::vector<std::string>>();
    } catch (const Json::exception&) {
      throw SchemaError(ctx + ": bucket " + key + " must be a list of sample ids");
    }
  }
  const int max_k = static_cast<int>(pool.buckets.size());
  if (pool.buckets.begin()->first != 1 || pool.buckets.rbegin()->first != max_k)
    throw SchemaError(ctx + ": bucket keys must be exactly 1..n+1");
  pool.model_count = static_cast<std::size_t>(max_k - 1);
  std::set<std::string> seen;
  for (auto& [k, ids] : pool.buckets) {
    std::ranges::sort(ids);
    for (const auto& id : ids)
      if (!seen.insert(id).second)
        throw SchemaError(ctx + ": sample '" + id + "' appears in more than one bucket");
  }
  return pool;
}

Json to_json(const PoolSummary& s) {
  Json counts = Json::object();
  Json fractions = Json::object();
  for (const auto& [k, c] : s.per_ti_count) {
    counts[std::to_string(k)] = c;
    fractions[std::to_string(k)] = s.per_ti_fraction(k);
  }
  return {{"total", s.total},
          {"per_ti_count", counts},
          {"per_ti_fraction", fractions},
          {"abnormal_count", s.abnormal_count},
          {"abnormal_fraction", s.abnormal_fraction()},
          {"error_count", s.error_count},
          {"error_fraction", s.error_fraction()},
          {"rejected_fraction", s.rejected_fraction()}};
}

Json to_json(const std::vector<PoolReject>& rejects) {
  Json out = Json::array();
  for (const auto& r : rejects) out.push_back({{"sample_id", r.sample_id}, {"kind", to_string(r.cls.kind)}});
  return out;
}

Json to_json(const BalancedSubset& subset) {
  Json items = Json::array();
  for (const auto& item : subset.items) items.push_back({{"sample_id", item.sample_id}, {"ti", item.ti}});
  return {{"seed", subset.seed},
          {"m", subset.per_class_count},
          {"items", items},
          {"pool_ref", {{"family_id", subset.family_id}, {"benchmark_id", subset.benchmark_id}}},
          {"warnings", subset.warnings}};
}

BalancedSubset subset_from_json(const Json& doc) {
  const std::string ctx = "balanced subset";
  BalancedSubset subset;
  subset.seed = field<std::uint64_t>(doc, "seed", ctx);
  subset.per_class_count = field<std::size_t>(doc, "m", ctx);
  if (doc.contains("pool_ref")) {
    const auto ref = doc["pool_ref"];
    subset.family_id = field<std::string>(ref, "family_id", ctx);
    subset.benchmark_id = field<std::string>(ref, "benchmark_id", ctx);
  }
  const auto items = field<Json>(doc, "items", ctx);
  if (!items.is_array()) throw SchemaError(ctx + ": 'items' must be an array");
  for (const auto& item : items)
    subset.items.push_back({field<std::string>(item, "sample_id", ctx), field<int>(item, "ti", ctx)});
  subset.warnings = field_or<std::vector<std::string>>(doc, "warnings", {}, ctx);
  return subset;
}

Json to_json(const SubsetValidation& v) {
  Json violations = Json::array();
  for (const auto& x : v.violations)
    violations.push_back({{"kind", to_string(x.kind)}, {"sample_id", x.sample_id}, {"ti", x.ti},
                          {"message", x.message}});
  Json counts = Json::object();
  for (const auto& [k, c] : v.class_counts) counts[std::to_string(k)] = c;
  return {{"ok", v.ok()}, {"violations", violations}, {"class_counts", counts}};
}

Json to_json(const TIAccuracyProfile& profile) {
  Json acc = Json::object();
  Json counts = Json::object();
  for (const auto& [k, a] : profile.accuracy) acc[std::to_string(k)] = a;
  for (const auto& [k, t] : profile.counts)
    counts[std::to_string(k)] = {{"correct", t.correct}, {"wrong", t.wrong}, {"error", t.error}};
  return {{"accuracy", acc}, {"counts", counts}, {"subset_seed", profile.subset_seed}};
}

Json estimate_report(const CapabilityEstimate& estimate, const TIAccuracyProfile& profile) {
  Json drop = nullptr;
  if (estimate.drop)
    drop = {{"from", estimate.drop->from}, {"to", estimate.drop->to}, {"magnitude", estimate.drop->magnitude}};
  return {{"interval", to_json(estimate.interval)},
          {"profile", to_json(profile)},
          {"drop", drop},
          {"flags", estimate.confidence_flags}};
}

Json to_json(const TrialAggregate& agg) {
  Json hist = Json::array();
  for (const auto& [iv, c] : agg.interval_histogram) hist.push_back({{"interval", to_json(iv)}, {"count", c}});
  return {{"trials", agg.trials}, {"matches", agg.matches}, {"accuracy_rate", agg.accuracy_rate},
          {"interval_histogram", hist}};
}

Json to_json(const BaselineRun& run, const BaselineConfig& config) {
  Json trials = Json::array();
  for (const auto& t : run.trials)
    trials.push_back({{"trial", t.trial}, {"seed", t.seed}, {"benchmark_id", t.benchmark_id},
                      {"score", t.score}, {"placement", to_json(t.placement)}});
  return {{"mode", to_string(run.mode)}, {"n", config.n}, {"seed", config.seed},
          {"trial_count", config.trials}, {"trials", trials}};
}

SyntheticConfig synthetic_config_from_json(const Json& doc) {
  const std::string ctx = "synthetic config";
  reject_unknown_keys(doc,
                      {"capabilities", "model_ids", "family_id", "benchmark_id", "sample_count",
                       "difficulty_mixture", "contamination_rate", "error_rate",
                       "noise_temperature", "seed"},
                      ctx);
  SyntheticConfig cfg;
  cfg.capabilities = field<std::vector<double>>(doc, "capabilities", ctx);
  cfg.model_ids = field_or<std::vector<std::string>>(doc, "model_ids", {}, ctx);
  cfg.family_id = field_or<std::string>(doc, "family_id", cfg.family_id, ctx);
  cfg.benchmark_id = field_or<std::string>(doc, "benchmark_id", cfg.benchmark_id, ctx);
  cfg.sample_count = field_or<std::size_t>(doc, "sample_count", cfg.sample_count, ctx);
  cfg.contamination_rate = field_or<double>(doc, "contamination_rate", 0.0, ctx);
  cfg.error_rate = field_or<double>(doc, "error_rate", 0.0, ctx);
  cfg.noise_temperature = field_or<double>(doc, "noise_temperature", 0.0, ctx);
  cfg.seed = field_or<std::uint64_t>(doc, "seed", 0, ctx);

  const Json mixture = doc.contains("difficulty_mixture") ? doc["difficulty_mixture"] : Json("polarized");
  if (mixture.is_string()) {
    if (mixture.get<std::string>() != "polarized")
      throw SchemaError(ctx + ": difficulty_mixture must be \"polarized\" or a list of components");
    cfg.difficulty_mixture = polarized_mixture(cfg.capabilities);
  } else if (mixture.is_array()) {
    for (const auto& c : mixture)
      cfg.difficulty_mixture.push_back({field<double>(c, "weight", ctx), field<double>(c, "mean", ctx),
                                        field<double>(c, "spread", ctx)});
  } else {
    throw SchemaError(ctx + ": difficulty_mixture has the wrong type");
  }
  cfg.validate();
  return cfg;
}

Json to_json(const SyntheticConfig& cfg) {
  Json mixture = Json::array();
  for (const auto& c : cfg.difficulty_mixture)
    mixture.push_back({{"weight", c.weight}, {"mean", c.mean}, {"spread", c.spread}});
  std::vector<std::string> ids;
  const auto family = cfg.family();
  for (const auto& m : family.models()) ids.push_back(m.model_id);
  return {{"capabilities", cfg.capabilities},
          {"model_ids", ids},
          {"family_id", cfg.family_id},
          {"benchmark_id", cfg.benchmark_id},
          {"sample_count", cfg.sample_count},
          {"difficulty_mixture", mixture},
          {"contamination_rate", cfg.contamination_rate},
          {"error_rate", cfg.error_rate},
          {"noise_temperature", cfg.noise_temperature},
          {"seed", cfg.seed}};
}

EndpointConfig endpoint_config_from_json(const Json& doc) {
  const std::string ctx = "endpoint config";
  reject_unknown_keys(doc,
                      {"base_url", "api_key_env", "model_name", "temperature", "timeout_s",
                       "max_retries", "max_concurrency", "backoff_base_s"},
                      ctx);
  EndpointConfig cfg;
  cfg.base_url = field<std::string>(doc, "base_url", ctx);
  cfg.model_name = field<std::string>(doc, "model_name", ctx);
  cfg.api_key_env = field_or<std::string>(doc, "api_key_env", cfg.api_key_env, ctx);
  cfg.temperature = field_or<double>(doc, "temperature", cfg.temperature, ctx);
  cfg.timeout_s = field_or<double>(doc, "timeout_s", cfg.timeout_s, ctx);
  cfg.max_retries = field_or<unsigned>(doc, "max_retries", cfg.max_retries, ctx);
  cfg.max_concurrency = field_or<unsigned>(doc, "max_concurrency", cfg.max_concurrency, ctx);
  cfg.backoff_base_s = field_or<double>(doc, "backoff_base_s", cfg.backoff_base_s, ctx);
  cfg.validate();
  return cfg;
}

}  // namespace stem
