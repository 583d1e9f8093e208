#include <cmath>

#include "doctest.h"
#include "stem/error.hpp"
#include "stem/report.hpp"
#include "support/test_support.hpp"

using namespace stem;
using stem::testing::EnvGuard;
using stem::testing::read_file;
using stem::testing::TempDir;

namespace {

RunManifest sample_manifest() {
  RunManifest m;
  m.command = "stem test";
  m.config_digest = "fnv1a64:0000000000000000";
  m.input_paths = {"a.json"};
  m.seed = 7;
  m.timestamp = "1970-01-01T00:00:00Z";
  return m;
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("canonical formatting") {
    Json doc = {{"b", 1.0 / 3.0}, {"a", {1, 2}}, {"c", Json::object()}, {"d", "x\"y"}, {"e", -0.0}};
    CHECK(canonical_json(doc) ==
          "{\n  \"a\": [\n    1,\n    2\n  ],\n  \"b\": 0.333333,\n  \"c\": {},\n  \"d\": \"x\\\"y\",\n"
          "  \"e\": 0\n}\n");
    CHECK(canonical_json(Json(123456789.0)) == "1.23457e+08\n");
    CHECK(canonical_json(Json(std::uint64_t{18446744073709551615ULL})) == "18446744073709551615\n");
    CHECK(canonical_json(doc) == canonical_json(Json::parse(doc.dump())));
    CHECK_THROWS_AS(canonical_json(Json{{"x", NAN}}), SerializationError);
    CHECK_THROWS_AS(canonical_json(Json{{"x", {INFINITY}}}), SerializationError);
  }

  TEST_CASE("emitted reports embed the manifest and are reproducible") {
    TempDir dir;
    const Json payload = {{"value", 2.5}};
    emit_report(payload, sample_manifest(), dir / "one.json");
    emit_report(payload, sample_manifest(), dir / "two.json");
    CHECK(read_file(dir / "one.json") == read_file(dir / "two.json"));
    const auto back = read_json_file(dir / "one.json");
    CHECK(back["value"] == 2.5);
    CHECK(back["manifest"]["seed"] == 7);
    CHECK(back["manifest"]["command"] == "stem test");
    CHECK(back["manifest"]["tool_version"] == STEM_VERSION);

    emit_report(Json(), sample_manifest(), dir / "empty.json");
    const auto empty = read_json_file(dir / "empty.json");
    CHECK(empty.size() == 1);
    CHECK(empty.contains("manifest"));

    CHECK_THROWS_AS(emit_report(Json{{"x", NAN}}, sample_manifest(), dir / "nan.json"), SerializationError);
    CHECK_THROWS_AS(emit_report(payload, sample_manifest(), dir / "missing" / "dir" / "x.json"), IoError);
    CHECK_THROWS_AS(read_json_file(dir / "absent.json"), IoError);
    stem::testing::write_file(dir / "bad.json", "{nope");
    CHECK_THROWS_AS(read_json_file(dir / "bad.json"), ParseError);
  }

  TEST_CASE("digest and timestamp") {
    TempDir dir;
    stem::testing::write_file(dir / "in.txt", "alpha");
    const auto d1 = config_digest({"stats", "--x"}, {dir / "in.txt"});
    CHECK(d1.rfind("fnv1a64:", 0) == 0);
    CHECK(d1.size() == 8 + 16);
    CHECK(config_digest({"stats", "--x"}, {dir / "in.txt"}) == d1);
    CHECK(config_digest({"stats", "--y"}, {dir / "in.txt"}) != d1);
    stem::testing::write_file(dir / "in.txt", "beta");
    CHECK(config_digest({"stats", "--x"}, {dir / "in.txt"}) != d1);

    {
      EnvGuard g("SOURCE_DATE_EPOCH", nullptr);
      CHECK(manifest_timestamp() == "1970-01-01T00:00:00Z");
    }
    {
      EnvGuard g("SOURCE_DATE_EPOCH", "1700000000");
      CHECK(manifest_timestamp() == "2023-11-14T22:13:20Z");
    }
  }

  TEST_CASE("document round trips") {
    const auto fam = ModelFamily::qwen3();
    const auto fam2 = family_from_json(to_json(fam));
    CHECK(fam2.family_id() == "qwen3");
    CHECK(fam2.size() == 8);
    CHECK(fam2.model_id(2) == "Qwen3-4B");
    CHECK_THROWS_AS(family_from_json(Json{{"family_id", "x"}}), SchemaError);

    CHECK(interval_from_json(to_json(Interval{"a", "b"})) == Interval{"a", "b"});
    CHECK(parse_interval("Qwen3-0.6B,Qwen3-1.7B") == Interval{"Qwen3-0.6B", "Qwen3-1.7B"});
    CHECK_THROWS_AS(parse_interval("a"), ArgumentError);
    CHECK_THROWS_AS(parse_interval("a,b,c"), ArgumentError);

    StsPool pool{"qwen3", "bench", 2, {{1, {"a", "b"}}, {2, {}}, {3, {"c"}}}};
    const auto p2 = pool_from_json(to_json(pool));
    CHECK(p2.buckets == pool.buckets);
    CHECK(p2.model_count == 2);
    CHECK(p2.benchmark_id == "bench");
    Json bad = to_json(pool);
    bad["buckets"].erase("2");
    CHECK_THROWS_AS(pool_from_json(bad), SchemaError);
    bad = to_json(pool);
    bad["buckets"]["2"] = {"a"};
    CHECK_THROWS_AS(pool_from_json(bad), SchemaError);

    BalancedSubset s;
    s.per_class_count = 2;
    s.seed = 99;
    s.family_id = "qwen3";
    s.benchmark_id = "bench";
    s.items = {{"a", 1}, {"b", 1}, {"c", 3}};
    const auto s2 = subset_from_json(to_json(s));
    CHECK(s2.items == s.items);
    CHECK(s2.seed == 99);
    CHECK(s2.per_class_count == 2);
    CHECK(s2.family_id == "qwen3");

    const auto matrix_doc = to_json(MatrixBuild{OutcomeMatrix{fam, "bench", {{"q", std::vector<Outcome>(8, Outcome::Correct)}}}, {}, 0});
    const auto m2 = matrix_from_json(matrix_doc);
    CHECK(m2.entries.at("q").size() == 8);
    CHECK(m2.benchmark_id == "bench");
  }

  TEST_CASE("synthetic and endpoint configs") {
    const Json doc = {{"capabilities", {0, 1, 2}}, {"sample_count", 10}, {"noise_temperature", 0.5}};
    const auto c = synthetic_config_from_json(doc);
    CHECK(c.capabilities.size() == 3);
    CHECK(c.difficulty_mixture.size() == 3);
    CHECK(c.noise_temperature == 0.5);
    const auto c2 = synthetic_config_from_json(to_json(c));
    CHECK(c2.capabilities == c.capabilities);
    CHECK(c2.difficulty_mixture.size() == c.difficulty_mixture.size());
    CHECK_THROWS_AS(synthetic_config_from_json(Json{{"capabilities", {0, 1}}, {"bogus", 1}}), SchemaError);
    CHECK_THROWS_AS(synthetic_config_from_json(Json{{"capabilities", {1, 0}}}), SchemaError);

    const auto e = endpoint_config_from_json(
        Json{{"base_url", "http://h/v1"}, {"model_name", "m"}, {"max_concurrency", 2}});
    CHECK(e.api_key_env == "OPENAI_API_KEY");
    CHECK(e.max_concurrency == 2);
    CHECK(e.temperature == 0.0);
    CHECK_THROWS(endpoint_config_from_json(Json{{"base_url", "http://h"}, {"model_name", "m"}, {"temperature", -1}}));
  }
}
