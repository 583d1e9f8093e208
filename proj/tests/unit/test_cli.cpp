#include <sstream>

#include "doctest.h"
#include "stem/cli.hpp"
#include "support/test_support.hpp"

using namespace stem;
using stem::testing::data_path;
using stem::testing::read_file;
using stem::testing::TempDir;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::execute(args, out, err);
  return {code, out.str(), err.str()};
}

std::string p(const std::filesystem::path& path) { return path.string(); }

Json read_json(const std::filesystem::path& path) { return read_json_file(path); }

void write_synth_config(const TempDir& dir) {
  stem::testing::write_file(dir / "synth.json", R"({
  "capabilities": [0, 1, 2, 3, 4, 5, 6, 7],
  "family_id": "lab",
  "benchmark_id": "toy",
  "sample_count": 3000,
  "difficulty_mixture": "polarized"
})");
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit 1 with text on stderr") {
    auto r = run({});
    CHECK(r.code == 1);
    CHECK_FALSE(r.err.empty());
    r = run({"frobnicate"});
    CHECK(r.code == 1);
    CHECK(r.err.find("frobnicate") != std::string::npos);
    r = run({"stats", "--scores", p(data_path("table1.csv")), "--bogus"});
    CHECK(r.code == 1);
    CHECK(r.err.find("Usage") != std::string::npos);
    r = run({"subset", "--pool", "x.json"});
    CHECK(r.code == 1);
    CHECK(r.err.find("--seed") != std::string::npos);
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"--version"}).code == 0);
  }

  TEST_CASE("missing input exits 2, validation failures exit 1") {
    TempDir dir;
    auto r = run({"stats", "--scores", p(dir / "absent.csv"), "--out", p(dir / "s.json")});
    CHECK(r.code == 2);
    CHECK(r.err.find("absent.csv") != std::string::npos);
    r = run({"stats", "--scores", p(data_path("table1.csv")), "--out", p(dir / "no" / "such" / "s.json")});
    CHECK(r.code == 2);
    stem::testing::write_file(dir / "bad.csv", "benchmark,a,b\nx,1,oops\n");
    CHECK(run({"stats", "--scores", p(dir / "bad.csv")}).code == 1);
    CHECK(run({"stats", "--scores", p(data_path("table1.csv")), "--benchmarks", "hellaswag"}).code == 1);
  }

  TEST_CASE("stats over the four-benchmark subset") {
    TempDir dir;
    const auto r = run({"stats", "--scores", p(data_path("table1.csv")), "--benchmarks", "mmlu,gpqa,gsm8k,math",
                        "--out", p(dir / "stats.json")});
    REQUIRE(r.code == 0);
    const auto doc = read_json(dir / "stats.json");
    bool found = false;
    for (const auto& row : doc["reference_scores"]["ranking"])
      if (row["model_id"] == "Qwen3-0.6B") {
        found = true;
        CHECK(row["score"].get<double>() == doctest::Approx(43.86).epsilon(0.0005));
      }
    CHECK(found);
    CHECK(doc["benchmarks"]["MMLU"]["D"].get<double>() == doctest::Approx(10.36).epsilon(0.001));
    CHECK(doc["benchmarks"]["MMLU"]["regression"]["residuals"]["Qwen3-235B-A22B"].get<double>() ==
          doctest::Approx(-5.7191).epsilon(1e-4));
    CHECK(doc["benchmarks"]["MMLU"].contains("weight"));
    CHECK_FALSE(doc["benchmarks"]["MMLU-Pro"].contains("weight"));
    CHECK(doc["manifest"]["input_paths"][0] == p(data_path("table1.csv")));
    CHECK(doc["log_base"] == "e");
  }

  TEST_CASE("full pipeline from synthetic data to an estimate") {
    TempDir dir;
    write_synth_config(dir);
    auto r = run({"synth", "--config", p(dir / "synth.json"), "--seed", "5", "--out-dir", p(dir / "lab"),
                  "--unknown-capability", "2.3"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(std::filesystem::exists(dir / "lab" / "outcomes.jsonl"));
    CHECK(std::filesystem::exists(dir / "lab" / "truth.json"));
    const auto synth = read_json(dir / "lab" / "synth.json");
    CHECK(synth["unknown"]["oracle_interval"] == Json::array({"M3", "M4"}));

    r = run({"ingest", "--records", p(dir / "lab" / "outcomes.jsonl"), "--family", p(dir / "lab" / "family.json"),
             "--out", p(dir / "matrix.json")});
    REQUIRE_MESSAGE(r.code == 0, r.err);

    r = run({"pool", "--matrix", p(dir / "lab" / "outcomes.jsonl"), "--family", p(dir / "lab" / "family.json"),
             "--out", p(dir / "pool.json")});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto pool = read_json(dir / "pool.json");
    CHECK(pool["summary"]["abnormal_fraction"] == 0);
    CHECK(pool["contamination_suspects"].empty());
    r = run({"pool", "--matrix", p(dir / "matrix.json"), "--out", p(dir / "pool2.json")});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(read_json(dir / "pool2.json")["buckets"] == pool["buckets"]);

    const std::vector<std::string> subset_args = {"subset", "--pool", p(dir / "pool.json"), "--m", "11",
                                                  "--seed", "7", "--out", p(dir / "subset.json")};
    REQUIRE(run(subset_args).code == 0);
    const auto first = read_file(dir / "subset.json");
    REQUIRE(run(subset_args).code == 0);
    CHECK(read_file(dir / "subset.json") == first);
    const auto subset = read_json(dir / "subset.json");
    CHECK(subset["items"].size() == 99);
    CHECK(subset["validation"]["ok"] == true);

    r = run({"evaluate", "--subset", p(dir / "subset.json"), "--outcomes", p(dir / "lab" / "unknown.jsonl"),
             "--family", p(dir / "lab" / "family.json"), "--out", p(dir / "estimate.json")});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto est = read_json(dir / "estimate.json");
    CHECK(est["interval"] == Json::array({"M3", "M4"}));
    CHECK(est["drop"]["from"] == 3);
    CHECK(est["manifest"]["seed"] == 7);

    // The subset was drawn for "lab"; the default family does not match.
    r = run({"evaluate", "--subset", p(dir / "subset.json"), "--outcomes", p(dir / "lab" / "unknown.jsonl")});
    CHECK(r.code == 1);
  }

  TEST_CASE("seeded commands are byte-for-byte reproducible") {
    TempDir dir;
    write_synth_config(dir);
    for (const char* sub : {"a", "b"}) {
      REQUIRE(run({"synth", "--config", p(dir / "synth.json"), "--seed", "9", "--out-dir", p(dir / sub),
                   "--unknown-capability", "0.5"})
                  .code == 0);
    }
    for (const char* f : {"outcomes.jsonl", "family.json", "truth.json", "unknown.jsonl"})
      CHECK(read_file(dir / "a" / f) == read_file(dir / "b" / f));
    const auto ra = read_json(dir / "a" / "synth.json");
    const auto rb = read_json(dir / "b" / "synth.json");
    for (const char* k : {"config", "planted_counts", "unknown"}) CHECK(ra[k] == rb[k]);
    CHECK(ra["manifest"]["config_digest"] == rb["manifest"]["config_digest"]);

    stem::testing::write_file(dir / "ref.csv",
                              "benchmark,M1,M2,M3,M4,M5,M6,M7,M8\ntoy,55,60,64,68,72,76,80,85\n");
    const std::vector<std::string> args = {"baseline", "--outcomes", p(dir / "a" / "unknown.jsonl"),
                                           "--reference", p(dir / "ref.csv"), "--n", "100", "--trials", "20",
                                           "--seed", "3", "--truth", "M1,M2", "--out", p(dir / "base1.json")};
    auto r = run(args);
    REQUIRE_MESSAGE(r.code == 0, r.err);
    auto args2 = args;
    args2.back() = p(dir / "base2.json");
    REQUIRE(run(args2).code == 0);
    const auto b1 = read_file(dir / "base1.json");
    auto b2 = read_file(dir / "base2.json");
    // Only the output path in the recorded command differs.
    const auto pos = b2.find("base2.json");
    REQUIRE(pos != std::string::npos);
    b2.replace(pos, 10, "base1.json");
    CHECK(b1 == b2);
    const auto doc = read_json(dir / "base1.json");
    CHECK(doc["trials"].size() == 20);
    CHECK(doc["mode"] == "per_benchmark");
    CHECK(doc["aggregate"]["trials"] == 20);
    CHECK(run({"baseline", "--outcomes", p(dir / "a" / "unknown.jsonl"), "--reference", p(dir / "ref.csv"),
               "--mode", "aggregate", "--seed", "3", "--out", p(dir / "agg.json")})
              .code == 0);
    CHECK(read_json(dir / "agg.json")["mode"] == "aggregate");
  }

  TEST_CASE("infer against a stub endpoint") {
    TempDir dir;
    stem::testing::EnvGuard key("STEM_CLI_TEST_KEY", "k");
    stem::testing::StubServer server([](const std::string&, int) {
      return stem::testing::StubReply{200, stem::testing::completion("{'answer': 'B'}"), 0};
    });
    stem::testing::write_file(dir / "endpoint.json",
                              "{\"base_url\": \"" + server.base_url() +
                                  "\", \"model_name\": \"stub\", \"api_key_env\": \"STEM_CLI_TEST_KEY\"}");
    stem::testing::write_file(
        dir / "samples.jsonl",
        "{\"sample_id\": \"x1\", \"benchmark_id\": \"mmlu\", \"gold\": \"B\", \"fields\": {\"ques_desc\": \"q\", "
        "\"options_text\": \"A) 1 B) 2\"}}\n"
        "{\"sample_id\": \"x2\", \"benchmark_id\": \"mmlu\", \"gold\": \"A\", \"fields\": {\"ques_desc\": \"q\", "
        "\"options_text\": \"A) 1 B) 2\"}}\n");
    auto r = run({"infer", "--endpoint", p(dir / "endpoint.json"), "--samples", p(dir / "samples.jsonl"), "--out",
                  p(dir / "out.jsonl"), "--report", p(dir / "infer.json")});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto recs = load_outcome_records(dir / "out.jsonl");
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].outcome == Outcome::Correct);
    CHECK(recs[1].outcome == Outcome::Wrong);
    CHECK(read_json(dir / "infer.json")["outcome_counts"]["1"] == 1);

    stem::testing::EnvGuard nokey("STEM_CLI_TEST_KEY", nullptr);
    r = run({"infer", "--endpoint", p(dir / "endpoint.json"), "--samples", p(dir / "samples.jsonl"), "--out",
             p(dir / "out2.jsonl")});
    CHECK(r.code == 1);
  }
}
