#include "stem/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "stem/rng.hpp"

namespace stem::cli {

namespace fs = std::filesystem;

Json stats_report(const ScoreTable& table, const ModelFamily& family,
                  const std::vector<std::string>& weighted, double log_base) {
  const auto params = family.param_counts();
  Json benchmarks = Json::object();
  std::map<std::string, double> ds;
  std::vector<std::string> eligible;

  for (const auto& b : table.benchmarks()) {
    std::vector<double> row;
    try {
      row = table.family_row(b, family);
    } catch (const DataError&) {
      continue;
    }
    eligible.push_back(b);
    const auto d = discriminability(row, params, log_base);
    const auto fit = fit_scaling_law(row, params, log_base);
    const auto diag = residual_diagnostics(fit.residuals);
    const auto diff = difficulty_distribution(row.front(), row.back());
    ds[b] = d.d;

    Json residuals = Json::object();
    for (std::size_t i = 0; i < family.size(); ++i) residuals[family.model_id(i)] = fit.residuals[i];
    benchmarks[b] = {
        {"D", d.d},
        {"sigma", d.sigma},
        {"rho", d.rho},
        {"regression",
         {{"alpha", fit.alpha}, {"beta", fit.beta}, {"r_squared", fit.r_squared}, {"residuals", residuals}}},
        {"diagnostics",
         {{"std_dev", diag.std_dev}, {"skewness", diag.skewness}, {"kurtosis", diag.kurtosis}}},
        {"difficulty",
         {{"simple_pct", diff.simple_pct},
          {"intermediate_pct", diff.intermediate_pct},
          {"difficult_pct", diff.difficult_pct},
          {"inverted", diff.inverted}}}};
  }
  if (eligible.empty()) throw DataError("no benchmark has scores for every family model");

  std::map<std::string, double> selected;
  if (weighted.empty()) {
    selected = ds;
  } else {
    for (const auto& name : weighted) {
      const auto idx = table.benchmark_index(name);
      if (!idx) throw DataError("benchmark " + name + " not in score table");
      const auto& label = table.benchmarks()[*idx];
      if (!ds.contains(label)) throw DataError("benchmark " + label + " lacks scores for the family");
      selected[label] = ds.at(label);
    }
  }
  const auto weights = weight_vector(selected);
  for (const auto& [b, w] : weights.weights) benchmarks[b]["weight"] = w;
  const auto ranking = reference_scores(table, weights);

  Json ranked = Json::array();
  for (const auto& r : ranking.ranking) ranked.push_back({{"model_id", r.model_id}, {"score", r.score}});
  Json base = log_base == kNaturalLog ? Json("e") : Json(log_base);
  return {{"family_id", family.family_id()},
          {"log_base", base},
          {"benchmarks", benchmarks},
          {"weights", weights.weights},
          {"reference_scores", {{"ranking", ranked}, {"excluded", ranking.excluded}}}};
}

namespace {

struct Context {
  std::vector<std::string> args;
  std::ostream& out;
  std::ostream& err;

  RunManifest manifest(const std::vector<fs::path>& inputs, std::optional<std::uint64_t> seed) const {
    RunManifest m;
    m.command = "stem";
    for (const auto& a : args) m.command += " " + a;
    // Output locations are left out of the digest.
    std::vector<std::string> material;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--out" || args[i] == "--out-dir") {
        ++i;
        continue;
      }
      if (args[i].starts_with("--out=") || args[i].starts_with("--out-dir=")) continue;
      material.push_back(args[i]);
    }
    m.config_digest = config_digest(material, inputs);
    for (const auto& p : inputs) m.input_paths.push_back(p.string());
    m.seed = seed;
    m.timestamp = manifest_timestamp();
    return m;
  }
};

ModelFamily load_family(const std::string& path) {
  if (path.empty()) return ModelFamily::qwen3();
  return family_from_json(read_json_file(path));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string single_benchmark(const std::vector<OutcomeRecord>& records) {
  std::set<std::string> ids;
  for (const auto& r : records) ids.insert(r.benchmark_id);
  if (ids.size() != 1)
    throw ArgumentError("records span " + std::to_string(ids.size()) +
                        " benchmarks; pass --benchmark");
  return *ids.begin();
}

bool is_jsonl(const fs::path& p) { return p.extension() == ".jsonl"; }

// Outcomes of one model, keyed by sample id.
std::map<std::string, Outcome> outcomes_for(const std::vector<OutcomeRecord>& records,
                                            const std::string& benchmark, std::string model) {
  if (model.empty()) {
    std::set<std::string> models;
    for (const auto& r : records)
      if (benchmark.empty() || r.benchmark_id == benchmark) models.insert(r.model_id);
    if (models.size() != 1)
      throw ArgumentError("outcomes cover " + std::to_string(models.size()) + " models; pass --model");
    model = *models.begin();
  }
  std::map<std::string, Outcome> out;
  for (const auto& r : records) {
    if (r.model_id != model || (!benchmark.empty() && r.benchmark_id != benchmark)) continue;
    const auto [it, inserted] = out.emplace(r.sample_id, r.outcome);
    if (!inserted && it->second != r.outcome)
      throw DataError("conflicting outcomes for sample " + r.sample_id);
  }
  if (out.empty()) throw DataError("no outcomes for model " + model);
  return out;
}

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string records, family, benchmark, out = "-";
};

int run_ingest(const Context& ctx, const IngestArgs& a) {
  const auto records = load_outcome_records(a.records);
  const auto family = load_family(a.family);
  const std::string bench = a.benchmark.empty() ? single_benchmark(records) : a.benchmark;
  const auto build = build_outcome_matrix(records, family, bench);
  std::vector<fs::path> inputs{a.records};
  if (!a.family.empty()) inputs.emplace_back(a.family);
  emit_report(ctx.out, to_json(build), ctx.manifest(inputs, std::nullopt), a.out);
  return kExitOk;
}

struct PoolArgs {
  std::string matrix, family, benchmark, out = "-";
};

int run_pool(const Context& ctx, const PoolArgs& a) {
  std::vector<fs::path> inputs{a.matrix};
  OutcomeMatrix matrix{ModelFamily::qwen3(), "", {}};
  Json matrix_rejects = Json::array();
  if (is_jsonl(a.matrix)) {
    const auto records = load_outcome_records(a.matrix);
    const auto family = load_family(a.family);
    if (!a.family.empty()) inputs.emplace_back(a.family);
    const std::string bench = a.benchmark.empty() ? single_benchmark(records) : a.benchmark;
    auto build = build_outcome_matrix(records, family, bench);
    matrix_rejects = to_json(build)["rejected"];
    matrix = std::move(build.matrix);
  } else {
    matrix = matrix_from_json(read_json_file(a.matrix));
  }
  const auto built = build_sts_pool(matrix);
  Json payload = to_json(built.pool);
  payload["summary"] = to_json(built.summary);
  payload["rejects"] = to_json(built.rejects);
  payload["contamination_suspects"] = flag_contamination(matrix);
  payload["incomplete_samples"] = matrix_rejects;
  emit_report(ctx.out, payload, ctx.manifest(inputs, std::nullopt), a.out);
  return kExitOk;
}

struct SubsetArgs {
  std::string pool, classes, out = "-";
  std::size_t m = 11;
  std::uint64_t seed = 0;
  bool allow_underfill = false;
};

int run_subset(const Context& ctx, const SubsetArgs& a) {
  const auto pool = pool_from_json(read_json_file(a.pool));
  SubsetOptions opts;
  opts.allow_underfill = a.allow_underfill;
  for (const auto& c : split_list(a.classes)) {
    try {
      opts.classes.push_back(std::stoi(c));
    } catch (const std::exception&) {
      throw ArgumentError("bad class '" + c + "'");
    }
  }
  const auto subset = sample_balanced_subset(pool, a.m, a.seed, opts);
  for (const auto& w : subset.warnings) ctx.err << "warning: " << w << '\n';
  Json payload = to_json(subset);
  payload["validation"] = to_json(validate_subset(subset, pool));
  emit_report(ctx.out, payload, ctx.manifest({a.pool}, a.seed), a.out);
  return kExitOk;
}

struct EvaluateArgs {
  std::string subset, outcomes, family, model, out = "-";
  double threshold = kDefaultDropThreshold;
  double floor = kDefaultFloorPct;
};

int run_evaluate(const Context& ctx, const EvaluateArgs& a) {
  const auto subset = subset_from_json(read_json_file(a.subset));
  const auto family = load_family(a.family);
  if (!subset.family_id.empty() && subset.family_id != family.family_id())
    throw DataError("subset was drawn for family " + subset.family_id + ", not " + family.family_id());
  const auto records = load_outcome_records(a.outcomes);
  const auto outcomes = outcomes_for(records, subset.benchmark_id, a.model);
  const auto profile = ti_accuracy_profile(subset, outcomes);
  const auto estimate = estimate_capability(profile, family, a.threshold, a.floor);
  Json payload = estimate_report(estimate, profile);
  payload["threshold_pp"] = a.threshold;
  payload["floor_pct"] = a.floor;
  std::vector<fs::path> inputs{a.subset, a.outcomes};
  if (!a.family.empty()) inputs.emplace_back(a.family);
  emit_report(ctx.out, payload, ctx.manifest(inputs, subset.seed), a.out);
  return kExitOk;
}

struct StatsArgs {
  std::string scores, family, benchmarks, out = "-";
  double log_base = kNaturalLog;
};

int run_stats(const Context& ctx, const StatsArgs& a) {
  const auto table = load_score_table(a.scores);
  const auto family = load_family(a.family);
  std::vector<fs::path> inputs{a.scores};
  if (!a.family.empty()) inputs.emplace_back(a.family);
  emit_report(ctx.out, stats_report(table, family, split_list(a.benchmarks), a.log_base),
              ctx.manifest(inputs, std::nullopt), a.out);
  return kExitOk;
}

struct BaselineArgs {
  std::string outcomes, reference, reference_models, weights, model, truth, mode = "per_benchmark";
  std::string out = "-";
  std::size_t n = 100;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
};

int run_baseline(const Context& ctx, const BaselineArgs& a) {
  const auto records = load_outcome_records(a.outcomes);
  const auto table = load_score_table(a.reference);
  std::vector<fs::path> inputs{a.outcomes, a.reference};

  BaselineConfig config;
  config.n = a.n;
  config.trials = a.trials;
  config.seed = a.seed;
  config.mode = placement_mode_from_string(a.mode);

  std::set<std::string> bench_ids;
  for (const auto& r : records) bench_ids.insert(r.benchmark_id);
  std::vector<BenchmarkOutcomes> benchmarks;
  for (const auto& b : bench_ids) benchmarks.push_back({b, outcomes_for(records, b, a.model)});

  std::vector<std::string> ref_models = split_list(a.reference_models);
  if (ref_models.empty()) {
    std::set<std::string> evaluated;
    for (const auto& r : records) evaluated.insert(r.model_id);
    for (const auto& m : table.models())
      if (!evaluated.contains(m)) ref_models.push_back(m);
  }
  for (const auto& m : ref_models)
    if (!table.model_index(m)) throw DataError("reference model " + m + " not in reference table");

  std::map<std::string, ReferenceLadder> ladders;
  std::optional<ReferenceLadder> aggregate;
  if (config.mode == PlacementMode::PerBenchmark) {
    for (const auto& b : benchmarks) {
      std::vector<RankedModel> rungs;
      for (const auto& m : ref_models)
        if (const auto s = table.get(b.benchmark_id, m)) rungs.push_back({m, *s});
      if (rungs.empty()) throw DataError("no reference scores for benchmark " + b.benchmark_id);
      ladders.emplace(b.benchmark_id, ReferenceLadder(std::move(rungs)));
    }
  } else {
    if (!a.weights.empty()) {
      inputs.emplace_back(a.weights);
      try {
        config.weights = read_json_file(a.weights).get<std::map<std::string, double>>();
      } catch (const Json::exception&) {
        throw SchemaError("weights file must map benchmark ids to numbers");
      }
    } else {
      for (const auto& b : benchmarks) config.weights[b.benchmark_id] = 1.0;
    }
    double total = 0.0;
    for (const auto& [_, w] : config.weights) total += w;
    if (!(total > 0.0)) throw DomainError("weights sum to zero");
    WeightVector wv;
    for (const auto& [b, w] : config.weights) wv.weights[b] = w / total;
    const auto ranking = reference_scores(table, wv);
    std::vector<RankedModel> rungs;
    for (const auto& r : ranking.ranking)
      if (std::ranges::find(ref_models, r.model_id) != ref_models.end()) rungs.push_back(r);
    if (rungs.empty()) throw DataError("no reference model has every weighted benchmark");
    aggregate.emplace(std::move(rungs));
  }

  const auto run = run_random_baseline(benchmarks, config, ladders, aggregate ? &*aggregate : nullptr);
  Json payload = to_json(run, config);
  if (!a.truth.empty()) {
    const Interval truth = parse_interval(a.truth);
    std::vector<Interval> placements;
    for (const auto& t : run.trials) placements.push_back(t.placement);
    payload["ground_truth"] = to_json(truth);
    payload["aggregate"] = to_json(aggregate_intervals(placements, truth));
  }
  emit_report(ctx.out, payload, ctx.manifest(inputs, a.seed), a.out);
  return kExitOk;
}

struct SynthArgs {
  std::string config, out_dir, unknown_id = "unknown", out;
  std::uint64_t seed = 0;
  std::optional<double> unknown_capability;
};

int run_synth(const Context& ctx, const SynthArgs& a) {
  SyntheticConfig config = synthetic_config_from_json(read_json_file(a.config));
  config.seed = a.seed;
  const auto ds = generate_family(config);

  std::error_code ec;
  fs::create_directories(a.out_dir, ec);
  if (ec) throw IoError("cannot create " + a.out_dir + ": " + ec.message());
  const fs::path dir(a.out_dir);
  save_outcome_records(dir / "outcomes.jsonl", matrix_to_records(ds.matrix));
  write_text_file(dir / "family.json", canonical_json(to_json(ds.matrix.family)));

  Json latent = Json::object();
  Json flags = Json::object();
  std::map<std::string, std::size_t> flag_counts;
  for (const auto& [sid, d] : ds.latent_difficulty) latent[sid] = d;
  for (const auto& [sid, f] : ds.planted_flags) {
    flags[sid] = to_string(f);
    ++flag_counts[to_string(f)];
  }
  write_text_file(dir / "truth.json",
                  canonical_json({{"latent_difficulty", latent}, {"planted_flags", flags}}));

  Json payload = {{"config", to_json(config)},
                  {"planted_counts", flag_counts},
                  {"files", {"outcomes.jsonl", "family.json", "truth.json"}}};
  if (a.unknown_capability) {
    std::vector<std::string> ids;
    for (const auto& [sid, _] : ds.matrix.entries) ids.push_back(sid);
    const auto outcomes = generate_unknown(config, ds, *a.unknown_capability, ids,
                                           derive_seed(config.seed, 0x756e6b6e6f776eULL));
    std::vector<OutcomeRecord> records;
    for (const auto& [sid, o] : outcomes)
      records.push_back({sid, config.benchmark_id, a.unknown_id, o, std::nullopt});
    save_outcome_records(dir / "unknown.jsonl", records);
    std::vector<std::string> model_ids;
    for (const auto& m : ds.matrix.family.models()) model_ids.push_back(m.model_id);
    payload["unknown"] = {
        {"model_id", a.unknown_id},
        {"capability", *a.unknown_capability},
        {"oracle_interval", to_json(oracle_interval(*a.unknown_capability, config.capabilities, model_ids))}};
    payload["files"].push_back("unknown.jsonl");
  }
  const fs::path report = a.out.empty() ? dir / "synth.json" : fs::path(a.out);
  emit_report(ctx.out, payload, ctx.manifest({a.config}, a.seed), report);
  return kExitOk;
}

struct InferArgs {
  std::string endpoint, samples, template_kind = "multiple_choice", template_file, out, report;
};

int run_infer(const Context& ctx, const InferArgs& a) {
  const auto config = endpoint_config_from_json(read_json_file(a.endpoint));
  const TemplateKind kind = template_kind_from_string(a.template_kind);
  std::vector<fs::path> inputs{a.endpoint, a.samples};
  std::optional<PromptTemplate> tmpl;
  if (a.template_file.empty()) {
    tmpl = kind == TemplateKind::MultipleChoice ? PromptTemplate::multiple_choice()
                                                : PromptTemplate::math_judge();
  } else {
    std::ifstream in(a.template_file, std::ios::binary);
    if (!in) throw IoError("cannot open " + a.template_file);
    std::ostringstream ss;
    ss << in.rdbuf();
    tmpl.emplace(kind, ss.str());
    inputs.emplace_back(a.template_file);
  }

  std::ifstream in(a.samples, std::ios::binary);
  if (!in) throw IoError("cannot open " + a.samples);
  std::vector<BatchSample> samples;
  std::map<std::string, std::string> gold;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const Json doc = Json::parse(line, nullptr, false);
    const std::string where = a.samples + " line " + std::to_string(n);
    if (doc.is_discarded() || !doc.is_object()) throw SchemaError(where + ": not a JSON object");
    try {
      BatchSample s{doc.at("sample_id").get<std::string>(), doc.at("benchmark_id").get<std::string>(),
                    doc.at("fields").get<std::map<std::string, std::string>>()};
      if (doc.contains("gold")) gold[s.sample_id] = doc["gold"].get<std::string>();
      samples.push_back(std::move(s));
    } catch (const Json::exception&) {
      throw SchemaError(where + ": expected sample_id, benchmark_id, fields and optional gold");
    }
  }

  const auto records = run_batch(config, samples, *tmpl, gold);
  save_outcome_records(a.out, records);
  if (!a.report.empty()) {
    std::map<std::string, std::size_t> counts;
    for (const auto& r : records) ++counts[std::to_string(to_int(r.outcome))];
    emit_report(ctx.out, {{"records", a.out}, {"model_id", config.model_name}, {"outcome_counts", counts},
                 {"template", to_string(kind)}},
                ctx.manifest(inputs, std::nullopt), a.report);
  }
  return kExitOk;
}

}  // namespace

int execute(const std::vector<std::string>& args) { return execute(args, std::cout, std::cerr); }

int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structured transition evaluation toolkit", "stem"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(STEM_VERSION));

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Assemble an outcome matrix from JSONL records");
  c_ingest->add_option("--records", ingest.records, "Outcome JSONL")->required();
  c_ingest->add_option("--family", ingest.family, "Model family JSON (default: qwen3)");
  c_ingest->add_option("--benchmark", ingest.benchmark, "Benchmark id");
  c_ingest->add_option("--out", ingest.out, "Output path, - for stdout");

  PoolArgs pool;
  auto* c_pool = app.add_subcommand("pool", "Classify IRVs and build the STS pool");
  c_pool->add_option("--matrix", pool.matrix, "Matrix JSON or outcome JSONL")->required();
  c_pool->add_option("--family", pool.family, "Model family JSON for JSONL input (default: qwen3)");
  c_pool->add_option("--benchmark", pool.benchmark, "Benchmark id for JSONL input");
  c_pool->add_option("--out", pool.out, "Output path, - for stdout");

  SubsetArgs subset;
  auto* c_subset = app.add_subcommand("subset", "Draw a balanced subset from a pool");
  c_subset->add_option("--pool", subset.pool, "STS pool JSON")->required();
  c_subset->add_option("--m", subset.m, "Samples per TI class")->check(CLI::PositiveNumber);
  c_subset->add_option("--seed", subset.seed, "Generator seed")->required();
  c_subset->add_option("--classes", subset.classes, "Comma-separated classes (default: all)");
  c_subset->add_flag("--allow-underfill", subset.allow_underfill, "Take min(m, available) per class");
  c_subset->add_option("--out", subset.out, "Output path, - for stdout");

  EvaluateArgs evaluate;
  auto* c_eval = app.add_subcommand("evaluate", "Estimate a model's capability interval");
  c_eval->add_option("--subset", evaluate.subset, "Balanced subset JSON")->required();
  c_eval->add_option("--outcomes", evaluate.outcomes, "Outcome JSONL of the evaluated model")->required();
  c_eval->add_option("--family", evaluate.family, "Model family JSON (default: qwen3)");
  c_eval->add_option("--model", evaluate.model, "Model id to read from the outcomes");
  c_eval->add_option("--threshold", evaluate.threshold, "Drop threshold in percentage points");
  c_eval->add_option("--floor", evaluate.floor, "Minimum class-1 accuracy in percent");
  c_eval->add_option("--out", evaluate.out, "Output path, - for stdout");

  StatsArgs stats;
  auto* c_stats = app.add_subcommand("stats", "Benchmark discriminability, weights and regression");
  c_stats->add_option("--scores", stats.scores, "Score table CSV")->required();
  c_stats->add_option("--family", stats.family, "Model family JSON (default: qwen3)");
  c_stats->add_option("--benchmarks", stats.benchmarks, "Comma-separated weighted benchmarks");
  c_stats->add_option("--log-base", stats.log_base, "Logarithm base (default: e)");
  c_stats->add_option("--out", stats.out, "Output path, - for stdout");

  BaselineArgs baseline;
  auto* c_base = app.add_subcommand("baseline", "Random-sampling evaluation trials");
  c_base->add_option("--outcomes", baseline.outcomes, "Outcome JSONL of the evaluated model")->required();
  c_base->add_option("--reference", baseline.reference, "Reference score table CSV")->required();
  c_base->add_option("--reference-models", baseline.reference_models, "Comma-separated reference models");
  c_base->add_option("--weights", baseline.weights, "Benchmark weights JSON (aggregate mode)");
  c_base->add_option("--model", baseline.model, "Model id to read from the outcomes");
  c_base->add_option("--mode", baseline.mode, "per_benchmark or aggregate")
      ->check(CLI::IsMember({"per_benchmark", "aggregate"}));
  c_base->add_option("--n", baseline.n, "Samples per trial")->check(CLI::PositiveNumber);
  c_base->add_option("--trials", baseline.trials, "Number of trials")->check(CLI::PositiveNumber);
  c_base->add_option("--seed", baseline.seed, "Generator seed")->required();
  c_base->add_option("--truth", baseline.truth, "Ground-truth interval lower,upper");
  c_base->add_option("--out", baseline.out, "Output path, - for stdout");

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic reference family");
  c_synth->add_option("--config", synth.config, "Synthetic config JSON")->required();
  c_synth->add_option("--seed", synth.seed, "Generator seed")->required();
  c_synth->add_option("--out-dir", synth.out_dir, "Directory for generated files")->required();
  c_synth->add_option("--unknown-capability", synth.unknown_capability, "Also emit an unknown model");
  c_synth->add_option("--unknown-id", synth.unknown_id, "Model id of the unknown model");
  c_synth->add_option("--out", synth.out, "Report path (default: <out-dir>/synth.json)");

  InferArgs infer;
  auto* c_infer = app.add_subcommand("infer", "Collect outcomes from a chat-completions endpoint");
  c_infer->add_option("--endpoint", infer.endpoint, "Endpoint config JSON")->required();
  c_infer->add_option("--samples", infer.samples, "Sample JSONL")->required();
  c_infer->add_option("--template", infer.template_kind, "multiple_choice or math_judge")
      ->check(CLI::IsMember({"multiple_choice", "math_judge"}));
  c_infer->add_option("--template-file", infer.template_file, "Custom template text");
  c_infer->add_option("--out", infer.out, "Outcome JSONL to write")->required();
  c_infer->add_option("--report", infer.report, "Optional run report path");

  if (!args.empty() && !args.front().starts_with("-") && app.get_subcommand_no_throw(args.front()) == nullptr) {
    err << "error: unknown command '" << args.front() << "'\n\n" << app.help();
    return kExitValidation;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  const Context ctx{args, out, err};
  try {
    if (*c_ingest) return run_ingest(ctx, ingest);
    if (*c_pool) return run_pool(ctx, pool);
    if (*c_subset) return run_subset(ctx, subset);
    if (*c_eval) return run_evaluate(ctx, evaluate);
    if (*c_stats) return run_stats(ctx, stats);
    if (*c_base) return run_baseline(ctx, baseline);
    if (*c_synth) return run_synth(ctx, synth);
    if (*c_infer) return run_infer(ctx, infer);
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const TransportError& e) {
    err << "transport error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  err << app.help();
  return kExitValidation;
}

}  // namespace stem::cli
