#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "stem/cli.hpp"
#include "stem/estimator.hpp"
#include "stem/report.hpp"
#include "stem/sampler.hpp"
#include "stem/synthetic.hpp"
#include "stem/transition.hpp"

namespace py = pybind11;
using namespace stem;

// Documents cross the boundary as JSON text; the Python package decodes them.
namespace {

std::string dump(const Json& doc) { return canonical_json(doc); }

std::string classify(const std::vector<int>& irv) {
  std::vector<Outcome> v;
  for (int x : irv) v.push_back(outcome_from_int(x));
  const auto c = classify_irv(v);
  Json out = {{"kind", to_string(c.kind)}, {"transition_index", nullptr}};
  if (c.transition_index) out["transition_index"] = *c.transition_index;
  return dump(out);
}

std::string build_pool(const std::string& matrix_json) {
  const auto build = build_sts_pool(matrix_from_json(Json::parse(matrix_json)));
  return dump({{"pool", to_json(build.pool)},
               {"summary", to_json(build.summary)},
               {"rejects", to_json(build.rejects)}});
}

std::string sample_subset(const std::string& pool_json, std::size_t m, std::uint64_t seed, bool allow_underfill) {
  SubsetOptions opts;
  opts.allow_underfill = allow_underfill;
  return dump(to_json(sample_balanced_subset(pool_from_json(Json::parse(pool_json)), m, seed, opts)));
}

std::string estimate(const std::string& subset_json, const std::map<std::string, int>& outcomes,
                     const std::string& family_json, double threshold, double floor) {
  std::map<std::string, Outcome> o;
  for (const auto& [sid, v] : outcomes) o[sid] = outcome_from_int(v);
  const auto profile = ti_accuracy_profile(subset_from_json(Json::parse(subset_json)), o);
  const auto est = estimate_capability(profile, family_from_json(Json::parse(family_json)), threshold, floor);
  return dump(estimate_report(est, profile));
}

std::string stats(const std::string& scores_csv, const std::string& family_json,
                  const std::vector<std::string>& weighted, double log_base) {
  const auto family = family_json.empty() ? ModelFamily::qwen3() : family_from_json(Json::parse(family_json));
  return dump(cli::stats_report(parse_score_table(scores_csv), family, weighted, log_base));
}

std::string synthesize(const std::string& config_json) {
  const auto config = synthetic_config_from_json(Json::parse(config_json));
  const auto ds = generate_family(config);
  Json flags = Json::object();
  for (const auto& [sid, f] : ds.planted_flags) flags[sid] = to_string(f);
  return dump({{"matrix", to_json(MatrixBuild{ds.matrix, {}, 0})},
               {"family", to_json(ds.matrix.family)},
               {"latent_difficulty", ds.latent_difficulty},
               {"planted_flags", flags}});
}

py::tuple run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = 0;
  {
    py::gil_scoped_release release;
    code = cli::execute(args, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_stemkit, m) {
  m.doc() = "Native core of stemkit";
  m.attr("__version__") = STEM_VERSION;

  py::register_exception<stem::Error>(m, "StemError", PyExc_ValueError);

  m.def("classify_irv", &classify, py::arg("irv"));
  m.def("build_pool", &build_pool, py::arg("matrix_json"));
  m.def("sample_subset", &sample_subset, py::arg("pool_json"), py::arg("m"), py::arg("seed"),
        py::arg("allow_underfill") = false);
  m.def("estimate", &estimate, py::arg("subset_json"), py::arg("outcomes"), py::arg("family_json"),
        py::arg("threshold") = kDefaultDropThreshold, py::arg("floor") = kDefaultFloorPct);
  m.def("stats_report", &stats, py::arg("scores_csv"), py::arg("family_json") = "",
        py::arg("weighted") = std::vector<std::string>{}, py::arg("log_base") = kNaturalLog);
  m.def("synthesize", &synthesize, py::arg("config_json"));
  m.def("correctness_probability", &correctness_probability, py::arg("capability"), py::arg("difficulty"),
        py::arg("temperature") = 0.0);
  m.def("run_cli", &run_cli, py::arg("args"));
}
