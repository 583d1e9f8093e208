#include "stem/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stem/error.hpp"

namespace stem {

namespace {

double mean(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double central_moment(std::span<const double> xs, double mu, int order) {
  double acc = 0.0;
  for (double x : xs) acc += std::pow(x - mu, order);
  return acc / static_cast<double>(xs.size());
}

void require_same_length(std::span<const double> a, std::span<const double> b, std::size_t min_n,
                         const char* what) {
  if (a.size() != b.size())
    throw ArgumentError(std::string(what) + ": scores and params differ in length");
  if (a.size() < min_n)
    throw ArgumentError(std::string(what) + ": need at least " + std::to_string(min_n) +
                        " points");
}

}  // namespace

double population_stddev(std::span<const double> xs) {
  if (xs.empty()) throw ArgumentError("stddev of empty series");
  return std::sqrt(central_moment(xs, mean(xs), 2));
}

double sample_stddev(std::span<const double> xs) {
  if (xs.size() < 2) throw ArgumentError("sample stddev needs at least 2 values");
  const double n = static_cast<double>(xs.size());
  return std::sqrt(central_moment(xs, mean(xs), 2) * n / (n - 1.0));
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw ArgumentError("pearson: series must share a length >= 2");
  const double mx = mean(xs);
  const double my = mean(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedError("correlation undefined for a constant series");
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> log_params(std::span<const double> params, double base) {
  if (base != kNaturalLog && (!(base > 0.0) || base == 1.0))
    throw DomainError("log base must be positive and != 1");
  const double scale = base == kNaturalLog ? 1.0 : std::log(base);
  std::vector<double> out;
  out.reserve(params.size());
  for (double p : params) {
    if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("parameter counts must be positive");
    out.push_back(std::log(p) / scale);
  }
  return out;
}

Discriminability discriminability(std::span<const double> scores, std::span<const double> params,
                                  double log_base) {
  require_same_length(scores, params, 3, "discriminability");
  const auto logs = log_params(params, log_base);
  if (std::ranges::adjacent_find(scores, std::ranges::not_equal_to{}) == scores.end())
    throw UndefinedError("discriminability: scores are constant, correlation undefined");
  Discriminability out;
  out.sigma = population_stddev(scores);
  out.rho = pearson(scores, logs);
  out.d = out.sigma * out.rho;
  return out;
}

DiscriminabilityReport discriminability_report(const ScoreTable& table, const ModelFamily& family,
                                               double log_base) {
  DiscriminabilityReport report;
  const auto params = family.param_counts();
  for (const auto& b : table.benchmarks())
    report.per_benchmark[b] = discriminability(table.family_row(b, family), params, log_base);
  return report;
}

WeightVector weight_vector(const std::map<std::string, double>& ds) {
  if (ds.empty()) throw ArgumentError("weight_vector: no benchmarks");
  double total = 0.0;
  for (const auto& [b, d] : ds) {
    if (!(d > 0.0) || !std::isfinite(d))
      throw DomainError("discriminability of " + b + " is " + std::to_string(d) +
                        "; only positive values can be weighted");
    total += d;
  }
  WeightVector w;
  for (const auto& [b, d] : ds) w.weights[b] = d / total;
  return w;
}

ReferenceRanking reference_scores(const ScoreTable& table, const WeightVector& weights) {
  if (weights.weights.empty()) throw ArgumentError("reference_scores: empty weight vector");
  std::vector<std::pair<std::size_t, double>> rows;
  for (const auto& [b, w] : weights.weights) {
    const auto idx = table.benchmark_index(b);
    if (!idx) throw SchemaError("reference_scores: benchmark " + b + " not in score table");
    rows.emplace_back(*idx, w);
  }

  ReferenceRanking out;
  for (std::size_t m = 0; m < table.models().size(); ++m) {
    double score = 0.0;
    bool complete = true;
    for (const auto& [row, w] : rows) {
      const auto cell = table.at(row, m);
      if (!cell) {
        complete = false;
        break;
      }
      score += w * *cell;
    }
    if (complete) out.ranking.push_back({table.models()[m], score});
    else out.excluded.push_back(table.models()[m]);
  }
  std::ranges::stable_sort(out.ranking, std::ranges::greater{}, &RankedModel::score);
  return out;
}

RegressionFit fit_scaling_law(std::span<const double> scores, std::span<const double> params,
                              double log_base) {
  require_same_length(scores, params, 3, "fit_scaling_law");
  const auto x = log_params(params, log_base);
  const double mx = mean(x);
  const double my = mean(scores);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (scores[i] - my);
    syy += (scores[i] - my) * (scores[i] - my);
  }
  if (sxx == 0.0) throw UndefinedError("fit_scaling_law: all parameter counts equal (singular design)");

  RegressionFit fit;
  fit.alpha = sxy / sxx;
  fit.beta = my - fit.alpha * mx;
  double ss_res = 0.0;
  fit.residuals.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = scores[i] - (fit.alpha * x[i] + fit.beta);
    fit.residuals.push_back(r);
    ss_res += r * r;
  }
  fit.r_squared = syy == 0.0 ? 1.0 : std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  return fit;
}

ResidualDiagnostics residual_diagnostics(std::span<const double> residuals) {
  const std::size_t count = residuals.size();
  if (count < 4) throw ArgumentError("residual_diagnostics: need at least 4 values");
  const double n = static_cast<double>(count);
  const double mu = mean(residuals);
  const double m2 = central_moment(residuals, mu, 2);
  if (m2 == 0.0) throw UndefinedError("residual_diagnostics: zero variance, moments undefined");
  const double m3 = central_moment(residuals, mu, 3);
  const double m4 = central_moment(residuals, mu, 4);

  const double g1 = m3 / std::pow(m2, 1.5);
  const double g2 = m4 / (m2 * m2) - 3.0;

  ResidualDiagnostics out;
  out.std_dev = std::sqrt(m2 * n / (n - 1.0));
  out.skewness = g1 * std::sqrt(n * (n - 1.0)) / (n - 2.0);
  out.kurtosis = ((n + 1.0) * g2 + 6.0) * (n - 1.0) / ((n - 2.0) * (n - 3.0));
  return out;
}

DifficultyDistribution difficulty_distribution(double smallest_model_acc, double largest_model_acc) {
  for (double v : {smallest_model_acc, largest_model_acc})
    if (!(v >= 0.0 && v <= 100.0)) throw DomainError("accuracy must lie in [0,100]");
  DifficultyDistribution out;
  out.simple_pct = smallest_model_acc;
  out.difficult_pct = 100.0 - largest_model_acc;
  out.intermediate_pct = largest_model_acc - smallest_model_acc;
  out.inverted = out.intermediate_pct < 0.0;
  return out;
}

}  // namespace stem
