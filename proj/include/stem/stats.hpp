#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "stem/ingestion.hpp"

namespace stem {

/// Natural log by default. Every reported quantity is invariant to the base.
inline constexpr double kNaturalLog = 0.0;

// ---------------------------------------------------------------------------
// Moments and correlation

/// Standard deviation with denominator n (population) or n - 1 (sample).
double population_stddev(std::span<const double> xs);
double sample_stddev(std::span<const double> xs);

/// Pearson correlation; throws UndefinedError if either series is constant.
double pearson(std::span<const double> xs, std::span<const double> ys);

/// Logs of `params` in the given base (kNaturalLog for e). Throws
/// DomainError on nonpositive values.
std::vector<double> log_params(std::span<const double> params, double base = kNaturalLog);

// ---------------------------------------------------------------------------
// Benchmark discriminability and weighting

struct Discriminability {
  double d = 0.0;
  double sigma = 0.0;  // population standard deviation of the scores
  double rho = 0.0;    // Pearson(scores, log params)
};

/// D = sigma(scores) * Pearson(scores, log(params)).
Discriminability discriminability(std::span<const double> scores, std::span<const double> params,
                                  double log_base = kNaturalLog);

struct DiscriminabilityReport {
  std::map<std::string, Discriminability> per_benchmark;
};

/// D for every benchmark of the table that has a full row over the family.
DiscriminabilityReport discriminability_report(const ScoreTable& table, const ModelFamily& family,
                                               double log_base = kNaturalLog);

struct WeightVector {
  std::map<std::string, double> weights;
};

/// w_j = D_j / sum(D). Every D must be strictly positive.
WeightVector weight_vector(const std::map<std::string, double>& ds);

struct RankedModel {
  std::string model_id;
  double score = 0.0;
};

struct ReferenceRanking {
  std::vector<RankedModel> ranking;  // descending by score
  std::vector<std::string> excluded;  // models missing a weighted benchmark
};

/// score(model) = sum_j w_j * S_{j,model}.
ReferenceRanking reference_scores(const ScoreTable& table, const WeightVector& weights);

// ---------------------------------------------------------------------------
// Scaling-law regression

struct RegressionFit {
  double alpha = 0.0;  // slope per unit log(P)
  double beta = 0.0;   // intercept
  std::vector<double> residuals;  // S_i - (alpha log P_i + beta), input order
  double r_squared = 0.0;
};

/// Ordinary least squares of scores on log(params).
RegressionFit fit_scaling_law(std::span<const double> scores, std::span<const double> params,
                              double log_base = kNaturalLog);

struct ResidualDiagnostics {
  double std_dev = 0.0;   // n - 1 denominator
  double skewness = 0.0;  // adjusted Fisher-Pearson G1
  double kurtosis = 0.0;  // adjusted excess G2
};

ResidualDiagnostics residual_diagnostics(std::span<const double> residuals);

// ---------------------------------------------------------------------------
// Difficulty split

struct DifficultyDistribution {
  double simple_pct = 0.0;
  double intermediate_pct = 0.0;
  double difficult_pct = 0.0;
  /// Set when the smallest model outscored the largest (intermediate < 0).
  bool inverted = false;
};

/// Simple = smallest model's accuracy, Difficult = 100 - largest model's
/// accuracy, Intermediate = the remainder.
DifficultyDistribution difficulty_distribution(double smallest_model_acc, double largest_model_acc);

}  // namespace stem
