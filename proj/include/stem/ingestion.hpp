#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stem/types.hpp"

namespace stem {

/// Benchmark x model matrix of aggregate accuracies (percent). Missing
/// cells are kept as std::nullopt, never coerced to zero.
class ScoreTable {
 public:
  ScoreTable(std::vector<std::string> benchmarks, std::vector<std::string> models,
             std::vector<std::optional<double>> cells);

  const std::vector<std::string>& benchmarks() const noexcept { return benchmarks_; }
  const std::vector<std::string>& models() const noexcept { return models_; }

  std::optional<std::size_t> benchmark_index(std::string_view benchmark) const;
  std::optional<std::size_t> model_index(std::string_view model) const;

  std::optional<double> at(std::size_t benchmark, std::size_t model) const {
    return cells_.at(benchmark * models_.size() + model);
  }
  std::optional<double> get(std::string_view benchmark, std::string_view model) const;

  /// Scores of `benchmark` for each family model, in family order.
  /// Throws DataError if a family model is absent or its cell is missing.
  std::vector<double> family_row(std::string_view benchmark, const ModelFamily& family) const;

 private:
  std::vector<std::string> benchmarks_;
  std::vector<std::string> models_;
  std::vector<std::optional<double>> cells_;
};

/// Header "benchmark,<model>,...", one benchmark per row, "-" = missing.
ScoreTable parse_score_table(std::string_view csv_text);
ScoreTable load_score_table(const std::filesystem::path& path);

struct OutcomeRecord {
  std::string sample_id;
  std::string benchmark_id;
  std::string model_id;
  Outcome outcome = Outcome::Error;
  std::optional<std::string> raw_response;

  friend bool operator==(const OutcomeRecord&, const OutcomeRecord&) = default;
};

/// Parses one JSONL line; `line_number` is used in error messages only.
OutcomeRecord parse_outcome_line(std::string_view line, std::size_t line_number);
std::vector<OutcomeRecord> parse_outcome_records(std::istream& in);
std::vector<OutcomeRecord> load_outcome_records(const std::filesystem::path& path);

std::string format_outcome_line(const OutcomeRecord& record);
void write_outcome_records(std::ostream& out, const std::vector<OutcomeRecord>& records);
void save_outcome_records(const std::filesystem::path& path,
                          const std::vector<OutcomeRecord>& records);

/// Returns the first balanced {...} region of `text` that parses as a JSON
/// object once single-quoted strings are rewritten as double-quoted ones.
std::optional<std::string> extract_first_json_object(std::string_view text);

/// Rewrites single-quoted string literals as double-quoted JSON strings.
std::string normalize_single_quotes(std::string_view text);

struct ChoiceParse {
  std::optional<char> letter;  // upper-case
  Outcome outcome = Outcome::Error;
};

ChoiceParse parse_choice_answer(std::string_view raw_response, char gold_letter);

struct VerdictParse {
  std::optional<bool> verdict;
  Outcome outcome = Outcome::Error;
};

VerdictParse parse_judge_verdict(std::string_view raw_response);

/// For each sample, the outcome vector ordered by family model order.
struct OutcomeMatrix {
  ModelFamily family;
  std::string benchmark_id;
  std::map<std::string, std::vector<Outcome>> entries;
};

struct MatrixRejection {
  std::string sample_id;
  std::vector<std::string> missing_models;
};

struct MatrixBuild {
  OutcomeMatrix matrix;
  std::vector<MatrixRejection> rejected;
  /// Records for the benchmark whose model is not in the family.
  std::size_t foreign_records = 0;
};

/// Samples without a record for every family model are rejected, not imputed.
MatrixBuild build_outcome_matrix(const std::vector<OutcomeRecord>& records,
                                 const ModelFamily& family, const std::string& benchmark_id);

/// Flattens a matrix back into records (family order, samples sorted).
std::vector<OutcomeRecord> matrix_to_records(const OutcomeMatrix& matrix);

}  // namespace stem
