#include "stem/ingestion.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "stem/error.hpp"

namespace stem {

using nlohmann::json;

Outcome outcome_from_int(long long value) {
  switch (value) {
    case -1: return Outcome::Error;
    case 0: return Outcome::Wrong;
    case 1: return Outcome::Correct;
    default: throw SchemaError("outcome must be -1, 0 or 1, got " + std::to_string(value));
  }
}

// ---------------------------------------------------------------------------
// ModelFamily

ModelFamily::ModelFamily(std::string family_id, std::vector<ModelSpec> models)
    : family_id_(std::move(family_id)), models_(std::move(models)) {
  if (models_.size() < 2) throw SchemaError("model family needs at least 2 models");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < models_.size(); ++i) {
    const auto& m = models_[i];
    if (m.model_id.empty()) throw SchemaError("model family: empty model_id");
    if (!seen.insert(m.model_id).second)
      throw SchemaError("model family: duplicate model_id " + m.model_id);
    if (!(m.param_count_billions > 0.0) || !std::isfinite(m.param_count_billions))
      throw SchemaError("model family: parameter count of " + m.model_id + " must be positive");
    if (i > 0 && !(models_[i - 1].param_count_billions < m.param_count_billions))
      throw SchemaError("model family: models must be strictly ascending by size (" +
                        models_[i - 1].model_id + " vs " + m.model_id + ")");
  }
}

std::optional<std::size_t> ModelFamily::index_of(const std::string& model_id) const {
  for (std::size_t i = 0; i < models_.size(); ++i)
    if (models_[i].model_id == model_id) return i;
  return std::nullopt;
}

std::vector<double> ModelFamily::param_counts() const {
  std::vector<double> out;
  out.reserve(models_.size());
  for (const auto& m : models_) out.push_back(m.param_count_billions);
  return out;
}

ModelFamily ModelFamily::qwen3() {
  return ModelFamily("qwen3", {{"Qwen3-0.6B", 0.6},
                               {"Qwen3-1.7B", 1.7},
                               {"Qwen3-4B", 4},
                               {"Qwen3-8B", 8},
                               {"Qwen3-14B", 14},
                               {"Qwen3-30B-A3B", 30},
                               {"Qwen3-32B", 32},
                               {"Qwen3-235B-A22B", 235}});
}

// ---------------------------------------------------------------------------
// Score tables

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_csv_line(std::string_view line, std::size_t row) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw ParseError("row " + std::to_string(row) + ": unterminated quoted field");
  fields.emplace_back(trim(cur));
  return fields;
}

}  // namespace

ScoreTable::ScoreTable(std::vector<std::string> benchmarks, std::vector<std::string> models,
                       std::vector<std::optional<double>> cells)
    : benchmarks_(std::move(benchmarks)), models_(std::move(models)), cells_(std::move(cells)) {
  if (benchmarks_.empty()) throw SchemaError("score table: no benchmarks");
  if (models_.empty()) throw SchemaError("score table: no models");
  if (cells_.size() != benchmarks_.size() * models_.size())
    throw SchemaError("score table: cell count does not match labels");
  std::set<std::string> seen;
  for (const auto& b : benchmarks_)
    if (!seen.insert(b).second) throw SchemaError("score table: duplicate benchmark " + b);
  seen.clear();
  for (const auto& m : models_)
    if (!seen.insert(m).second) throw SchemaError("score table: duplicate model " + m);
  for (const auto& c : cells_)
    if (c && !(*c >= 0.0 && *c <= 100.0))
      throw SchemaError("score table: score " + std::to_string(*c) + " outside [0,100]");
}

namespace {
bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}
}  // namespace

std::optional<std::size_t> ScoreTable::benchmark_index(std::string_view benchmark) const {
  for (std::size_t i = 0; i < benchmarks_.size(); ++i)
    if (benchmarks_[i] == benchmark) return i;
  // Benchmark labels are matched case-insensitively as a fallback ("mmlu" -> "MMLU").
  for (std::size_t i = 0; i < benchmarks_.size(); ++i)
    if (iequals(benchmarks_[i], benchmark)) return i;
  return std::nullopt;
}

std::optional<std::size_t> ScoreTable::model_index(std::string_view model) const {
  for (std::size_t i = 0; i < models_.size(); ++i)
    if (models_[i] == model) return i;
  return std::nullopt;
}

std::optional<double> ScoreTable::get(std::string_view benchmark, std::string_view model) const {
  const auto b = benchmark_index(benchmark);
  const auto m = model_index(model);
  if (!b || !m) return std::nullopt;
  return at(*b, *m);
}

std::vector<double> ScoreTable::family_row(std::string_view benchmark,
                                           const ModelFamily& family) const {
  const auto b = benchmark_index(benchmark);
  if (!b) throw DataError("score table has no benchmark " + std::string(benchmark));
  std::vector<double> row;
  row.reserve(family.size());
  for (const auto& spec : family.models()) {
    const auto m = model_index(spec.model_id);
    if (!m) throw DataError("score table has no column for family model " + spec.model_id);
    const auto cell = at(*b, *m);
    if (!cell)
      throw DataError("score missing for " + spec.model_id + " on " + benchmarks_[*b]);
    row.push_back(*cell);
  }
  return row;
}

ScoreTable parse_score_table(std::string_view csv_text) {
  std::vector<std::string> lines;
  {
    std::string text(csv_text);
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw SchemaError("score table: missing header row");

  const auto header = split_csv_line(lines[0], 1);
  if (header.size() < 2) throw SchemaError("score table: header must name at least one model");
  std::vector<std::string> models(header.begin() + 1, header.end());

  std::vector<std::string> benchmarks;
  std::vector<std::optional<double>> cells;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::size_t row = r + 1;
    if (trim(lines[r]).empty()) continue;
    const auto fields = split_csv_line(lines[r], row);
    if (fields.size() != header.size())
      throw ParseError("row " + std::to_string(row) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    if (fields[0].empty()) throw ParseError("row " + std::to_string(row) + ", col 1: empty benchmark");
    benchmarks.push_back(fields[0]);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      const std::string& f = fields[c];
      if (f == "-") {
        cells.emplace_back(std::nullopt);
        continue;
      }
      double value = 0.0;
      const auto* end = f.data() + f.size();
      const auto res = std::from_chars(f.data(), end, value);
      if (f.empty() || res.ec != std::errc() || res.ptr != end || !std::isfinite(value))
        throw ParseError("row " + std::to_string(row) + ", col " + std::to_string(c + 1) +
                         ": malformed number '" + f + "'");
      cells.emplace_back(value);
    }
  }
  if (benchmarks.empty()) throw SchemaError("score table: no benchmarks");
  return ScoreTable(std::move(benchmarks), std::move(models), std::move(cells));
}

namespace {
std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

ScoreTable load_score_table(const std::filesystem::path& path) {
  return parse_score_table(read_file(path));
}

// ---------------------------------------------------------------------------
// Outcome records

OutcomeRecord parse_outcome_line(std::string_view line, std::size_t line_number) {
  const std::string where = "line " + std::to_string(line_number) + ": ";
  json obj = json::parse(line, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) throw SchemaError(where + "not a JSON object");

  static const std::set<std::string> allowed = {"sample_id", "benchmark_id", "model_id",
                                                "outcome", "raw_response"};
  for (const auto& [key, _] : obj.items())
    if (!allowed.contains(key)) throw SchemaError(where + "unknown key '" + key + "'");

  OutcomeRecord rec;
  for (const char* key : {"sample_id", "benchmark_id", "model_id"}) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_string() || it->get_ref<const std::string&>().empty())
      throw SchemaError(where + "'" + key + "' must be a non-empty string");
  }
  rec.sample_id = obj["sample_id"].get<std::string>();
  rec.benchmark_id = obj["benchmark_id"].get<std::string>();
  rec.model_id = obj["model_id"].get<std::string>();

  const auto it = obj.find("outcome");
  if (it == obj.end() || !it->is_number_integer())
    throw SchemaError(where + "'outcome' must be an integer");
  try {
    rec.outcome = outcome_from_int(it->get<long long>());
  } catch (const SchemaError& e) {
    throw SchemaError(where + e.what());
  }

  if (const auto raw = obj.find("raw_response"); raw != obj.end() && !raw->is_null()) {
    if (!raw->is_string()) throw SchemaError(where + "'raw_response' must be a string");
    rec.raw_response = raw->get<std::string>();
  }
  return rec;
}

std::vector<OutcomeRecord> parse_outcome_records(std::istream& in) {
  std::vector<OutcomeRecord> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    out.push_back(parse_outcome_line(line, n));
  }
  return out;
}

std::vector<OutcomeRecord> load_outcome_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_outcome_records(in);
}

std::string format_outcome_line(const OutcomeRecord& r) {
  json obj = {{"sample_id", r.sample_id},
              {"benchmark_id", r.benchmark_id},
              {"model_id", r.model_id},
              {"outcome", to_int(r.outcome)}};
  if (r.raw_response) obj["raw_response"] = *r.raw_response;
  return obj.dump(-1, ' ', false, json::error_handler_t::replace);
}

void write_outcome_records(std::ostream& out, const std::vector<OutcomeRecord>& records) {
  for (const auto& r : records) out << format_outcome_line(r) << '\n';
}

void save_outcome_records(const std::filesystem::path& path,
                          const std::vector<OutcomeRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_outcome_records(out, records);
  if (!out) throw IoError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Response parsing

std::string normalize_single_quotes(std::string_view text) {
  enum class State { Plain, Double, Single };
  State state = State::Plain;
  std::string out;
  out.reserve(text.size() + 8);
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    switch (state) {
      case State::Plain:
        if (c == '\'') {
          out += '"';
          state = State::Single;
        } else {
          if (c == '"') state = State::Double;
          out += c;
        }
        break;
      case State::Double:
        out += c;
        if (c == '\\' && i + 1 < text.size()) {
          out += text[++i];
        } else if (c == '"') {
          state = State::Plain;
        }
        break;
      case State::Single:
        if (c == '\\' && i + 1 < text.size()) {
          const char next = text[++i];
          if (next == '\'') {
            out += '\'';
          } else {
            out += '\\';
            out += next;
          }
        } else if (c == '"') {
          out += "\\\"";
        } else if (c == '\'') {
          out += '"';
          state = State::Plain;
        } else {
          out += c;
        }
        break;
    }
  }
  return out;
}

namespace {

// End index (inclusive) of the balanced region opening at `open`, if any.
std::optional<std::size_t> balanced_end(std::string_view text, std::size_t open) {
  int depth = 0;
  char quote = 0;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (quote) {
      if (c == '\\') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
      continue;
    }
    if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i;
    }
  }
  return std::nullopt;
}

std::optional<json> first_object(std::string_view text) {
  const auto found = extract_first_json_object(text);
  if (!found) return std::nullopt;
  return json::parse(*found);
}

std::optional<std::string> string_field(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) return std::nullopt;
  return std::string(trim(it->get_ref<const std::string&>()));
}

}  // namespace

std::optional<std::string> extract_first_json_object(std::string_view text) {
  for (std::size_t open = text.find('{'); open != std::string_view::npos;
       open = text.find('{', open + 1)) {
    const auto close = balanced_end(text, open);
    if (!close) continue;
    std::string normalized = normalize_single_quotes(text.substr(open, *close - open + 1));
    const json parsed = json::parse(normalized, nullptr, false);
    if (!parsed.is_discarded() && parsed.is_object()) return normalized;
  }
  return std::nullopt;
}

ChoiceParse parse_choice_answer(std::string_view raw_response, char gold_letter) {
  if (!std::isalpha(static_cast<unsigned char>(gold_letter)) ||
      static_cast<unsigned char>(gold_letter) > 0x7f)
    throw ArgumentError(std::string("gold letter must be a Latin letter, got '") + gold_letter + "'");
  const char gold = static_cast<char>(std::toupper(static_cast<unsigned char>(gold_letter)));

  ChoiceParse result;
  const auto obj = first_object(raw_response);
  if (!obj) return result;
  const auto answer = string_field(*obj, "answer");
  if (!answer || answer->size() != 1 || !std::isalpha(static_cast<unsigned char>((*answer)[0])))
    return result;
  result.letter = static_cast<char>(std::toupper(static_cast<unsigned char>((*answer)[0])));
  result.outcome = *result.letter == gold ? Outcome::Correct : Outcome::Wrong;
  return result;
}

VerdictParse parse_judge_verdict(std::string_view raw_response) {
  VerdictParse result;
  const auto obj = first_object(raw_response);
  if (!obj) return result;
  const auto it = obj->find("result");
  if (it == obj->end()) return result;
  if (it->is_boolean()) {
    result.verdict = it->get<bool>();
  } else if (const auto text = string_field(*obj, "result")) {
    if (iequals(*text, "true")) result.verdict = true;
    else if (iequals(*text, "false")) result.verdict = false;
  }
  if (result.verdict) result.outcome = *result.verdict ? Outcome::Correct : Outcome::Wrong;
  return result;
}

// ---------------------------------------------------------------------------
// Matrix assembly

MatrixBuild build_outcome_matrix(const std::vector<OutcomeRecord>& records,
                                 const ModelFamily& family, const std::string& benchmark_id) {
  const std::size_t n = family.size();
  std::map<std::string, std::vector<std::optional<Outcome>>> partial;
  std::size_t foreign = 0;
  bool any_for_benchmark = false;

  for (const auto& rec : records) {
    if (rec.benchmark_id != benchmark_id) continue;
    any_for_benchmark = true;
    const auto idx = family.index_of(rec.model_id);
    if (!idx) {
      ++foreign;
      continue;
    }
    auto& slots = partial.try_emplace(rec.sample_id, n).first->second;
    auto& slot = slots[*idx];
    if (slot && *slot != rec.outcome)
      throw DataError("conflicting outcomes for sample " + rec.sample_id + " on model " +
                      rec.model_id);
    slot = rec.outcome;
  }
  if (!any_for_benchmark) throw DataError("no records for benchmark " + benchmark_id);

  MatrixBuild build{OutcomeMatrix{family, benchmark_id, {}}, {}, foreign};
  for (auto& [sid, slots] : partial) {
    std::vector<std::string> missing;
    for (std::size_t i = 0; i < n; ++i)
      if (!slots[i]) missing.push_back(family.model_id(i));
    if (!missing.empty()) {
      build.rejected.push_back({sid, std::move(missing)});
      continue;
    }
    std::vector<Outcome> vec;
    vec.reserve(n);
    for (const auto& s : slots) vec.push_back(*s);
    build.matrix.entries.emplace(sid, std::move(vec));
  }
  if (build.matrix.entries.empty())
    throw DataError("outcome matrix for " + benchmark_id + " is empty: no sample covers all " +
                    std::to_string(n) + " models");
  return build;
}

std::vector<OutcomeRecord> matrix_to_records(const OutcomeMatrix& matrix) {
  std::vector<OutcomeRecord> out;
  out.reserve(matrix.entries.size() * matrix.family.size());
  for (const auto& [sid, vec] : matrix.entries)
    for (std::size_t i = 0; i < vec.size(); ++i)
      out.push_back({sid, matrix.benchmark_id, matrix.family.model_id(i), vec[i], std::nullopt});
  return out;
}

}  // namespace stem
