#pragma once

#include <map>
#include <string>
#include <vector>

#include "stem/error.hpp"
#include "stem/ingestion.hpp"

namespace stem {

/// The endpoint answered 2xx but the body is not a chat completion.
class ResponseError : public TransportError {
 public:
  ResponseError(const std::string& what, std::string body)
      : TransportError(what), body_(std::move(body)) {}
  const std::string& body() const noexcept { return body_; }

 private:
  std::string body_;
};

/// OpenAI-compatible chat-completions endpoint.
struct EndpointConfig {
  std::string base_url;  // e.g. http://127.0.0.1:8000/v1
  std::string api_key_env = "OPENAI_API_KEY";
  std::string model_name;
  double temperature = 0.0;
  double timeout_s = 60.0;
  unsigned max_retries = 3;
  unsigned max_concurrency = 4;
  /// Backoff before retry r (0-based) is base * 2^r * jitter, jitter in [0.5, 1.5).
  double backoff_base_s = 1.0;

  void validate() const;
};

enum class TemplateKind { MultipleChoice, MathJudge };

const char* to_string(TemplateKind kind) noexcept;
TemplateKind template_kind_from_string(const std::string& text);

/// Placeholders are written {name}; any other braces are literal text.
class PromptTemplate {
 public:
  /// Throws SchemaError unless every placeholder of `kind` occurs exactly once.
  PromptTemplate(TemplateKind kind, std::string text);

  static PromptTemplate multiple_choice();
  static PromptTemplate math_judge();

  TemplateKind kind() const noexcept { return kind_; }
  const std::string& text() const noexcept { return text_; }
  static const std::vector<std::string>& placeholders(TemplateKind kind);

 private:
  TemplateKind kind_;
  std::string text_;
};

/// Substitutes field values verbatim; substituted text is not rescanned.
std::string render_prompt(const PromptTemplate& tmpl, const std::map<std::string, std::string>& fields);

/// Sends one user message and returns choices[0].message.content.
/// Retries transport failures and 5xx responses up to max_retries times.
std::string infer_sample(const EndpointConfig& config, const std::string& prompt);

struct BatchSample {
  std::string sample_id;
  std::string benchmark_id;
  std::map<std::string, std::string> fields;
};

/// One record per input sample, in input order, with at most
/// max_concurrency requests in flight. Per-sample failures become outcome
/// -1. `gold` maps sample_id to the correct letter (multiple choice only).
std::vector<OutcomeRecord> run_batch(const EndpointConfig& config,
                                     const std::vector<BatchSample>& samples,
                                     const PromptTemplate& tmpl,
                                     const std::map<std::string, std::string>& gold);

Outcome judge_solution(const EndpointConfig& config, const std::string& ques,
                       const std::string& stu_solution, const std::string& std_solution,
                       const std::string& answer);

}  // namespace stem
