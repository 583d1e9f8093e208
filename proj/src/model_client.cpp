#include "stem/model_client.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "stem/rng.hpp"

namespace stem {

using nlohmann::json;

void EndpointConfig::validate() const {
  if (base_url.empty()) throw ConfigError("endpoint base_url is empty");
  if (model_name.empty()) throw ConfigError("endpoint model_name is empty");
  if (!(temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
  if (!(timeout_s > 0.0)) throw ConfigError("timeout_s must be positive");
  if (max_concurrency < 1) throw ConfigError("max_concurrency must be >= 1");
  if (!(backoff_base_s >= 0.0)) throw ConfigError("backoff_base_s must be >= 0");
}

const char* to_string(TemplateKind kind) noexcept {
  return kind == TemplateKind::MultipleChoice ? "multiple_choice" : "math_judge";
}

TemplateKind template_kind_from_string(const std::string& text) {
  if (text == "multiple_choice") return TemplateKind::MultipleChoice;
  if (text == "math_judge") return TemplateKind::MathJudge;
  throw ArgumentError("unknown template kind '" + text + "'");
}

const std::vector<std::string>& PromptTemplate::placeholders(TemplateKind kind) {
  static const std::vector<std::string> choice = {"ques_desc", "options_text"};
  static const std::vector<std::string> judge = {"ques_desc", "stu_solution", "std_solution",
                                                 "answer"};
  return kind == TemplateKind::MultipleChoice ? choice : judge;
}

namespace {
std::size_t occurrences(const std::string& text, const std::string& needle) {
  std::size_t count = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1))
    ++count;
  return count;
}
}  // namespace

PromptTemplate::PromptTemplate(TemplateKind kind, std::string text)
    : kind_(kind), text_(std::move(text)) {
  for (const auto& name : placeholders(kind_)) {
    const auto count = occurrences(text_, "{" + name + "}");
    if (count != 1)
      throw SchemaError("template placeholder {" + name + "} must appear exactly once, found " +
                        std::to_string(count));
  }
}

PromptTemplate PromptTemplate::multiple_choice() {
  return PromptTemplate(
      TemplateKind::MultipleChoice,
      "There is a multiple-choice question with several options, and only one of the options is "
      "the correct answer. Please select the single correct option. The question is as follows. "
      "question: {ques_desc}; options: {options_text}. Please list the letter of your choice "
      "(e.g. A) in JSON format and output it with key 'answer' as the value. Do not explain your "
      "reasoning. Output JSON format: {'answer': ''}");
}

PromptTemplate PromptTemplate::math_judge() {
  return PromptTemplate(
      TemplateKind::MathJudge,
      "Here is a math problem with a standard answer and a student's solution. Please help me "
      "determine if the student's solution is correct.\n"
      "question: {ques_desc}; student solution: {stu_solution}; standard solution: "
      "{std_solution}; answer: {answer}. If the student's answer is correct, just output True; "
      "otherwise, just output False. No explanation is required. Please list your correct result "
      "(e.g. True or False) in JSON format and output it with key \"result\" as the value.\n"
      "Output JSON format: {'result': ''}");
}

std::string render_prompt(const PromptTemplate& tmpl,
                          const std::map<std::string, std::string>& fields) {
  const auto& names = PromptTemplate::placeholders(tmpl.kind());
  for (const auto& name : names)
    if (!fields.contains(name)) throw ArgumentError("missing prompt field " + name);

  const std::string& text = tmpl.text();
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t best = std::string::npos;
    const std::string* which = nullptr;
    for (const auto& name : names) {
      const auto at = text.find("{" + name + "}", pos);
      if (at < best) {
        best = at;
        which = &name;
      }
    }
    if (!which) {
      out.append(text, pos, std::string::npos);
      break;
    }
    out.append(text, pos, best - pos);
    out += fields.at(*which);
    pos = best + which->size() + 2;
  }
  return out;
}

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // prefix without trailing slash
};

ParsedUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("base_url must include a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl out;
  out.origin = url.substr(0, path_start);
  out.path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  return out;
}

std::string api_key(const EndpointConfig& config) {
  const char* value = std::getenv(config.api_key_env.c_str());
  if (!value || !*value)
    throw ConfigError("API key environment variable " + config.api_key_env + " is not set");
  return value;
}

std::string extract_content(const std::string& body) {
  const json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw ResponseError("response is not JSON", body);
  const auto choices = doc.find("choices");
  if (choices == doc.end() || !choices->is_array() || choices->empty())
    throw ResponseError("response has no choices", body);
  const auto& first = (*choices)[0];
  if (!first.is_object() || !first.contains("message") || !first["message"].is_object() ||
      !first["message"].contains("content") || !first["message"]["content"].is_string())
    throw ResponseError("response choice has no message content", body);
  return first["message"]["content"].get<std::string>();
}

std::string post_once(const EndpointConfig& config, const ParsedUrl& url, const std::string& key,
                      const std::string& payload, bool& retryable) {
  httplib::Client client(url.origin);
  const auto secs = static_cast<time_t>(config.timeout_s);
  const auto usecs = static_cast<time_t>((config.timeout_s - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  client.set_bearer_token_auth(key);

  auto res = client.Post(url.path + "/chat/completions", payload, "application/json");
  if (!res) {
    retryable = true;
    throw TransportError("request to " + url.origin + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status >= 500) {
    retryable = true;
    throw TransportError("endpoint returned HTTP " + std::to_string(res->status));
  }
  retryable = false;
  if (res->status >= 400)
    throw RequestError(res->status, "endpoint rejected request with HTTP " +
                                        std::to_string(res->status) + ": " + res->body);
  if (res->status < 200 || res->status >= 300)
    throw TransportError("unexpected HTTP status " + std::to_string(res->status));
  return extract_content(res->body);
}

}  // namespace

std::string infer_sample(const EndpointConfig& config, const std::string& prompt) {
  config.validate();
  const std::string key = api_key(config);
  const ParsedUrl url = split_url(config.base_url);

  const json body = {{"model", config.model_name},
                     {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
                     {"temperature", config.temperature}};
  const std::string payload = body.dump();

  Rng jitter(fnv1a64(prompt));
  for (unsigned attempt = 0;; ++attempt) {
    bool retryable = false;
    try {
      return post_once(config, url, key, payload, retryable);
    } catch (const TransportError&) {
      if (!retryable || attempt >= config.max_retries) throw;
    }
    const double delay =
        config.backoff_base_s * std::ldexp(1.0, static_cast<int>(attempt)) * (0.5 + jitter.uniform());
    std::this_thread::sleep_for(std::chrono::duration<double>(delay));
  }
}

std::vector<OutcomeRecord> run_batch(const EndpointConfig& config,
                                     const std::vector<BatchSample>& samples,
                                     const PromptTemplate& tmpl,
                                     const std::map<std::string, std::string>& gold) {
  config.validate();
  api_key(config);
  std::vector<char> gold_letters(samples.size(), 0);
  if (tmpl.kind() == TemplateKind::MultipleChoice) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto it = gold.find(samples[i].sample_id);
      if (it == gold.end() || it->second.size() != 1)
        throw ArgumentError("no single-letter gold answer for sample " + samples[i].sample_id);
      gold_letters[i] = it->second[0];
    }
  }

  std::vector<OutcomeRecord> records(samples.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < samples.size(); i = next++) {
      const auto& sample = samples[i];
      OutcomeRecord& rec = records[i];
      rec.sample_id = sample.sample_id;
      rec.benchmark_id = sample.benchmark_id;
      rec.model_id = config.model_name;
      rec.outcome = Outcome::Error;
      try {
        const std::string prompt = render_prompt(tmpl, sample.fields);
        const std::string reply = infer_sample(config, prompt);
        rec.raw_response = reply;
        rec.outcome = tmpl.kind() == TemplateKind::MultipleChoice
                          ? parse_choice_answer(reply, gold_letters[i]).outcome
                          : parse_judge_verdict(reply).outcome;
      } catch (const ResponseError& e) {
        rec.raw_response = e.body();
      } catch (const std::exception&) {
        // Transport, HTTP and field errors all encode as -1.
      }
    }
  };

  const std::size_t workers = std::min<std::size_t>(config.max_concurrency, samples.size());
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  return records;
}

Outcome judge_solution(const EndpointConfig& config, const std::string& ques,
                       const std::string& stu_solution, const std::string& std_solution,
                       const std::string& answer) {
  for (const auto* field : {&ques, &stu_solution, &std_solution, &answer})
    if (field->empty()) throw ArgumentError("judge_solution: all fields must be non-empty");
  const std::string prompt = render_prompt(PromptTemplate::math_judge(),
                                           {{"ques_desc", ques},
                                            {"stu_solution", stu_solution},
                                            {"std_solution", std_solution},
                                            {"answer", answer}});
  return parse_judge_verdict(infer_sample(config, prompt)).outcome;
}

}  // namespace stem
