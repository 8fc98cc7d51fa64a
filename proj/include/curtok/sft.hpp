#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "curtok/corpus.hpp"
#include "curtok/quality.hpp"

namespace curtok {

struct InstructionPair {
    std::string id;
    std::string prompt;
    std::string completion;
    std::string source;
};

struct JudgeScores {
    int code = 0;     // 0..5
    int math = 0;     // 0..5
    int toxic = 0;    // 0..5
    int quality = 5;  // 1..5
    // Either the single sentinel "hi_or_eng" or a list of language codes.
    std::vector<std::string> language;

    bool operator==(const JudgeScores&) const = default;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RetentionPolicy {
    int max_code = 0;
    int max_math = 0;
    int max_toxic = 0;
    int min_quality = 5;
    std::string required_language = "hi_or_eng";
};

// KEEP iff both prompt and completion identify as Hindi or English above
// the confidence threshold.
StageDecision language_rule_filter(const InstructionPair& pair,
                                   const std::vector<LangProfile>& profiles,
                                   double threshold = kDefaultLangidThreshold);

// The judging template with {prompt} and {completion} filled in. Braces in
// the pair's own text pass through untouched.
std::string build_judge_prompt(const InstructionPair& pair);
const std::string& judge_prompt_template();

// Canonical one-line form: '"code": 0, "math": 0, ..., "language": ...'.
std::string serialize_judge_scores(const JudgeScores& scores);

// Accepts one non-empty line of key-value pairs; keys may be bare or
// double-quoted and order is free, except that language's value runs to
// the end of the line, so a language list must come last.
JudgeScores parse_judge_response(const std::string& text);

StageDecision retention_decision(const JudgeScores& scores, const RetentionPolicy& policy);

// Text in, text out. Implementations may throw on transport failure.
class JudgeClient {
public:
    virtual ~JudgeClient() = default;
    virtual std::string complete(const std::string& prompt) = 0;
};

// Deterministic offline judge: answers with a scripted response per call,
// or via a response function.
class StubJudgeClient : public JudgeClient {
public:
    explicit StubJudgeClient(std::vector<std::string> responses);
    explicit StubJudgeClient(std::function<std::string(const std::string&)> fn);
    std::string complete(const std::string& prompt) override;

private:
    std::vector<std::string> responses_;
    size_t next_ = 0;
    std::function<std::string(const std::string&)> fn_;
};

struct JudgeEndpointConfig {
    std::string url;                              // e.g. http://host:port/path
    std::string auth_token_env = "JUDGE_AUTH_TOKEN";
    int timeout_seconds = 30;
};

// POSTs the prompt as a plain-text body; the response body is the
// completion. The auth token, when the environment variable is set, goes
// out as a bearer Authorization header.
class HttpJudgeClient : public JudgeClient {
public:
    explicit HttpJudgeClient(JudgeEndpointConfig cfg);
    std::string complete(const std::string& prompt) override;

private:
    JudgeEndpointConfig cfg_;
};

struct JudgedPair {
    InstructionPair pair;
    std::optional<JudgeScores> scores;
    StageDecision decision;
};

struct JudgeRunConfig {
    RetentionPolicy policy;
    int retries = 2;      // attempts after the first
    int backoff_ms = 100;  // base delay, doubles per retry
};

// Build -> send -> parse -> decide for every pair; responses that stay
// unusable after the retries become DROP(unscorable). Every attempt is
// logged to the audit stream as one JSON line.
std::vector<JudgedPair> judge_pairs(JudgeClient& client, const std::vector<InstructionPair>& pairs,
                                    const JudgeRunConfig& cfg, std::ostream* audit = nullptr);

// Instruction pairs ride the corpus format: text = prompt, meta:
// completion/source.
InstructionPair pair_from_document(const Document& doc);
Document pair_to_document(const InstructionPair& pair);

}  // namespace curtok
