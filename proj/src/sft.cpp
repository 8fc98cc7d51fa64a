#include "curtok/sft.hpp"

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <thread>

#include <nlohmann/json.hpp>

#define CPPHTTPLIB_NO_EXCEPTIONS
#include <httplib.h>

namespace curtok {

using json = nlohmann::json;

namespace {

// Plain-text rendering of the judging rubric; {prompt} and {completion}
// are the only substitution points.
const std::string kJudgeTemplate =
    "You are an evaluation assistant. Given the following inputs, output five ratings as "
    "key-value pairs (comma separated):\n"
    "\n"
    "- code: rate 0–5 for how much of the ANSWER is code\n"
    "  (0 = none, 1 = minimal, 5 = almost entirely code)\n"
    "\n"
    "- math: rate 0–5 for how much the ANSWER involves math\n"
    "  (0 = none, 1 = minimal, 5 = heavily math-focused)\n"
    "\n"
    "- toxic: rate 0–5 for toxicity in the ANSWER\n"
    "  (0 = no toxicity, 1 = minimal, 5 = highly toxic/offensive)\n"
    "\n"
    "- quality: rate 1–5 for how well the ANSWER follows instructions and addresses the "
    "QUESTION\n"
    "  (1 = irrelevant/incomplete, 5 = fully aligned and high-quality)\n"
    "\n"
    "- language: list all languages detected in QUESTION and ANSWER\n"
    "  (hi_or_eng if only Hindi or English; otherwise comma-separated language codes)\n"
    "\n"
    "Inputs:\n"
    "QUESTION: {prompt}\n"
    "ANSWER: {completion}\n"
    "\n"
    "Instructions:\n"
    "Provide your response as a single line of comma-separated key-value pairs, strictly in "
    "the following format and do not include any introductory text, labels, or additional "
    "commentary:\n"
    "\n"
    "\"code\": <1–5>, \"math\": <1–5>, \"toxic\": <1–5>, \"quality\": <1–5>, "
    "\"language\": <hi_or_eng or comma-separated list>\n";

std::string_view trim(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string_view strip_quotes(std::string_view s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

int parse_score(std::string_view key, std::string_view value, int lo, int hi) {
    value = strip_quotes(trim(value));
    int out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size())
        throw ParseError("value for '" + std::string(key) + "' is not an integer: '" +
                         std::string(value) + "'");
    if (out < lo || out > hi)
        throw ParseError("'" + std::string(key) + "' is out of range [" + std::to_string(lo) +
                         ", " + std::to_string(hi) + "]: " + std::to_string(out));
    return out;
}

}  // namespace

const std::string& judge_prompt_template() { return kJudgeTemplate; }

std::string build_judge_prompt(const InstructionPair& pair) {
    // Positions are fixed by the template, so user braces never re-scan.
    static const size_t prompt_pos = kJudgeTemplate.find("{prompt}");
    static const size_t completion_pos = kJudgeTemplate.find("{completion}");

    std::string out;
    out.reserve(kJudgeTemplate.size() + pair.prompt.size() + pair.completion.size());
    out.append(kJudgeTemplate, 0, prompt_pos);
    out.append(pair.prompt);
    size_t after_prompt = prompt_pos + 8;  // strlen("{prompt}")
    out.append(kJudgeTemplate, after_prompt, completion_pos - after_prompt);
    out.append(pair.completion);
    out.append(kJudgeTemplate, completion_pos + 12, std::string::npos);  // strlen("{completion}")
    return out;
}

std::string serialize_judge_scores(const JudgeScores& scores) {
    std::string lang;
    for (size_t i = 0; i < scores.language.size(); ++i) {
        if (i) lang += ", ";
        lang += scores.language[i];
    }
    return "\"code\": " + std::to_string(scores.code) + ", \"math\": " +
           std::to_string(scores.math) + ", \"toxic\": " + std::to_string(scores.toxic) +
           ", \"quality\": " + std::to_string(scores.quality) + ", \"language\": " + lang;
}

JudgeScores parse_judge_response(const std::string& text) {
    std::string_view line;
    {
        size_t pos = 0;
        bool found = false;
        std::string_view all = text;
        while (pos <= all.size()) {
            size_t nl = all.find('\n', pos);
            std::string_view candidate =
                trim(nl == std::string_view::npos ? all.substr(pos) : all.substr(pos, nl - pos));
            if (!candidate.empty()) {
                if (found) throw ParseError("response has more than one line of content");
                line = candidate;
                found = true;
            }
            if (nl == std::string_view::npos) break;
            pos = nl + 1;
        }
        if (!found) throw ParseError("response is empty");
    }

    JudgeScores scores;
    bool seen[5] = {};
    constexpr std::string_view names[5] = {"code", "math", "toxic", "quality", "language"};

    size_t pos = 0;
    while (pos <= line.size()) {
        size_t comma = line.find(',', pos);
        std::string_view segment =
            comma == std::string_view::npos ? line.substr(pos) : line.substr(pos, comma - pos);
        size_t colon = segment.find(':');
        if (colon == std::string_view::npos)
            throw ParseError("expected 'key: value', got '" + std::string(trim(segment)) + "'");
        std::string_view key = strip_quotes(trim(segment.substr(0, colon)));
        std::string_view value = segment.substr(colon + 1);

        int key_idx = -1;
        for (int i = 0; i < 5; ++i)
            if (key == names[i]) key_idx = i;
        if (key_idx < 0) throw ParseError("unexpected key '" + std::string(key) + "'");
        if (seen[key_idx]) throw ParseError("duplicate key '" + std::string(key) + "'");
        seen[key_idx] = true;

        switch (key_idx) {
            case 0: scores.code = parse_score(key, value, 0, 5); break;
            case 1: scores.math = parse_score(key, value, 0, 5); break;
            case 2: scores.toxic = parse_score(key, value, 0, 5); break;
            case 3: scores.quality = parse_score(key, value, 1, 5); break;
            case 4: {
                // The list form owns the rest of the line.
                std::string_view rest = comma == std::string_view::npos
                                            ? value
                                            : line.substr(line.find(':', pos) + 1);
                size_t p = 0;
                while (p <= rest.size()) {
                    size_t c = rest.find(',', p);
                    std::string_view tok = strip_quotes(
                        trim(c == std::string_view::npos ? rest.substr(p) : rest.substr(p, c - p)));
                    if (!tok.empty()) scores.language.emplace_back(tok);
                    if (c == std::string_view::npos) break;
                    p = c + 1;
                }
                if (scores.language.empty()) throw ParseError("'language' is empty");
                comma = std::string_view::npos;  // consumed the remainder
                break;
            }
        }
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }

    for (int i = 0; i < 5; ++i)
        if (!seen[i]) throw ParseError("missing key '" + std::string(names[i]) + "'");
    return scores;
}

StageDecision retention_decision(const JudgeScores& scores, const RetentionPolicy& policy) {
    auto drop = [](std::string reason) {
        return StageDecision{"retention", Verdict::DROP, std::move(reason), std::nullopt};
    };
    if (scores.quality < policy.min_quality)
        return drop("quality=" + std::to_string(scores.quality) + " < " +
                    std::to_string(policy.min_quality));
    if (scores.code > policy.max_code)
        return drop("code=" + std::to_string(scores.code) + " > " +
                    std::to_string(policy.max_code));
    if (scores.math > policy.max_math)
        return drop("math=" + std::to_string(scores.math) + " > " +
                    std::to_string(policy.max_math));
    if (scores.toxic > policy.max_toxic)
        return drop("toxic=" + std::to_string(scores.toxic) + " > " +
                    std::to_string(policy.max_toxic));
    if (scores.language.size() != 1 || scores.language[0] != policy.required_language) {
        std::string got;
        for (size_t i = 0; i < scores.language.size(); ++i) {
            if (i) got += ",";
            got += scores.language[i];
        }
        return drop("language=" + got + " != " + policy.required_language);
    }
    return {"retention", Verdict::KEEP, "pass", std::nullopt};
}

StageDecision language_rule_filter(const InstructionPair& pair,
                                   const std::vector<LangProfile>& profiles, double threshold) {
    auto allowed = [](const std::string& lang) { return lang == "hin" || lang == "eng"; };
    auto [prompt_lang, pc] = identify_language(profiles, pair.prompt, threshold);
    auto [completion_lang, cc] = identify_language(profiles, pair.completion, threshold);
    std::string reason = "prompt=" + prompt_lang + " completion=" + completion_lang;
    bool keep = allowed(prompt_lang) && allowed(completion_lang);
    return {"language_rule", keep ? Verdict::KEEP : Verdict::DROP, reason,
            std::min(pc, cc)};
}

StubJudgeClient::StubJudgeClient(std::vector<std::string> responses)
    : responses_(std::move(responses)) {}

StubJudgeClient::StubJudgeClient(std::function<std::string(const std::string&)> fn)
    : fn_(std::move(fn)) {}

std::string StubJudgeClient::complete(const std::string& prompt) {
    if (fn_) return fn_(prompt);
    if (next_ >= responses_.size())
        throw std::runtime_error("scripted judge ran out of responses");
    return responses_[next_++];
}

HttpJudgeClient::HttpJudgeClient(JudgeEndpointConfig cfg) : cfg_(std::move(cfg)) {}

std::string HttpJudgeClient::complete(const std::string& prompt) {
    size_t scheme = cfg_.url.find("://");
    if (scheme == std::string::npos)
        throw std::runtime_error("judge url must include a scheme: " + cfg_.url);
    size_t path_pos = cfg_.url.find('/', scheme + 3);
    std::string base = path_pos == std::string::npos ? cfg_.url : cfg_.url.substr(0, path_pos);
    std::string path = path_pos == std::string::npos ? "/" : cfg_.url.substr(path_pos);

    httplib::Client client(base);
    client.set_connection_timeout(cfg_.timeout_seconds);
    client.set_read_timeout(cfg_.timeout_seconds);
    httplib::Headers headers;
    if (const char* token = std::getenv(cfg_.auth_token_env.c_str()); token && *token)
        headers.emplace("Authorization", std::string("Bearer ") + token);

    auto res = client.Post(path, headers, prompt, "text/plain");
    if (!res)
        throw std::runtime_error("judge endpoint unreachable: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw std::runtime_error("judge endpoint returned status " + std::to_string(res->status));
    return res->body;
}

std::vector<JudgedPair> judge_pairs(JudgeClient& client, const std::vector<InstructionPair>& pairs,
                                    const JudgeRunConfig& cfg, std::ostream* audit) {
    std::vector<JudgedPair> out;
    out.reserve(pairs.size());
    for (const InstructionPair& pair : pairs) {
        std::string prompt = build_judge_prompt(pair);
        JudgedPair judged;
        judged.pair = pair;

        json attempts = json::array();
        for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
            if (attempt > 0 && cfg.backoff_ms > 0)
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(cfg.backoff_ms << (attempt - 1)));
            json record;
            record["attempt"] = attempt;
            std::string raw;
            try {
                raw = client.complete(prompt);
            } catch (const std::exception& e) {
                record["transport_error"] = e.what();
                attempts.push_back(std::move(record));
                continue;
            }
            record["raw"] = raw;
            try {
                judged.scores = parse_judge_response(raw);
            } catch (const ParseError& e) {
                record["parse_error"] = e.what();
                attempts.push_back(std::move(record));
                continue;
            }
            attempts.push_back(std::move(record));
            break;
        }

        if (judged.scores)
            judged.decision = retention_decision(*judged.scores, cfg.policy);
        else
            judged.decision = {"judge", Verdict::DROP, "unscorable", std::nullopt};

        if (audit) {
            json line;
            line["id"] = pair.id;
            line["attempts"] = std::move(attempts);
            if (judged.scores) {
                line["scores"] = {{"code", judged.scores->code},
                                  {"math", judged.scores->math},
                                  {"toxic", judged.scores->toxic},
                                  {"quality", judged.scores->quality},
                                  {"language", judged.scores->language}};
            } else {
                line["scores"] = nullptr;
            }
            line["verdict"] = to_string(judged.decision.verdict);
            line["reason"] = judged.decision.reason;
            (*audit) << line.dump() << "\n";
        }
        out.push_back(std::move(judged));
    }
    return out;
}

InstructionPair pair_from_document(const Document& doc) {
    InstructionPair pair;
    pair.id = doc.id;
    pair.prompt = doc.text;
    if (auto it = doc.meta.find("completion"); it != doc.meta.end()) pair.completion = it->second;
    if (auto it = doc.meta.find("source"); it != doc.meta.end()) pair.source = it->second;
    return pair;
}

Document pair_to_document(const InstructionPair& pair) {
    Document doc;
    doc.id = pair.id;
    doc.text = pair.prompt;
    doc.meta["completion"] = pair.completion;
    if (!pair.source.empty()) doc.meta["source"] = pair.source;
    return doc;
}

}  // namespace curtok
