#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "curtok/quality.hpp"
#include "curtok/sft.hpp"
#include "util.hpp"

using namespace curtok;

namespace {

InstructionPair make_pair(std::string prompt, std::string completion) {
    InstructionPair p;
    p.id = "p0";
    p.prompt = std::move(prompt);
    p.completion = std::move(completion);
    p.source = "test";
    return p;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("judge prompt matches the golden rendering byte for byte") {
    std::string golden = slurp("tests/data/judge_prompt_golden.txt");
    CHECK(build_judge_prompt(make_pair("Q", "A")) == golden);
}

TEST_CASE("braces in pair text pass through unexpanded") {
    std::string out = build_judge_prompt(make_pair("{completion}", "X {prompt} Y"));
    CHECK(out.find("QUESTION: {completion}\n") != std::string::npos);
    CHECK(out.find("ANSWER: X {prompt} Y\n") != std::string::npos);
}

TEST_CASE("score serialization round-trips") {
    JudgeScores s;
    s.code = 3;
    s.math = 0;
    s.toxic = 5;
    s.quality = 2;
    s.language = {"hi_or_eng"};
    CHECK(parse_judge_response(serialize_judge_scores(s)) == s);

    s.language = {"hin", "tam", "eng"};
    CHECK(parse_judge_response(serialize_judge_scores(s)) == s);
}

TEST_CASE("the appendix pass line parses and the default policy keeps it") {
    JudgeScores s = parse_judge_response(
        R"("code": 0, "math": 0, "toxic": 0, "quality": 5, "language": hi_or_eng)");
    CHECK(s.code == 0);
    CHECK(s.math == 0);
    CHECK(s.toxic == 0);
    CHECK(s.quality == 5);
    CHECK(s.language == std::vector<std::string>{"hi_or_eng"});
    CHECK(retention_decision(s, RetentionPolicy{}).verdict == Verdict::KEEP);
}

TEST_CASE("parsing tolerates order, bare keys and padding") {
    JudgeScores s = parse_judge_response(
        "\n\n  quality: 4 ,math: 1,  code: 2, toxic: 0, language: eng\n\n");
    CHECK(s.quality == 4);
    CHECK(s.math == 1);
    CHECK(s.code == 2);
    CHECK(s.language == std::vector<std::string>{"eng"});
}

TEST_CASE("parse errors name the violation") {
    auto parses_to_error = [](const std::string& text) {
        try {
            parse_judge_response(text);
            return std::string();
        } catch (const ParseError& e) {
            return std::string(e.what());
        }
    };
    CHECK(parses_to_error("") != "");
    CHECK(parses_to_error("line one\nline two: has stuff") != "");
    CHECK(parses_to_error(R"("code": 7, "math": 0, "toxic": 0, "quality": 5, "language": eng)") !=
          "");
    CHECK(parses_to_error(R"("code": 0, "math": 0, "toxic": 0, "quality": 0, "language": eng)") !=
          "");
    CHECK(parses_to_error(R"("code": 0, "math": 0, "toxic": 0, "language": eng)") != "");
    CHECK(parses_to_error(R"("code": 0, "math": 0, "toxic": 0, "quality": 5)") != "");
    CHECK(parses_to_error(R"("sauce": 1, "code": 0, "math": 0, "toxic": 0, "quality": 5)") != "");
    CHECK(parses_to_error("I think the quality is great!") != "");
    CHECK(parses_to_error(R"("code": x, "math": 0, "toxic": 0, "quality": 5, "language": eng)") !=
          "");
}

TEST_CASE("retention policy thresholds") {
    JudgeScores s;
    s.language = {"hi_or_eng"};
    RetentionPolicy policy;

    s.quality = 4;
    CHECK(retention_decision(s, policy).verdict == Verdict::DROP);
    s.quality = 5;
    s.code = 1;
    CHECK(retention_decision(s, policy).verdict == Verdict::DROP);
    s.code = 0;
    s.toxic = 1;
    CHECK(retention_decision(s, policy).verdict == Verdict::DROP);
    s.toxic = 0;
    s.language = {"hin"};
    CHECK(retention_decision(s, policy).verdict == Verdict::DROP);
    s.language = {"hi_or_eng"};
    CHECK(retention_decision(s, policy).verdict == Verdict::KEEP);

    RetentionPolicy loose;
    loose.min_quality = 3;
    loose.max_code = 5;
    loose.max_math = 5;
    loose.max_toxic = 2;
    loose.required_language = "hin";
    JudgeScores s2;
    s2.code = 4;
    s2.math = 2;
    s2.toxic = 2;
    s2.quality = 3;
    s2.language = {"hin"};
    CHECK(retention_decision(s2, loose).verdict == Verdict::KEEP);
}

TEST_CASE("judge run retries parse failures then gives up") {
    std::vector<InstructionPair> pairs = {make_pair("q1", "a1"), make_pair("q2", "a2")};
    pairs[1].id = "p1";
    std::vector<std::string> responses = {
        "garbage that does not parse",
        R"("code": 0, "math": 0, "toxic": 0, "quality": 5, "language": hi_or_eng)",
        "still garbage",
        "more garbage",
        "even more garbage",
    };
    StubJudgeClient client(responses);
    JudgeRunConfig cfg;
    cfg.retries = 2;
    cfg.backoff_ms = 0;
    std::ostringstream audit;
    std::vector<JudgedPair> judged = judge_pairs(client, pairs, cfg, &audit);

    REQUIRE(judged.size() == 2);
    // first pair: attempt 0 fails, attempt 1 parses
    REQUIRE(judged[0].scores.has_value());
    CHECK(judged[0].decision.verdict == Verdict::KEEP);
    // second pair: three garbage responses exhaust the retries
    CHECK_FALSE(judged[1].scores.has_value());
    CHECK(judged[1].decision.verdict == Verdict::DROP);
    CHECK(judged[1].decision.reason == "unscorable");

    std::vector<std::string> lines;
    std::string line;
    std::istringstream in(audit.str());
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(lines.size() == 2);
    auto first = nlohmann::json::parse(lines[0]);
    CHECK(first.at("id") == "p0");
    CHECK(first.at("attempts").size() == 2);
    auto second = nlohmann::json::parse(lines[1]);
    CHECK(second.at("attempts").size() == 3);
    CHECK(second.at("scores").is_null());
}

TEST_CASE("judge run surfaces transport failures as unscorable") {
    class FailingClient : public JudgeClient {
    public:
        std::string complete(const std::string&) override {
            throw std::runtime_error("connection refused");
        }
    };
    FailingClient client;
    JudgeRunConfig cfg;
    cfg.retries = 1;
    cfg.backoff_ms = 0;
    std::ostringstream audit;
    std::vector<JudgedPair> judged = judge_pairs(client, {make_pair("q", "a")}, cfg, &audit);
    REQUIRE(judged.size() == 1);
    CHECK(judged[0].decision.verdict == Verdict::DROP);
    auto line = nlohmann::json::parse(audit.str());
    CHECK(line.at("attempts").size() == 2);
    CHECK(line.at("attempts")[0].contains("transport_error"));
}

TEST_CASE("stub client can answer from a function") {
    StubJudgeClient client([](const std::string& prompt) {
        return prompt.find("ANSWER: good") != std::string::npos
                   ? R"("code": 0, "math": 0, "toxic": 0, "quality": 5, "language": hi_or_eng)"
                   : R"("code": 0, "math": 0, "toxic": 0, "quality": 1, "language": hi_or_eng)";
    });
    JudgeRunConfig cfg;
    cfg.backoff_ms = 0;
    std::vector<JudgedPair> judged =
        judge_pairs(client, {make_pair("q", "good"), make_pair("q", "bad")}, cfg, nullptr);
    CHECK(judged[0].decision.verdict == Verdict::KEEP);
    CHECK(judged[1].decision.verdict == Verdict::DROP);
}

namespace {

std::vector<LangProfile> tiny_profiles() {
    return train_langid({
        {"eng",
         {"the quick brown fox jumps over the lazy dog",
          "every student reads the book in the library",
          "the weather stays clear through the afternoon"}},
        {"hin",
         {"नमस्ते दुनिया यह एक वाक्य है",
          "भाषा के शब्द यहाँ लिखे हैं",
          "विद्यार्थी पुस्तक पढ़ते हैं"}},
    });
}

}  // namespace

TEST_CASE("language rule filter checks both sides of the pair") {
    std::vector<LangProfile> profiles = tiny_profiles();
    double threshold = 0.2;
    CHECK(language_rule_filter(make_pair("the book in the library", "the weather stays clear"),
                               profiles, threshold)
              .verdict == Verdict::KEEP);
    CHECK(language_rule_filter(make_pair("नमस्ते यह वाक्य है", "भाषा के शब्द यहाँ हैं"), profiles,
                               threshold)
              .verdict == Verdict::KEEP);
    // Greek shares no trigrams with either profile
    CHECK(language_rule_filter(make_pair("the book in the library", "ΩΩΩ ΦΦΦ ΨΨΨ"), profiles,
                               threshold)
              .verdict == Verdict::DROP);
}

TEST_CASE("instruction pairs ride the corpus document format") {
    InstructionPair p = make_pair("ask", "answer");
    Document d = pair_to_document(p);
    CHECK(d.id == "p0");
    CHECK(d.text == "ask");
    CHECK(d.meta.at("completion") == "answer");
    CHECK(d.meta.at("source") == "test");
    InstructionPair back = pair_from_document(d);
    CHECK(back.id == p.id);
    CHECK(back.prompt == p.prompt);
    CHECK(back.completion == p.completion);
    CHECK(back.source == p.source);
}
