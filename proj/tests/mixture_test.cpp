#include <doctest.h>

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "curtok/hash.hpp"
#include "curtok/mixture.hpp"
#include "curtok/unicode.hpp"
#include "util.hpp"

using namespace curtok;

TEST_CASE("normalized deficit") {
    LangMap f = {{"a", 2.0}, {"b", 1.5}};
    LangMap d = normalized_deficit(f, 1.0);
    CHECK(d.at("a") == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(d.at("b") == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("normalized deficit with zero range is all zeros") {
    LangMap f = {{"a", 1.4}, {"b", 1.4}, {"c", 1.4}};
    for (const auto& [lang, v] : normalized_deficit(f, 1.0)) CHECK(v == 0.0);
}

TEST_CASE("target shares from clamped weights") {
    LangMap d = {{"a", 2.0}, {"b", 1.0}};
    LangMap t = target_shares(d, 0.01);
    CHECK(t.at("a") == doctest::Approx(2.01 / 3.02).epsilon(1e-12));
    CHECK(t.at("b") == doctest::Approx(1.01 / 3.02).epsilon(1e-12));
    // negative deficits clamp to zero before the smoothing term
    LangMap neg = {{"a", -5.0}, {"b", 1.0}};
    LangMap t2 = target_shares(neg, 0.01);
    CHECK(t2.at("a") == doctest::Approx(0.01 / 1.02).epsilon(1e-12));
    CHECK(t2.at("a") + t2.at("b") == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("momentum update") {
    LangMap prev = {{"a", 0.5}, {"b", 0.5}};
    LangMap target = {{"a", 0.9}, {"b", 0.1}};
    LangMap m = momentum_update(prev, target, 0.3);
    CHECK(m.at("a") == doctest::Approx(0.7 * 0.5 + 0.3 * 0.9).epsilon(1e-12));
    CHECK(m.at("b") == doctest::Approx(0.7 * 0.5 + 0.3 * 0.1).epsilon(1e-12));
}

TEST_CASE("character allocation uses largest remainders") {
    LangMap uniform = {{"a", 1.0 / 3}, {"b", 1.0 / 3}, {"c", 1.0 / 3}};
    auto c = allocate_characters(uniform, 10);
    CHECK(c.at("a") == 4);  // remainder tie resolved in language order
    CHECK(c.at("b") == 3);
    CHECK(c.at("c") == 3);
}

TEST_CASE("character allocation always sums to the budget") {
    SplitMix64 rng(derive_seed(31, "alloc"));
    for (int trial = 0; trial < 50; ++trial) {
        LangMap m;
        double sum = 0;
        int langs = 2 + static_cast<int>(rng.next_below(6));
        for (int i = 0; i < langs; ++i) {
            double v = rng.next_double() + 1e-3;
            m["l" + std::to_string(i)] = v;
            sum += v;
        }
        for (auto& [k, v] : m) v /= sum;
        uint64_t total = 1 + rng.next_below(100000);
        auto c = allocate_characters(m, total);
        uint64_t got = 0;
        for (const auto& [k, v] : c) got += v;
        CHECK(got == total);
    }
}

TEST_CASE("one optimization step against straight-line equation values") {
    // f = {2.0, 1.5}, f_best = 1, eps = 0.01, mu = 0.3, uniform start, T = 1000
    LangMap f = {{"a", 2.0}, {"b", 1.5}};
    LangMap delta = normalized_deficit(f, 1.0);
    CHECK(delta.at("a") == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(delta.at("b") == doctest::Approx(1.0).epsilon(1e-6));

    LangMap t = target_shares(delta, 0.01);
    CHECK(t.at("a") == doctest::Approx(0.66556291390728).epsilon(1e-6));
    CHECK(t.at("b") == doctest::Approx(0.33443708609271).epsilon(1e-6));

    LangMap m = momentum_update({{"a", 0.5}, {"b", 0.5}}, t, 0.3);
    CHECK(m.at("a") == doctest::Approx(0.549668874172185).epsilon(1e-6));
    CHECK(m.at("b") == doctest::Approx(0.450331125827815).epsilon(1e-6));

    auto c = allocate_characters(m, 1000);
    CHECK(c.at("a") == 550);
    CHECK(c.at("b") == 450);
}

namespace {

Document make_doc(std::string id, std::string text) {
    Document d;
    d.id = std::move(id);
    d.text = std::move(text);
    return d;
}

std::map<std::string, std::vector<Document>> two_lang_corpora() {
    std::map<std::string, std::vector<Document>> corpora;
    SplitMix64 rng(derive_seed(41, "corpora"));
    const char* a_words[] = {"sun", "moon", "star", "sky", "cloud", "rain"};
    const char* b_words[] = {"bharat", "desham", "vakyam", "shabda", "artha", "patra"};
    for (int i = 0; i < 40; ++i) {
        std::string a, b;
        for (int w = 0; w < 12; ++w) {
            a += a_words[rng.next_below(6)];
            a += ' ';
            b += b_words[rng.next_below(6)];
            b += ' ';
        }
        corpora["aa"].push_back(make_doc("a" + std::to_string(i), a));
        corpora["bb"].push_back(make_doc("b" + std::to_string(i), b));
    }
    return corpora;
}

}  // namespace

TEST_CASE("sampling meets the scalar budget and cuts at whitespace") {
    std::vector<Document> corpus = {make_doc("d0", "aaaa bbbb cccc")};
    SampleResult r = sample_characters(corpus, 6, 1);
    // first whitespace at or after scalar 6 is after "bbbb"
    CHECK(r.text == "aaaa bbbb");
    CHECK(r.scalar_count == 9);
    CHECK_FALSE(r.exhausted);
}

TEST_CASE("sampling a too-small corpus reports exhaustion") {
    std::vector<Document> corpus = {make_doc("d0", "short")};
    SampleResult r = sample_characters(corpus, 100, 1);
    CHECK(r.exhausted);
    CHECK(r.scalar_count <= 6);
}

TEST_CASE("sampling is deterministic in the seed") {
    auto corpora = two_lang_corpora();
    SampleResult a = sample_characters(corpora["aa"], 200, 7);
    SampleResult b = sample_characters(corpora["aa"], 200, 7);
    CHECK(a.text == b.text);
    SampleResult c = sample_characters(corpora["aa"], 200, 8);
    CHECK(c.text != a.text);
}

namespace {

// Always reports the same fertilities regardless of the samples.
class FrozenEvaluator : public FertilityEvaluator {
public:
    explicit FrozenEvaluator(LangMap f) : f_(std::move(f)) {}
    LangMap evaluate(const std::map<std::string, std::string>&) override { return f_; }

private:
    LangMap f_;
};

}  // namespace

TEST_CASE("frozen fertilities converge geometrically to the target") {
    auto corpora = two_lang_corpora();
    OptimizerConfig cfg;
    cfg.mu = 0.3;
    cfg.iterations = 20;
    cfg.total_chars = 400;
    FrozenEvaluator eval({{"aa", 2.0}, {"bb", 1.5}});
    MixtureState state = run_mixture_loop(corpora, cfg, eval);

    LangMap t = target_shares(normalized_deficit({{"aa", 2.0}, {"bb", 1.5}}, cfg.f_best),
                              cfg.epsilon);
    double m0_gap = std::abs(0.5 - t.at("aa"));
    double bound = std::pow(1.0 - cfg.mu, cfg.iterations) * m0_gap + 1e-9;
    CHECK(std::abs(state.mixture.at("aa") - t.at("aa")) <= bound);
    CHECK(std::abs(state.mixture.at("bb") - t.at("bb")) <= bound);
    CHECK(state.iteration == 20);
    CHECK(state.history.size() == 20);
}

TEST_CASE("mixture shares stay normalized across iterations") {
    auto corpora = two_lang_corpora();
    OptimizerConfig cfg;
    cfg.iterations = 5;
    cfg.total_chars = 400;
    FrozenEvaluator eval({{"aa", 3.0}, {"bb", 1.2}});
    MixtureState state = run_mixture_loop(corpora, cfg, eval);
    for (const IterationRecord& rec : state.history) {
        double sum = 0;
        for (const auto& [lang, m] : rec.mixture) sum += m;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        uint64_t chars = 0;
        for (const auto& [lang, c] : rec.chars) chars += c;
        CHECK(chars == cfg.total_chars);
    }
}

TEST_CASE("optimizer config validation") {
    OptimizerConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.mu = 0.0;
    CHECK_THROWS(cfg.validate());
    cfg = OptimizerConfig{};
    cfg.mu = 1.5;
    CHECK_THROWS(cfg.validate());
    cfg = OptimizerConfig{};
    cfg.epsilon = 0.0;
    CHECK_THROWS(cfg.validate());
    cfg = OptimizerConfig{};
    cfg.iterations = 0;
    CHECK_THROWS(cfg.validate());
}

TEST_CASE("mixture loop rejects a budget below the language count") {
    auto corpora = two_lang_corpora();
    OptimizerConfig cfg;
    cfg.total_chars = 1;
    FrozenEvaluator eval({{"aa", 2.0}, {"bb", 1.5}});
    CHECK_THROWS(run_mixture_loop(corpora, cfg, eval));
}

TEST_CASE("mixture loop rejects evaluators with mismatched languages") {
    auto corpora = two_lang_corpora();
    OptimizerConfig cfg;
    cfg.total_chars = 400;
    FrozenEvaluator eval({{"aa", 2.0}});  // missing bb
    CHECK_THROWS(run_mixture_loop(corpora, cfg, eval));
}

TEST_CASE("trajectory serialization has one record per iteration") {
    auto corpora = two_lang_corpora();
    OptimizerConfig cfg;
    cfg.iterations = 3;
    cfg.total_chars = 400;
    FrozenEvaluator eval({{"aa", 2.0}, {"bb", 1.5}});
    MixtureState state = run_mixture_loop(corpora, cfg, eval);
    std::string jsonl = trajectory_to_jsonl(state);

    std::vector<std::string> lines;
    size_t pos = 0;
    while (pos < jsonl.size()) {
        size_t nl = jsonl.find('\n', pos);
        lines.push_back(jsonl.substr(pos, nl - pos));
        pos = nl + 1;
    }
    REQUIRE(lines.size() == 3);
    for (int i = 0; i < 3; ++i) {
        auto j = nlohmann::json::parse(lines[i]);
        CHECK(j.at("n").get<int>() == i + 1);
        for (const char* key : {"f", "delta", "w", "t", "m", "c"}) {
            CHECK(j.contains(key));
            CHECK(j.at(key).contains("aa"));
            CHECK(j.at(key).contains("bb"));
        }
    }
}

TEST_CASE("bpe evaluator trains on samples and scores held-out text") {
    auto corpora = two_lang_corpora();
    BpeTrainConfig bpe;
    bpe.vocab_size = 400;
    BpeFertilityEvaluator eval(bpe, corpora);
    std::map<std::string, std::string> samples = {
        {"aa", "sun moon star sky sun moon"},
        {"bb", "bharat desham vakyam shabda"},
    };
    LangMap f = eval.evaluate(samples);
    REQUIRE(f.count("aa"));
    REQUIRE(f.count("bb"));
    CHECK(f.at("aa") >= 1.0);
    CHECK(f.at("bb") >= 1.0);
}
