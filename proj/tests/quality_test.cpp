#include <doctest.h>

#include <string>
#include <vector>

#include "curtok/quality.hpp"
#include "curtok/unicode.hpp"
#include "util.hpp"

using namespace curtok;

namespace {

Document make_doc(std::string id, std::string text) {
    Document d;
    d.id = std::move(id);
    d.text = std::move(text);
    return d;
}

}  // namespace

TEST_CASE("word count filter bounds") {
    HeuristicConfig cfg;
    cfg.min_words = 3;
    cfg.max_words = 5;
    CHECK(word_count_filter(make_doc("a", "one two"), cfg).verdict == Verdict::DROP);
    CHECK(word_count_filter(make_doc("b", "one two three"), cfg).verdict == Verdict::KEEP);
    CHECK(word_count_filter(make_doc("c", "1 2 3 4 5"), cfg).verdict == Verdict::KEEP);
    CHECK(word_count_filter(make_doc("d", "1 2 3 4 5 6"), cfg).verdict == Verdict::DROP);
}

TEST_CASE("mean word length uses scalars not bytes") {
    // 6 + 2 Devanagari scalars over 2 words
    CHECK(uni::mean_word_length("नमस्ते जी") == doctest::Approx(4.0));
    HeuristicConfig cfg;
    cfg.min_mean_word_len = 3.0;
    cfg.max_mean_word_len = 5.0;
    CHECK(mean_word_length_filter(make_doc("a", "नमस्ते जी"), cfg).verdict == Verdict::KEEP);
    CHECK(mean_word_length_filter(make_doc("b", "ab cd"), cfg).verdict == Verdict::DROP);
}

TEST_CASE("zero-word documents are dropped by the length heuristic") {
    HeuristicConfig cfg;
    StageDecision d = mean_word_length_filter(make_doc("a", "   \n\t "), cfg);
    CHECK(d.verdict == Verdict::DROP);
}

TEST_CASE("heuristic config validation") {
    HeuristicConfig cfg;
    cfg.min_words = 10;
    cfg.max_words = 5;
    CHECK_THROWS(cfg.validate());
    cfg = HeuristicConfig{};
    cfg.min_mean_word_len = 9.0;
    cfg.max_mean_word_len = 2.0;
    CHECK_THROWS(cfg.validate());
    CHECK_NOTHROW(HeuristicConfig{}.validate());
}

TEST_CASE("unicode reformat repairs double-encoded latin-1") {
    // "é" read as Latin-1 and re-encoded shows up as "Ã©"
    auto [fixed, changed] = reformat_unicode("Ã©");
    CHECK(changed);
    CHECK(fixed == "é");
}

TEST_CASE("unicode reformat applies NFC") {
    // frozen against a reference normalizer
    struct Case {
        std::u32string in;
        std::string out_utf8;
    };
    const std::vector<Case> cases = {
        {U"é", "\xc3\xa9"},                    // e + combining acute -> é
        {U"Å", "\xc3\x85"},               // A + ring -> Å
        {U"क़", "\xe0\xa4\x95\xe0\xa4\xbc"},     // qa decomposes, stays decomposed
        {U"क़", "\xe0\xa4\x95\xe0\xa4\xbc"},  // ka + nukta does not compose
        {U"ḍ̇", "\xe1\xb8\x8d\xcc\x87"},   // marks reorder then compose
        {U"각", "\xea\xb0\x81"},     // jamo -> hangul syllable
        {U"Ω", "\xce\xa9"},                     // ohm sign -> omega
    };
    for (const Case& c : cases) {
        std::string in_utf8 = uni::encode_utf8(c.in);
        auto [out, changed] = reformat_unicode(in_utf8);
        CHECK(out == c.out_utf8);
        CHECK(changed == (in_utf8 != c.out_utf8));
    }
}

TEST_CASE("unicode reformat is idempotent") {
    SplitMix64 rng(derive_seed(17, "reformat"));
    for (int i = 0; i < 200; ++i) {
        std::string text = testutil::random_utf8_string(rng, 60);
        auto [once, changed1] = reformat_unicode(text);
        auto [twice, changed2] = reformat_unicode(once);
        CHECK(twice == once);
        CHECK_FALSE(changed2);
    }
    auto [same, changed] = reformat_unicode("plain ascii text");
    CHECK(same == "plain ascii text");
    CHECK_FALSE(changed);
}

TEST_CASE("unicode reformat sanitizes ill-formed bytes") {
    std::string bad = "ok\xff\xfe then";
    auto [out, changed] = reformat_unicode(bad);
    CHECK(changed);
    CHECK(uni::valid_utf8(out));
    CHECK(out.find("ok") == 0);
}

namespace {

std::vector<std::pair<Document, QualityBucket>> training_fixture() {
    std::vector<std::pair<Document, QualityBucket>> labeled;
    const char* high[] = {
        "The committee reviewed the proposal and published a detailed response.",
        "Researchers measured rainfall across the valley for three seasons.",
        "She explained the theorem clearly and the students followed every step.",
        "The library catalog lists every edition with its year of printing.",
    };
    const char* medium[] = {
        "click here click here best offer today limited stock buy now",
        "home | products | about | contact | faq | terms | privacy",
        "lorem ipsum dolor sit amet consectetur adipiscing elit sed do",
        "page 1 page 2 page 3 next last first previous index home",
    };
    const char* low[] = {
        "zzzz qqqq xxxx wwww kkkk jjjj vvvv zzzz qqqq xxxx",
        "asdf jkl; asdf jkl; qwer uiop qwer uiop zxcv bnm,",
        "aaaaaaa bbbbbbb ccccccc ddddddd eeeeeee fffffff ggggggg",
        "!!!! #### $$$$ %%%% ^^^^ &&&& **** (((( )))) ____",
    };
    int id = 0;
    for (const char* t : high) labeled.push_back({make_doc("h" + std::to_string(id++), t), QualityBucket::HIGH});
    for (const char* t : medium) labeled.push_back({make_doc("m" + std::to_string(id++), t), QualityBucket::MEDIUM});
    for (const char* t : low) labeled.push_back({make_doc("l" + std::to_string(id++), t), QualityBucket::LOW});
    return labeled;
}

}  // namespace

TEST_CASE("quality classifier separates constructed buckets") {
    FeatureSpec spec;
    spec.dim = 1u << 12;
    QualityTrainResult result = train_quality_classifier(training_fixture(), spec, 42, 30);
    CHECK(result.train_accuracy == doctest::Approx(1.0));

    auto [b1, c1] = result.model.classify("The analysts compared the results and wrote a careful summary.");
    CHECK(b1 == QualityBucket::HIGH);
    auto [b2, c2] = result.model.classify("qqqq zzzz xxxx wwww qqqq zzzz kkkk jjjj");
    CHECK(b2 == QualityBucket::LOW);
}

TEST_CASE("quality classifier training is deterministic") {
    FeatureSpec spec;
    spec.dim = 1u << 12;
    QualityTrainResult a = train_quality_classifier(training_fixture(), spec, 7, 5);
    QualityTrainResult b = train_quality_classifier(training_fixture(), spec, 7, 5);
    CHECK(a.model.weights() == b.model.weights());
    QualityTrainResult c = train_quality_classifier(training_fixture(), spec, 8, 5);
    CHECK(a.model.weights() != c.model.weights());
}

TEST_CASE("quality classifier requires every bucket in training data") {
    std::vector<std::pair<Document, QualityBucket>> labeled = {
        {make_doc("a", "some text"), QualityBucket::HIGH},
        {make_doc("b", "more text"), QualityBucket::HIGH},
    };
    CHECK_THROWS(train_quality_classifier(labeled, FeatureSpec{}, 0));
}

TEST_CASE("zero-feature documents score uniformly as MEDIUM") {
    FeatureSpec spec;
    spec.dim = 1u << 12;
    QualityTrainResult result = train_quality_classifier(training_fixture(), spec, 42, 2);
    auto [bucket, confidence] = result.model.classify("");
    CHECK(bucket == QualityBucket::MEDIUM);
    CHECK(confidence == doctest::Approx(1.0 / 3.0));
    auto probs = result.model.class_probabilities("");
    CHECK(probs[0] == doctest::Approx(1.0 / 3.0));
    CHECK(probs[1] == doctest::Approx(1.0 / 3.0));
    CHECK(probs[2] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("quality model save and load round-trips") {
    testutil::TempDir tmp;
    FeatureSpec spec;
    spec.dim = 1u << 10;
    QualityTrainResult result = train_quality_classifier(training_fixture(), spec, 3, 2);
    result.model.save(tmp.file("q.json"));
    QualityModel loaded = QualityModel::load(tmp.file("q.json"));
    CHECK(loaded.weights() == result.model.weights());
    CHECK(loaded.spec() == result.model.spec());
    CHECK(loaded.classify("The committee reviewed the proposal.") ==
          result.model.classify("The committee reviewed the proposal."));
}

namespace {

std::map<std::string, std::vector<std::string>> langid_fixture() {
    return {
        {"eng",
         {"the quick brown fox jumps over the lazy dog",
          "a library catalog lists every edition and year",
          "students follow the explanation step by step",
          "rainfall was measured across the valley each season"}},
        {"hin",
         {"नमस्ते दुनिया यह एक परीक्षण वाक्य है",
          "भाषा के शब्द और वाक्य यहाँ लिखे गये हैं",
          "विद्यार्थी हर कदम पर स्पष्टीकरण समझते हैं",
          "घाटी में हर मौसम वर्षा मापी गयी"}},
    };
}

}  // namespace

TEST_CASE("language identification on clear inputs") {
    std::vector<LangProfile> profiles = train_langid(langid_fixture());
    auto [l1, c1] = identify_language(profiles, "the students read the catalog in the library");
    CHECK(l1 == "eng");
    CHECK(c1 > 0.0);
    auto [l2, c2] = identify_language(profiles, "नमस्ते यह वाक्य हिंदी में है");
    CHECK(l2 == "hin");
}

TEST_CASE("language identification reports unknown when nothing matches") {
    std::vector<LangProfile> profiles = train_langid(langid_fixture());
    auto [lang, conf] = identify_language(profiles, "ΩΩΩ ΦΦΦ ΨΨΨ ΔΔΔ");
    CHECK(lang == "unknown");
    auto [lang2, conf2] = identify_language(profiles, "");
    CHECK(lang2 == "unknown");
}

TEST_CASE("language identification requires profiles") {
    CHECK_THROWS(identify_language({}, "text"));
}

TEST_CASE("langid profiles save and load round-trips") {
    testutil::TempDir tmp;
    std::vector<LangProfile> profiles = train_langid(langid_fixture());
    save_langid(profiles, tmp.file("lid.json"));
    std::vector<LangProfile> loaded = load_langid(tmp.file("lid.json"));
    REQUIRE(loaded.size() == profiles.size());
    for (size_t i = 0; i < profiles.size(); ++i) {
        CHECK(loaded[i].lang == profiles[i].lang);
        CHECK(loaded[i].n == profiles[i].n);
        REQUIRE(loaded[i].ngrams.size() == profiles[i].ngrams.size());
        for (size_t g = 0; g < profiles[i].ngrams.size(); ++g) {
            CHECK(loaded[i].ngrams[g].first == profiles[i].ngrams[g].first);
            CHECK(loaded[i].ngrams[g].second ==
                  doctest::Approx(profiles[i].ngrams[g].second).epsilon(1e-12));
        }
    }
}

TEST_CASE("profile frequencies are normalized and rank-ordered") {
    std::vector<LangProfile> profiles = train_langid(langid_fixture(), 3, 50);
    for (const LangProfile& p : profiles) {
        CHECK(p.ngrams.size() <= 50);
        double sum = 0.0;
        for (size_t i = 0; i < p.ngrams.size(); ++i) {
            sum += p.ngrams[i].second;
            if (i > 0) CHECK(p.ngrams[i - 1].second >= p.ngrams[i].second);
        }
        CHECK(sum == doctest::Approx(1.0));
    }
}
