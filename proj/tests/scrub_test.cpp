#include <doctest.h>

#include <fstream>
#include <string>
#include <vector>

#include "curtok/quality.hpp"
#include "curtok/scrub.hpp"
#include "util.hpp"

using namespace curtok;

namespace {

Document make_doc(std::string text) {
    Document d;
    d.id = "t";
    d.text = std::move(text);
    return d;
}

}  // namespace

TEST_CASE("email detection uses scalar offsets") {
    // 6 Devanagari scalars + 1 space before the address
    std::vector<PiiSpan> spans = detect_pii("नमस्ते a@b.co");
    REQUIRE(spans.size() == 1);
    CHECK(spans[0].category == PiiCategory::EMAIL);
    CHECK(spans[0].matched == "a@b.co");
    CHECK(spans[0].start == 7);
    CHECK(spans[0].end == 13);
    CHECK(redact_pii("नमस्ते a@b.co", spans) == "नमस्ते <EMAIL>");
}

TEST_CASE("phone numbers with country codes") {
    std::vector<PiiSpan> spans = detect_pii("call +91 98765 43210 today");
    REQUIRE(spans.size() == 1);
    CHECK(spans[0].category == PiiCategory::PHONE);
    CHECK(spans[0].matched == "+91 98765 43210");
}

TEST_CASE("identity numbers") {
    std::vector<PiiSpan> spans = detect_pii("PAN ABCDE1234F on file");
    REQUIRE(spans.size() == 1);
    CHECK(spans[0].category == PiiCategory::ID_NUMBER);
    CHECK(spans[0].matched == "ABCDE1234F");
}

TEST_CASE("ssn-shaped numbers yield exactly one span") {
    // the phone and id patterns both match the full run; overlap resolution
    // keeps one (equal length and start, so category order decides)
    std::vector<PiiSpan> spans = detect_pii("ssn 123-45-6789 end");
    REQUIRE(spans.size() == 1);
    CHECK(spans[0].matched == "123-45-6789");
}

TEST_CASE("url credentials swallow the contained email-shaped match") {
    std::vector<PiiSpan> spans = detect_pii("see http://user:pw@example.com/path now");
    REQUIRE(spans.size() == 1);
    CHECK(spans[0].category == PiiCategory::URL_WITH_USERINFO);
    CHECK(spans[0].matched == "http://user:pw@example.com/path");
}

TEST_CASE("multiple spans come back disjoint and sorted") {
    std::string text = "mail a@b.co or dial +1 555 0100 42 now";
    std::vector<PiiSpan> spans = detect_pii(text);
    REQUIRE(spans.size() == 2);
    CHECK(spans[0].category == PiiCategory::EMAIL);
    CHECK(spans[1].category == PiiCategory::PHONE);
    CHECK(spans[0].end <= spans[1].start);
    CHECK(redact_pii(text, spans) == "mail <EMAIL> or dial <PHONE> now");
}

TEST_CASE("clean text has no spans") {
    CHECK(detect_pii("nothing sensitive here, just words").empty());
    CHECK(redact_pii("unchanged", {}) == "unchanged");
}

TEST_CASE("custom pattern files") {
    testutil::TempDir tmp;
    std::ofstream(tmp.file("p.json")) << R"({"ID_NUMBER": ["\\bAGENT-\\d{3}\\b"]})";
    PiiPatterns patterns = load_pii_patterns(tmp.file("p.json"));
    std::vector<PiiSpan> spans = detect_pii("codename AGENT-007 reporting", patterns);
    REQUIRE(spans.size() == 1);
    CHECK(spans[0].category == PiiCategory::ID_NUMBER);
    CHECK(spans[0].matched == "AGENT-007");
    // unknown category key
    std::ofstream(tmp.file("bad.json")) << R"({"NOPE": ["x"]})";
    CHECK_THROWS(load_pii_patterns(tmp.file("bad.json")));
}

TEST_CASE("redact rejects out-of-range spans") {
    PiiSpan bad;
    bad.start = 2;
    bad.end = 99;
    CHECK_THROWS(redact_pii("abc", {bad}));
}

namespace {

const char* kCodeDoc =
    "def compute(x):\n"
    "    y = x * 2;\n"
    "    return y;\n"
    "import math\n"
    "class Point {\n"
    "    int x;\n"
    "    int y;\n"
    "};\n";

const char* kProseDoc =
    "The village market opens before sunrise and the stalls fill quickly.\n"
    "Traders arrange fruit in neat rows while the tea seller lights a stove.\n"
    "By noon the lanes are crowded and bargaining fills the air.\n";

}  // namespace

TEST_CASE("code pattern score counts matching lines") {
    CHECK(code_pattern_score(kCodeDoc) == doctest::Approx(1.0));
    CHECK(code_pattern_score(kProseDoc) == doctest::Approx(0.0));
    CHECK(code_pattern_score("") == doctest::Approx(0.0));
}

TEST_CASE("structural score counts indented lines") {
    // 4 of the 8 non-blank lines are indented
    CHECK(structural_cue_score(kCodeDoc) == doctest::Approx(0.5));
    CHECK(structural_cue_score("text with `inline code` here") == doctest::Approx(1.0));
    CHECK(structural_cue_score("```\n") == doctest::Approx(1.0));
}

TEST_CASE("math density counts symbols and markup") {
    CHECK(math_density("∑ ∫ √") == doctest::Approx(1.0));
    CHECK(math_density("hello world") == doctest::Approx(0.0));
    // markup commands count
    CHECK(math_density("\\frac{a}{b} plus and \\sqrt{2}") == doctest::Approx(0.5));
}

TEST_CASE("numeric tokens only count once they dominate") {
    // all numeric: share 1.0 > cap 0.5
    CHECK(math_density("1 2 3 4") == doctest::Approx(1.0));
    // share exactly 0.5 stays prose
    CHECK(math_density("price 5") == doctest::Approx(0.0));
    CHECK(math_density("it costs 5 rupees per item now") == doctest::Approx(0.0));
}

TEST_CASE("codemath filter drops code and keeps prose at defaults") {
    CodeMathWeights w;
    CodeMathVerdict code = codemath_filter(make_doc(kCodeDoc), w, 0.5);
    CHECK(code.verdict == Verdict::DROP);
    CHECK(code.combined > 0.5);
    CodeMathVerdict prose = codemath_filter(make_doc(kProseDoc), w, 0.5);
    CHECK(prose.verdict == Verdict::KEEP);
    CHECK(prose.combined < 0.1);
}

TEST_CASE("without a classifier its weight is redistributed") {
    CodeMathWeights w;
    CodeMathVerdict v = codemath_filter(make_doc(kCodeDoc), w, 0.5);
    // weights renormalized over (code, math, structural) = (4/9, 3/9, 2/9)
    double expect = (0.4 * v.code_score + 0.3 * v.math_density + 0.2 * v.structural_score) / 0.9;
    CHECK(v.combined == doctest::Approx(expect));
}

TEST_CASE("classifier-only weights require a classifier") {
    CodeMathWeights w;
    w.code = 0;
    w.math = 0;
    w.structural = 0;
    w.classifier = 1;
    CHECK_THROWS(codemath_filter(make_doc("text"), w, 0.5));
}

TEST_CASE("codemath weight validation") {
    CodeMathWeights w;
    CHECK_NOTHROW(w.validate());
    w.code = -0.1;
    CHECK_THROWS(w.validate());
    w = CodeMathWeights{};
    w.code = 0.9;
    CHECK_THROWS(w.validate());
}

TEST_CASE("a supplied classifier contributes its positive-class probability") {
    std::vector<std::pair<Document, QualityBucket>> labeled;
    for (int i = 0; i < 4; ++i) {
        labeled.push_back({make_doc(kCodeDoc), QualityBucket::HIGH});
        labeled.push_back({make_doc("def f():\n    return 1;\nimport os\n"), QualityBucket::HIGH});
        labeled.push_back({make_doc("the gentle river bends through the valley meadow"),
                           QualityBucket::LOW});
        labeled.push_back({make_doc("click here buy now limited offer"), QualityBucket::MEDIUM});
    }
    FeatureSpec spec;
    spec.dim = 1u << 12;
    QualityModel model = train_quality_classifier(labeled, spec, 1, 20).model;

    CodeMathWeights w;
    CodeMathVerdict with_cls = codemath_filter(make_doc(kCodeDoc), w, 0.5, &model);
    CHECK(with_cls.classifier_score > 0.5);
    double expect = 0.4 * with_cls.code_score + 0.3 * with_cls.math_density +
                    0.2 * with_cls.structural_score + 0.1 * with_cls.classifier_score;
    CHECK(with_cls.combined == doctest::Approx(expect));
}
