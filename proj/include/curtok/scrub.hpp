#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "curtok/corpus.hpp"
#include "curtok/quality.hpp"

namespace curtok {

enum class PiiCategory { EMAIL, PHONE, ID_NUMBER, URL_WITH_USERINFO };
std::string to_string(PiiCategory c);
PiiCategory pii_category_from_string(std::string_view s);
std::string pii_placeholder(PiiCategory c);  // "<EMAIL>", "<PHONE>", "<ID>", "<URL>"

struct PiiSpan {
    size_t start = 0;  // scalar offsets, start < end
    size_t end = 0;
    PiiCategory category = PiiCategory::EMAIL;
    std::string matched;
};

// category -> regex list (ECMAScript syntax, applied to the UTF-8 bytes)
using PiiPatterns = std::map<PiiCategory, std::vector<std::string>>;
const PiiPatterns& default_pii_patterns();
PiiPatterns load_pii_patterns(const std::string& path);  // JSON {"EMAIL": [...], ...}

// All category matches, overlaps resolved longest-first (ties by earliest
// start, then category order). Returned spans are disjoint, sorted by start.
std::vector<PiiSpan> detect_pii(std::string_view text);
std::vector<PiiSpan> detect_pii(std::string_view text, const PiiPatterns& patterns);

// Replaces each span with its category placeholder. Spans must be disjoint
// and within the text.
std::string redact_pii(std::string_view text, const std::vector<PiiSpan>& spans);

// Fraction of non-blank lines matching a code pattern (definitions, imports,
// markup tags, brace or semicolon statements).
double code_pattern_score(std::string_view text);

// Fraction of whitespace-delimited tokens that are mathy: markup commands,
// math symbols, or numeric tokens once their share exceeds numeric_cap.
double math_density(std::string_view text, double numeric_cap = 0.5);

// Fraction of non-blank lines with structural cues: deep indentation,
// fenced-block markers, inline backticks.
double structural_cue_score(std::string_view text);

struct CodeMathWeights {
    double code = 0.4;
    double math = 0.3;
    double structural = 0.2;
    double classifier = 0.1;

    void validate() const;  // non-negative, sum to 1
};

struct CodeMathVerdict {
    double code_score = 0.0;
    double math_density = 0.0;
    double structural_score = 0.0;
    double classifier_score = 0.0;
    double combined = 0.0;
    Verdict verdict = Verdict::KEEP;
};

// DROP iff the weighted combination exceeds the threshold. Without a
// classifier its weight is redistributed proportionally across the other
// three signals; the classifier's positive bucket is HIGH.
CodeMathVerdict codemath_filter(const Document& doc, const CodeMathWeights& weights,
                                double threshold, const QualityModel* classifier = nullptr);

}  // namespace curtok
