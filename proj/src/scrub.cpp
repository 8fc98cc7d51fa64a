#include "curtok/scrub.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "curtok/unicode.hpp"

namespace curtok {

using json = nlohmann::json;

std::string to_string(PiiCategory c) {
    switch (c) {
        case PiiCategory::EMAIL: return "EMAIL";
        case PiiCategory::PHONE: return "PHONE";
        case PiiCategory::ID_NUMBER: return "ID_NUMBER";
        case PiiCategory::URL_WITH_USERINFO: return "URL_WITH_USERINFO";
    }
    return "EMAIL";
}

PiiCategory pii_category_from_string(std::string_view s) {
    if (s == "EMAIL") return PiiCategory::EMAIL;
    if (s == "PHONE") return PiiCategory::PHONE;
    if (s == "ID_NUMBER") return PiiCategory::ID_NUMBER;
    if (s == "URL_WITH_USERINFO") return PiiCategory::URL_WITH_USERINFO;
    throw std::invalid_argument("unknown PII category: " + std::string(s));
}

std::string pii_placeholder(PiiCategory c) {
    switch (c) {
        case PiiCategory::EMAIL: return "<EMAIL>";
        case PiiCategory::PHONE: return "<PHONE>";
        case PiiCategory::ID_NUMBER: return "<ID>";
        case PiiCategory::URL_WITH_USERINFO: return "<URL>";
    }
    return "<EMAIL>";
}

const PiiPatterns& default_pii_patterns() {
    static const PiiPatterns patterns = {
        {PiiCategory::EMAIL,
         {R"([A-Za-z0-9._%+\-]+@[A-Za-z0-9.\-]+\.[A-Za-z]{2,})"}},
        {PiiCategory::PHONE,
         // international or grouped local numbers, at least three groups
         {R"(\+?\d{1,4}(?:[-.\s]\d{2,5}){2,4})",
          R"(\+\d{1,3}[-.\s]?\d{6,12})",
          R"(\(\d{2,5}\)\s?\d{3,5}[-.\s]?\d{3,6})"}},
        {PiiCategory::ID_NUMBER,
         // Aadhaar-style 4-4-4, SSN-style 3-2-4, PAN-style AAAAA9999A
         {R"(\b\d{4}[-\s]\d{4}[-\s]\d{4}\b)",
          R"(\b\d{3}-\d{2}-\d{4}\b)",
          R"(\b[A-Z]{5}\d{4}[A-Z]\b)"}},
        {PiiCategory::URL_WITH_USERINFO,
         {R"([A-Za-z][A-Za-z0-9+.\-]*://[^/\s:@]+:[^/\s@]*@\S+)"}},
    };
    return patterns;
}

PiiPatterns load_pii_patterns(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw std::invalid_argument("PII pattern file must be a JSON object");
    PiiPatterns patterns;
    for (const auto& [key, value] : j.items()) {
        PiiCategory cat = pii_category_from_string(key);
        if (!value.is_array()) throw std::invalid_argument("patterns for " + key + " must be a list");
        patterns[cat] = value.get<std::vector<std::string>>();
    }
    return patterns;
}

namespace {

struct CompiledPatterns {
    std::vector<std::pair<PiiCategory, std::regex>> regexes;

    explicit CompiledPatterns(const PiiPatterns& patterns) {
        for (const auto& [cat, list] : patterns)
            for (const std::string& p : list) regexes.emplace_back(cat, std::regex(p));
    }
};

}  // namespace

std::vector<PiiSpan> detect_pii(std::string_view text, const PiiPatterns& patterns) {
    CompiledPatterns compiled(patterns);

    // Byte-offset matches first, then a single conversion to scalar offsets.
    struct ByteSpan {
        size_t start, end;
        PiiCategory category;
    };
    std::vector<ByteSpan> raw;
    std::string haystack(text);
    for (const auto& [cat, re] : compiled.regexes) {
        auto begin = std::sregex_iterator(haystack.begin(), haystack.end(), re);
        for (auto it = begin; it != std::sregex_iterator(); ++it)
            raw.push_back({static_cast<size_t>(it->position()),
                           static_cast<size_t>(it->position() + it->length()), cat});
    }
    std::sort(raw.begin(), raw.end(), [](const ByteSpan& a, const ByteSpan& b) {
        size_t la = a.end - a.start, lb = b.end - b.start;
        if (la != lb) return la > lb;  // longest first
        if (a.start != b.start) return a.start < b.start;
        return static_cast<int>(a.category) < static_cast<int>(b.category);
    });
    std::vector<ByteSpan> resolved;
    for (const ByteSpan& s : raw) {
        bool overlaps = false;
        for (const ByteSpan& r : resolved)
            if (s.start < r.end && r.start < s.end) {
                overlaps = true;
                break;
            }
        if (!overlaps) resolved.push_back(s);
    }
    std::sort(resolved.begin(), resolved.end(),
              [](const ByteSpan& a, const ByteSpan& b) { return a.start < b.start; });

    std::vector<size_t> starts = uni::scalar_starts(text);
    auto to_scalar = [&](size_t byte_off) {
        return static_cast<size_t>(
            std::lower_bound(starts.begin(), starts.end(), byte_off) - starts.begin());
    };
    std::vector<PiiSpan> spans;
    for (const ByteSpan& s : resolved)
        spans.push_back({to_scalar(s.start), to_scalar(s.end), s.category,
                         std::string(text.substr(s.start, s.end - s.start))});
    return spans;
}

std::vector<PiiSpan> detect_pii(std::string_view text) {
    return detect_pii(text, default_pii_patterns());
}

std::string redact_pii(std::string_view text, const std::vector<PiiSpan>& spans) {
    std::u32string scalars = uni::decode_utf8(text);
    std::vector<PiiSpan> ordered = spans;
    std::sort(ordered.begin(), ordered.end(),
              [](const PiiSpan& a, const PiiSpan& b) { return a.start < b.start; });
    size_t prev_end = 0;
    for (const PiiSpan& s : ordered) {
        if (s.start >= s.end || s.end > scalars.size())
            throw std::invalid_argument("PII span out of range");
        if (s.start < prev_end) throw std::invalid_argument("PII spans overlap");
        prev_end = s.end;
    }
    std::string out;
    size_t pos = 0;
    for (const PiiSpan& s : ordered) {
        out += uni::encode_utf8(scalars.substr(pos, s.start - pos));
        out += pii_placeholder(s.category);
        pos = s.end;
    }
    out += uni::encode_utf8(scalars.substr(pos));
    return out;
}

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

bool blank(std::string_view line) {
    return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

double line_fraction(std::string_view text, bool (*matches)(std::string_view)) {
    size_t total = 0, hits = 0;
    for (std::string_view line : split_lines(text)) {
        if (blank(line)) continue;
        ++total;
        if (matches(line)) ++hits;
    }
    if (total == 0) return 0.0;
    return std::clamp(static_cast<double>(hits) / static_cast<double>(total), 0.0, 1.0);
}

bool is_code_line(std::string_view line) {
    static const std::regex patterns[] = {
        std::regex(R"(^\s*(def\s+\w+\s*\(|(async\s+)?function\b|fn\s+\w+|func\s+\w+))"),
        std::regex(R"(^\s*(import\s+[\w.]+|from\s+\S+\s+import\b|#\s*include\s*[<"]|using\s+namespace\b|require\s*\())"),
        std::regex(R"(^\s*(public|private|protected|static|void|class|struct|return|const|let|var)\b.*[;{(])"),
        std::regex(R"(^\s*</?[A-Za-z][^<>]*>)"),
        std::regex(R"([{};]\s*$)"),
        std::regex(R"(\{.*\}|\(\)\s*[{;])"),
    };
    std::string s(line);
    for (const std::regex& re : patterns)
        if (std::regex_search(s, re)) return true;
    return false;
}

bool is_structural_line(std::string_view line) {
    if (line.substr(0, 4) == "    " || (!line.empty() && line[0] == '\t')) return true;
    if (line.find("```") != std::string_view::npos) return true;
    if (line.find("~~~") != std::string_view::npos) return true;
    size_t tick = line.find('`');
    if (tick != std::string_view::npos && line.find('`', tick + 1) != std::string_view::npos)
        return true;
    return false;
}

const char32_t kMathScalars[] = {U'∑', U'∫', U'√', U'±', U'≤', U'≥', U'≈', U'≠', U'∞',
                                 U'∂', U'∇', U'π', U'∈', U'∉', U'⊂', U'⊃', U'∪', U'∩',
                                 U'→', U'⇒', U'⇔', U'×', U'÷', U'Δ', U'θ', U'λ', U'μ',
                                 U'σ', U'φ', U'ω'};

bool has_math_scalar(const std::u32string& token) {
    for (char32_t c : token)
        for (char32_t m : kMathScalars)
            if (c == m) return true;
    return false;
}

bool has_markup_command(const std::u32string& token) {
    for (size_t i = 0; i + 1 < token.size(); ++i)
        if (token[i] == U'\\' && ((token[i + 1] >= U'a' && token[i + 1] <= U'z') ||
                                  (token[i + 1] >= U'A' && token[i + 1] <= U'Z')))
            return true;
    return false;
}

bool is_numeric_token(const std::u32string& token) {
    bool digit = false;
    for (char32_t c : token) {
        if (uni::is_decimal_digit(c)) {
            digit = true;
        } else if (c != U'.' && c != U',' && c != U'+' && c != U'-' && c != U'*' && c != U'/' &&
                   c != U'=' && c != U'^' && c != U'%' && c != U'(' && c != U')') {
            return false;
        }
    }
    return digit;
}

}  // namespace

double code_pattern_score(std::string_view text) {
    return line_fraction(text, &is_code_line);
}

double structural_cue_score(std::string_view text) {
    return line_fraction(text, &is_structural_line);
}

double math_density(std::string_view text, double numeric_cap) {
    std::vector<std::u32string> tokens = uni::split_words(uni::decode_utf8(text));
    if (tokens.empty()) return 0.0;
    size_t symbolic = 0, numeric = 0;
    for (const std::u32string& t : tokens) {
        if (has_markup_command(t) || has_math_scalar(t))
            ++symbolic;
        else if (is_numeric_token(t))
            ++numeric;
    }
    double total = static_cast<double>(tokens.size());
    size_t mathy = symbolic;
    // Numeric tokens only count once they dominate: sparse numbers are prose.
    if (static_cast<double>(numeric) / total > numeric_cap) mathy += numeric;
    return std::clamp(static_cast<double>(mathy) / total, 0.0, 1.0);
}

void CodeMathWeights::validate() const {
    const double vals[] = {code, math, structural, classifier};
    double sum = 0;
    for (double v : vals) {
        if (v < 0) throw std::invalid_argument("codemath weights must be non-negative");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("codemath weights must sum to 1");
}

CodeMathVerdict codemath_filter(const Document& doc, const CodeMathWeights& weights,
                                double threshold, const QualityModel* classifier) {
    weights.validate();
    CodeMathVerdict v;
    v.code_score = code_pattern_score(doc.text);
    v.math_density = curtok::math_density(doc.text);
    v.structural_score = structural_cue_score(doc.text);

    double w_code = weights.code, w_math = weights.math, w_struct = weights.structural,
           w_cls = weights.classifier;
    if (classifier) {
        v.classifier_score = classifier->class_probabilities(doc.text)[
            static_cast<int>(QualityBucket::HIGH)];
    } else {
        double rest = w_code + w_math + w_struct;
        if (rest <= 0)
            throw std::invalid_argument(
                "classifier weight is 1 but no classifier was supplied");
        w_code /= rest;
        w_math /= rest;
        w_struct /= rest;
        w_cls = 0;
    }
    v.combined = w_code * v.code_score + w_math * v.math_density + w_struct * v.structural_score +
                 w_cls * v.classifier_score;
    v.verdict = v.combined > threshold ? Verdict::DROP : Verdict::KEEP;
    return v;
}

}  // namespace curtok
