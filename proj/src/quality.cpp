#include "curtok/quality.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "curtok/hash.hpp"
#include "curtok/unicode.hpp"

namespace curtok {

using json = nlohmann::json;

void HeuristicConfig::validate() const {
    if (min_words > max_words)
        throw std::invalid_argument("min_words exceeds max_words");
    if (min_mean_word_len > max_mean_word_len)
        throw std::invalid_argument("min_mean_word_len exceeds max_mean_word_len");
    if (min_mean_word_len < 0)
        throw std::invalid_argument("min_mean_word_len must be non-negative");
}

StageDecision word_count_filter(const Document& doc, const HeuristicConfig& cfg) {
    uint64_t n = uni::word_count(doc.text);
    bool keep = n >= cfg.min_words && n <= cfg.max_words;
    return {"word_count", keep ? Verdict::KEEP : Verdict::DROP,
            "count=" + std::to_string(n), static_cast<double>(n)};
}

StageDecision mean_word_length_filter(const Document& doc, const HeuristicConfig& cfg) {
    uint64_t n = uni::word_count(doc.text);
    if (n == 0) return {"mean_word_length", Verdict::DROP, "empty", std::nullopt};
    double mean = uni::mean_word_length(doc.text);
    bool keep = mean >= cfg.min_mean_word_len && mean <= cfg.max_mean_word_len;
    std::ostringstream reason;
    reason << "mean=" << mean;
    return {"mean_word_length", keep ? Verdict::KEEP : Verdict::DROP, reason.str(), mean};
}

std::string to_string(QualityBucket b) {
    switch (b) {
        case QualityBucket::LOW: return "LOW";
        case QualityBucket::MEDIUM: return "MEDIUM";
        case QualityBucket::HIGH: return "HIGH";
    }
    return "MEDIUM";
}

QualityBucket quality_bucket_from_string(std::string_view s) {
    if (s == "LOW") return QualityBucket::LOW;
    if (s == "MEDIUM") return QualityBucket::MEDIUM;
    if (s == "HIGH") return QualityBucket::HIGH;
    throw std::invalid_argument("unknown quality bucket: " + std::string(s));
}

namespace {

// Character n-grams over Unicode scalars; text shorter than n yields one
// n-gram equal to the whole text. Empty text yields none.
template <typename Fn>
void for_each_ngram(std::string_view text, int n, Fn&& fn) {
    std::u32string s = uni::decode_utf8(text);
    if (s.empty()) return;
    if (s.size() < static_cast<size_t>(n)) {
        fn(uni::encode_utf8(s));
        return;
    }
    for (size_t i = 0; i + n <= s.size(); ++i)
        fn(uni::encode_utf8(s.substr(i, static_cast<size_t>(n))));
}

// feature index -> normalized count
std::unordered_map<uint32_t, double> hashed_features(std::string_view text, const FeatureSpec& spec) {
    std::unordered_map<uint32_t, double> feats;
    uint64_t total = 0;
    for_each_ngram(text, spec.ngram_order, [&](const std::string& g) {
        feats[static_cast<uint32_t>(fnv1a64(g) % spec.dim)] += 1.0;
        ++total;
    });
    if (total > 0)
        for (auto& [_, v] : feats) v /= static_cast<double>(total);
    return feats;
}

std::array<double, 3> softmax3(const std::array<double, 3>& scores) {
    double m = std::max({scores[0], scores[1], scores[2]});
    std::array<double, 3> e{};
    double sum = 0;
    for (int c = 0; c < 3; ++c) {
        e[c] = std::exp(scores[c] - m);
        sum += e[c];
    }
    for (int c = 0; c < 3; ++c) e[c] /= sum;
    return e;
}

}  // namespace

QualityModel::QualityModel(FeatureSpec spec, uint64_t seed, std::vector<float> weights)
    : spec_(spec), seed_(seed), weights_(std::move(weights)) {
    if (weights_.size() != static_cast<size_t>(spec_.dim) * 3)
        throw std::invalid_argument("weight vector length must be dim * 3");
}

std::array<double, 3> QualityModel::class_probabilities(std::string_view text) const {
    auto feats = hashed_features(text, spec_);
    if (feats.empty()) return {1.0 / 3, 1.0 / 3, 1.0 / 3};
    std::array<double, 3> scores{};
    for (int c = 0; c < 3; ++c) {
        double s = 0;
        for (const auto& [f, v] : feats)
            s += static_cast<double>(weights_[static_cast<size_t>(c) * spec_.dim + f]) * v;
        scores[c] = s;
    }
    return softmax3(scores);
}

std::pair<QualityBucket, double> QualityModel::classify(std::string_view text) const {
    auto feats = hashed_features(text, spec_);
    if (feats.empty()) return {QualityBucket::MEDIUM, 1.0 / 3};
    auto p = class_probabilities(text);
    int best = 0;
    for (int c = 1; c < 3; ++c)
        if (p[c] > p[best]) best = c;
    return {static_cast<QualityBucket>(best), p[best]};
}

std::string QualityModel::to_text() const {
    json j;
    j["format"] = "curtok-quality";
    j["version"] = 1;
    j["ngram_order"] = spec_.ngram_order;
    j["dim"] = spec_.dim;
    j["seed"] = seed_;
    j["weights"] = weights_;
    return j.dump() + "\n";
}

QualityModel QualityModel::from_text(const std::string& serialized) {
    json j = json::parse(serialized, nullptr, false);
    if (j.is_discarded() || !j.is_object() || j.value("format", "") != "curtok-quality")
        throw std::invalid_argument("unrecognized quality model format");
    if (j.value("version", 0) != 1)
        throw std::invalid_argument("unsupported quality model version");
    FeatureSpec spec;
    spec.ngram_order = j.at("ngram_order").get<int>();
    spec.dim = j.at("dim").get<uint32_t>();
    return QualityModel(spec, j.at("seed").get<uint64_t>(),
                        j.at("weights").get<std::vector<float>>());
}

void QualityModel::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << to_text();
    if (!out) throw std::runtime_error("write failed: " + path);
}

QualityModel QualityModel::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

QualityTrainResult train_quality_classifier(
    const std::vector<std::pair<Document, QualityBucket>>& labeled, const FeatureSpec& spec,
    uint64_t seed, int epochs, double learning_rate) {
    std::array<bool, 3> present{};
    for (const auto& [_, b] : labeled) present[static_cast<int>(b)] = true;
    for (int c = 0; c < 3; ++c)
        if (!present[c])
            throw std::invalid_argument("class " + to_string(static_cast<QualityBucket>(c)) +
                                        " absent from training data");

    std::vector<std::unordered_map<uint32_t, double>> feats;
    feats.reserve(labeled.size());
    for (const auto& [doc, _] : labeled) feats.push_back(hashed_features(doc.text, spec));

    std::vector<double> w(static_cast<size_t>(spec.dim) * 3, 0.0);
    auto scores_of = [&](const std::unordered_map<uint32_t, double>& x) {
        std::array<double, 3> s{};
        for (int c = 0; c < 3; ++c)
            for (const auto& [f, v] : x) s[c] += w[static_cast<size_t>(c) * spec.dim + f] * v;
        return s;
    };

    std::vector<size_t> order(labeled.size());
    std::iota(order.begin(), order.end(), 0);
    for (int e = 0; e < epochs; ++e) {
        SplitMix64 rng(derive_seed(seed, "epoch", static_cast<uint64_t>(e)));
        rng.shuffle(order);
        for (size_t i : order) {
            if (feats[i].empty()) continue;
            auto p = softmax3(scores_of(feats[i]));
            int y = static_cast<int>(labeled[i].second);
            for (int c = 0; c < 3; ++c) {
                double g = p[c] - (c == y ? 1.0 : 0.0);
                if (g == 0.0) continue;
                for (const auto& [f, v] : feats[i])
                    w[static_cast<size_t>(c) * spec.dim + f] -= learning_rate * g * v;
            }
        }
    }

    std::vector<float> wf(w.size());
    for (size_t i = 0; i < w.size(); ++i) wf[i] = static_cast<float>(w[i]);
    QualityTrainResult result{QualityModel(spec, seed, std::move(wf)), 0.0};

    size_t correct = 0;
    for (const auto& [doc, bucket] : labeled)
        if (result.model.classify(doc.text).first == bucket) ++correct;
    result.train_accuracy =
        labeled.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(labeled.size());
    return result;
}

std::pair<QualityBucket, double> classify_quality(const QualityModel& model, const Document& doc) {
    return model.classify(doc.text);
}

std::vector<LangProfile> train_langid(const std::map<std::string, std::vector<std::string>>& corpora,
                                      int n, size_t profile_size) {
    if (n < 1) throw std::invalid_argument("n-gram order must be >= 1");
    if (profile_size < 1) throw std::invalid_argument("profile size must be >= 1");
    std::vector<LangProfile> profiles;
    for (const auto& [lang, texts] : corpora) {
        std::map<std::string, uint64_t> counts;
        uint64_t total = 0;
        for (const std::string& t : texts)
            for_each_ngram(t, n, [&](const std::string& g) {
                ++counts[g];
                ++total;
            });
        if (total == 0)
            throw std::invalid_argument("language '" + lang + "' has an empty corpus");

        std::vector<std::pair<std::string, uint64_t>> ranked(counts.begin(), counts.end());
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        if (ranked.size() > profile_size) ranked.resize(profile_size);

        uint64_t kept = 0;
        for (const auto& [_, c] : ranked) kept += c;
        LangProfile p;
        p.lang = lang;
        p.n = n;
        for (const auto& [g, c] : ranked)
            p.ngrams.emplace_back(g, static_cast<double>(c) / static_cast<double>(kept));
        profiles.push_back(std::move(p));
    }
    return profiles;
}

std::pair<std::string, double> identify_language(const std::vector<LangProfile>& profiles,
                                                 std::string_view text, double threshold) {
    if (profiles.empty()) throw std::invalid_argument("no language profiles given");

    std::unordered_map<std::string, double> freq;
    uint64_t total = 0;
    for_each_ngram(text, profiles.front().n, [&](const std::string& g) {
        freq[g] += 1.0;
        ++total;
    });
    if (total == 0) return {"unknown", 0.0};
    double doc_norm = 0;
    for (auto& [_, v] : freq) {
        v /= static_cast<double>(total);
        doc_norm += v * v;
    }
    doc_norm = std::sqrt(doc_norm);

    std::string best_lang = "unknown";
    double s1 = 0, s2 = 0;
    for (const LangProfile& p : profiles) {
        double dot = 0, pnorm = 0;
        for (const auto& [g, f] : p.ngrams) {
            pnorm += f * f;
            auto it = freq.find(g);
            if (it != freq.end()) dot += f * it->second;
        }
        double sim = (pnorm > 0 && doc_norm > 0) ? dot / (std::sqrt(pnorm) * doc_norm) : 0.0;
        if (sim > s1) {
            s2 = s1;
            s1 = sim;
            best_lang = p.lang;
        } else if (sim > s2) {
            s2 = sim;
        }
    }
    if (s1 <= 0) return {"unknown", 0.0};
    double confidence = (s1 - s2) / s1;
    if (confidence < threshold) return {"unknown", confidence};
    return {best_lang, confidence};
}

void save_langid(const std::vector<LangProfile>& profiles, const std::string& path) {
    json j;
    j["format"] = "curtok-langid";
    j["version"] = 1;
    json arr = json::array();
    for (const LangProfile& p : profiles) {
        json e;
        e["lang"] = p.lang;
        e["n"] = p.n;
        json grams = json::array();
        for (const auto& [g, f] : p.ngrams) grams.push_back(json::array({g, f}));
        e["ngrams"] = std::move(grams);
        arr.push_back(std::move(e));
    }
    j["profiles"] = std::move(arr);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(1) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<LangProfile> load_langid(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object() || j.value("format", "") != "curtok-langid")
        throw std::invalid_argument("unrecognized language profile format");
    if (j.value("version", 0) != 1)
        throw std::invalid_argument("unsupported language profile version");
    std::vector<LangProfile> profiles;
    for (const auto& e : j.at("profiles")) {
        LangProfile p;
        p.lang = e.at("lang").get<std::string>();
        p.n = e.at("n").get<int>();
        for (const auto& g : e.at("ngrams"))
            p.ngrams.emplace_back(g.at(0).get<std::string>(), g.at(1).get<double>());
        profiles.push_back(std::move(p));
    }
    return profiles;
}

namespace {

// Reverses one round of UTF-8-read-as-Latin-1 damage: every scalar must fit
// in a byte, at least one must be non-ASCII, and the reassembled bytes must
// themselves be valid UTF-8.
bool latin1_reverse(const std::u32string& scalars, std::string& out) {
    std::string bytes;
    bytes.reserve(scalars.size());
    bool non_ascii = false;
    for (char32_t c : scalars) {
        if (c > 0xFF) return false;
        if (c >= 0x80) non_ascii = true;
        bytes.push_back(static_cast<char>(c));
    }
    if (!non_ascii || !uni::valid_utf8(bytes)) return false;
    out = std::move(bytes);
    return true;
}

std::string repair_mojibake(std::string s) {
    for (;;) {
        std::string rev;
        if (!latin1_reverse(uni::decode_utf8(s), rev) || rev == s) return s;
        s = std::move(rev);  // strictly shorter, so this loop is bounded
    }
}

}  // namespace

std::pair<std::string, bool> reformat_unicode(std::string_view text) {
    std::string original(text);
    // Ill-formed sequences become U+FFFD before any other processing.
    std::string cur = uni::encode_utf8(uni::decode_utf8(original));
    for (;;) {
        std::string next = uni::nfc_utf8(repair_mojibake(cur));
        if (next == cur) break;
        cur = std::move(next);
    }
    return {cur, cur != original};
}

}  // namespace curtok
