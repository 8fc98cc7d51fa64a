#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "curtok/corpus.hpp"

namespace curtok {

struct HeuristicConfig {
    uint64_t min_words = 50;
    uint64_t max_words = 100000;
    double min_mean_word_len = 2.0;
    double max_mean_word_len = 15.0;

    void validate() const;  // min <= max for both pairs
};

// KEEP iff whitespace-delimited word count is within [min_words, max_words].
StageDecision word_count_filter(const Document& doc, const HeuristicConfig& cfg);

// KEEP iff mean scalars-per-word is within [min_mean_word_len, max_mean_word_len].
// Zero-word documents are DROP(empty).
StageDecision mean_word_length_filter(const Document& doc, const HeuristicConfig& cfg);

enum class QualityBucket { LOW, MEDIUM, HIGH };
std::string to_string(QualityBucket b);
QualityBucket quality_bucket_from_string(std::string_view s);

struct FeatureSpec {
    int ngram_order = 3;
    uint32_t dim = 1u << 18;

    bool operator==(const FeatureSpec&) const = default;
};

// Hashed character n-gram multinomial logistic model over LOW/MEDIUM/HIGH.
// No bias term: a document with zero features scores uniformly.
class QualityModel {
public:
    QualityModel() = default;
    QualityModel(FeatureSpec spec, uint64_t seed, std::vector<float> weights);

    const FeatureSpec& spec() const { return spec_; }
    uint64_t seed() const { return seed_; }
    const std::vector<float>& weights() const { return weights_; }

    std::array<double, 3> class_probabilities(std::string_view text) const;
    std::pair<QualityBucket, double> classify(std::string_view text) const;

    std::string to_text() const;
    static QualityModel from_text(const std::string& serialized);
    void save(const std::string& path) const;
    static QualityModel load(const std::string& path);

private:
    FeatureSpec spec_;
    uint64_t seed_ = 0;
    std::vector<float> weights_;  // class-major, size dim * 3
};

struct QualityTrainResult {
    QualityModel model;
    double train_accuracy = 0.0;
};

// Deterministic for fixed (data order, seed). Every bucket must appear in
// the training data.
QualityTrainResult train_quality_classifier(
    const std::vector<std::pair<Document, QualityBucket>>& labeled, const FeatureSpec& spec,
    uint64_t seed, int epochs = 10, double learning_rate = 0.5);

std::pair<QualityBucket, double> classify_quality(const QualityModel& model, const Document& doc);

struct LangProfile {
    std::string lang;
    int n = 3;
    // Top-K n-grams with frequencies normalized to sum 1, ordered by
    // descending frequency, ties by n-gram bytes.
    std::vector<std::pair<std::string, double>> ngrams;
};

std::vector<LangProfile> train_langid(const std::map<std::string, std::vector<std::string>>& corpora,
                                      int n = 3, size_t profile_size = 300);

inline constexpr double kDefaultLangidThreshold = 0.65;

// Cosine similarity against each profile; confidence is the margin between
// the best and runner-up similarity, normalized by the best. Below the
// threshold the result is ("unknown", confidence).
std::pair<std::string, double> identify_language(const std::vector<LangProfile>& profiles,
                                                 std::string_view text,
                                                 double threshold = kDefaultLangidThreshold);

void save_langid(const std::vector<LangProfile>& profiles, const std::string& path);
std::vector<LangProfile> load_langid(const std::string& path);

// NFC normalization plus repair of Latin-1 double-encoding artifacts.
// Idempotent; unrepairable text passes through with changed=false.
std::pair<std::string, bool> reformat_unicode(std::string_view text);

}  // namespace curtok
