#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "curtok/corpus.hpp"
#include "curtok/tokenizer.hpp"

namespace curtok {

using LangMap = std::map<std::string, double>;

struct OptimizerConfig {
    double mu = 0.3;        // momentum, (0,1]
    double epsilon = 0.01;  // weight smoothing, > 0
    double f_best = 1.0;    // ideal fertility
    uint64_t total_chars = 100000;  // per-iteration character budget T
    int iterations = 5;
    uint64_t seed = 0;
    BpeTrainConfig bpe;

    void validate() const;
};

struct IterationRecord {
    int n = 0;
    LangMap fertility;  // f_l measured this iteration
    LangMap deficit;    // delta_l
    LangMap weight;     // w_l = max(delta_l, 0) + epsilon
    LangMap target;     // t_l
    LangMap mixture;    // m_l after the momentum update
    std::map<std::string, uint64_t> chars;  // C_l for the next sample
};

struct MixtureState {
    int iteration = 0;
    LangMap mixture;  // sums to 1
    std::vector<IterationRecord> history;
};

// delta_l = (f_l - f_best) / (max f - min f); all zero when the range is 0.
LangMap normalized_deficit(const LangMap& fertility, double f_best);

// t_l proportional to max(delta_l, 0) + epsilon. Deficits below zero are
// clamped so weights stay positive.
LangMap target_shares(const LangMap& deficit, double epsilon);

// m_l = (1 - mu) * m_prev_l + mu * t_l
LangMap momentum_update(const LangMap& m_prev, const LangMap& target, double mu);

// C_l = round(m_l * T), then largest-remainder correction so the sum is
// exactly T. Ties resolve in language order.
std::map<std::string, uint64_t> allocate_characters(const LangMap& mixture, uint64_t total_chars);

struct SampleResult {
    std::string text;
    uint64_t scalar_count = 0;
    bool exhausted = false;  // corpus ran out before the budget
};

// Whole documents in seeded-shuffled order until the scalar budget is met;
// the last document is cut at the first whitespace at or after the budget.
SampleResult sample_characters(const std::vector<Document>& corpus, uint64_t budget,
                               uint64_t seed);

// Measures per-language fertility for one iteration's samples. The default
// implementation trains a tokenizer on the mixed sample and measures on
// held-out corpora; tests inject frozen or scripted fertilities.
class FertilityEvaluator {
public:
    virtual ~FertilityEvaluator() = default;
    virtual LangMap evaluate(const std::map<std::string, std::string>& samples) = 0;
};

class BpeFertilityEvaluator : public FertilityEvaluator {
public:
    BpeFertilityEvaluator(BpeTrainConfig cfg, std::map<std::string, std::vector<Document>> eval_corpora);
    LangMap evaluate(const std::map<std::string, std::string>& samples) override;

private:
    BpeTrainConfig cfg_;
    std::map<std::string, std::vector<Document>> eval_corpora_;
};

MixtureState run_mixture_loop(const std::map<std::string, std::vector<Document>>& corpora,
                              const OptimizerConfig& cfg, FertilityEvaluator& evaluator);

// Trains on each iteration's mixed sample and evaluates on eval_corpora.
MixtureState run_mixture_loop(const std::map<std::string, std::vector<Document>>& corpora,
                              const std::map<std::string, std::vector<Document>>& eval_corpora,
                              const OptimizerConfig& cfg);

// One record per iteration with n, f, delta, w, t, m, C. Line-delimited.
std::string trajectory_to_jsonl(const MixtureState& state);

}  // namespace curtok
