#include "curtok/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "curtok/hash.hpp"
#include "curtok/unicode.hpp"

namespace curtok {

using json = nlohmann::json;

void OptimizerConfig::validate() const {
    if (!(mu > 0.0 && mu <= 1.0)) throw std::invalid_argument("mu must be in (0, 1]");
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (total_chars < 1) throw std::invalid_argument("total_chars must be >= 1");
    if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
}

LangMap normalized_deficit(const LangMap& fertility, double f_best) {
    if (fertility.empty()) throw std::invalid_argument("no languages to rebalance");
    double lo = fertility.begin()->second, hi = lo;
    for (const auto& [_, f] : fertility) {
        lo = std::min(lo, f);
        hi = std::max(hi, f);
    }
    double range = hi - lo;
    LangMap delta;
    for (const auto& [lang, f] : fertility)
        delta[lang] = range > 0.0 ? (f - f_best) / range : 0.0;
    return delta;
}

LangMap target_shares(const LangMap& deficit, double epsilon) {
    if (deficit.empty()) throw std::invalid_argument("no languages to rebalance");
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    LangMap weights;
    double sum = 0.0;
    for (const auto& [lang, d] : deficit) {
        double w = std::max(d, 0.0) + epsilon;
        weights[lang] = w;
        sum += w;
    }
    if (!(sum > 0.0)) throw std::invalid_argument("weights sum to zero");
    for (auto& [_, w] : weights) w /= sum;
    return weights;
}

LangMap momentum_update(const LangMap& m_prev, const LangMap& target, double mu) {
    if (m_prev.size() != target.size())
        throw std::invalid_argument("mixture and target cover different language sets");
    LangMap m;
    for (const auto& [lang, prev] : m_prev) {
        auto it = target.find(lang);
        if (it == target.end())
            throw std::invalid_argument("language '" + lang + "' missing from target shares");
        m[lang] = (1.0 - mu) * prev + mu * it->second;
    }
    return m;
}

std::map<std::string, uint64_t> allocate_characters(const LangMap& mixture, uint64_t total_chars) {
    if (mixture.empty()) throw std::invalid_argument("no languages to allocate");
    if (total_chars < 1) throw std::invalid_argument("total_chars must be >= 1");

    struct Cell {
        std::string lang;
        int64_t count;
        double remainder;  // exact share minus rounded count
    };
    std::vector<Cell> cells;
    int64_t sum = 0;
    for (const auto& [lang, m] : mixture) {
        double exact = m * static_cast<double>(total_chars);
        int64_t c = std::llround(exact);
        cells.push_back({lang, c, exact - static_cast<double>(c)});
        sum += c;
    }
    int64_t diff = static_cast<int64_t>(total_chars) - sum;
    if (diff > 0) {
        // Most under-served first; ties in language order.
        std::stable_sort(cells.begin(), cells.end(),
                         [](const Cell& a, const Cell& b) { return a.remainder > b.remainder; });
        for (int64_t i = 0; i < diff; ++i) ++cells[static_cast<size_t>(i % cells.size())].count;
    } else if (diff < 0) {
        std::stable_sort(cells.begin(), cells.end(),
                         [](const Cell& a, const Cell& b) { return a.remainder < b.remainder; });
        int64_t left = -diff;
        for (size_t i = 0; left > 0; i = (i + 1) % cells.size())
            if (cells[i].count > 0) {
                --cells[i].count;
                --left;
            }
    }
    std::map<std::string, uint64_t> out;
    for (const Cell& c : cells) out[c.lang] = static_cast<uint64_t>(c.count);
    return out;
}

SampleResult sample_characters(const std::vector<Document>& corpus, uint64_t budget,
                               uint64_t seed) {
    SampleResult result;
    if (budget == 0) return result;
    if (corpus.empty()) throw std::invalid_argument("cannot sample from an empty corpus");

    std::vector<size_t> order(corpus.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    SplitMix64 rng(seed);
    rng.shuffle(order);

    std::u32string sample;
    for (size_t idx : order) {
        if (result.scalar_count >= budget) break;
        std::u32string doc = uni::decode_utf8(corpus[idx].text);
        if (!sample.empty()) {
            sample.push_back(U'\n');
            ++result.scalar_count;
        }
        uint64_t need = budget - result.scalar_count;
        if (doc.size() <= need) {
            sample.append(doc);
            result.scalar_count += doc.size();
            continue;
        }
        // Cut at the first whitespace at or after the budget so the tail
        // word stays whole.
        size_t cut = static_cast<size_t>(need);
        while (cut < doc.size() && !uni::is_whitespace(doc[cut])) ++cut;
        sample.append(doc.substr(0, cut));
        result.scalar_count += cut;
    }
    result.exhausted = result.scalar_count < budget;
    result.text = uni::encode_utf8(sample);
    return result;
}

BpeFertilityEvaluator::BpeFertilityEvaluator(BpeTrainConfig cfg,
                                             std::map<std::string, std::vector<Document>> eval_corpora)
    : cfg_(std::move(cfg)), eval_corpora_(std::move(eval_corpora)) {}

LangMap BpeFertilityEvaluator::evaluate(const std::map<std::string, std::string>& samples) {
    std::vector<std::string> texts;
    texts.reserve(samples.size());
    for (const auto& [_, text] : samples) texts.push_back(text);
    TokenizerModel model = train_bpe(texts, cfg_);

    LangMap fertility;
    for (const auto& [lang, docs] : eval_corpora_) {
        uint64_t words = 0, tokens = 0;
        for (const Document& d : docs) {
            words += uni::word_count(d.text);
            tokens += model.encode(d.text).size();
        }
        if (words == 0)
            throw std::invalid_argument("eval corpus for '" + lang + "' has no words");
        fertility[lang] = static_cast<double>(tokens) / static_cast<double>(words);
    }
    return fertility;
}

MixtureState run_mixture_loop(const std::map<std::string, std::vector<Document>>& corpora,
                              const OptimizerConfig& cfg, FertilityEvaluator& evaluator) {
    cfg.validate();
    if (corpora.empty()) throw std::invalid_argument("no languages to rebalance");
    if (cfg.total_chars < corpora.size())
        throw std::invalid_argument("total_chars must be at least the language count");

    MixtureState state;
    for (const auto& [lang, _] : corpora)
        state.mixture[lang] = 1.0 / static_cast<double>(corpora.size());
    std::map<std::string, uint64_t> chars = allocate_characters(state.mixture, cfg.total_chars);

    for (int n = 1; n <= cfg.iterations; ++n) {
        std::map<std::string, std::string> samples;
        for (const auto& [lang, docs] : corpora)
            samples[lang] =
                sample_characters(docs, chars.at(lang), derive_seed(cfg.seed, lang, n)).text;

        IterationRecord rec;
        rec.n = n;
        rec.fertility = evaluator.evaluate(samples);
        if (rec.fertility.size() != state.mixture.size())
            throw std::invalid_argument("evaluator returned a different language set");
        rec.deficit = normalized_deficit(rec.fertility, cfg.f_best);
        for (const auto& [lang, d] : rec.deficit)
            rec.weight[lang] = std::max(d, 0.0) + cfg.epsilon;
        rec.target = target_shares(rec.deficit, cfg.epsilon);
        rec.mixture = momentum_update(state.mixture, rec.target, cfg.mu);
        rec.chars = allocate_characters(rec.mixture, cfg.total_chars);

        state.mixture = rec.mixture;
        state.iteration = n;
        chars = rec.chars;
        state.history.push_back(std::move(rec));
    }
    return state;
}

MixtureState run_mixture_loop(const std::map<std::string, std::vector<Document>>& corpora,
                              const std::map<std::string, std::vector<Document>>& eval_corpora,
                              const OptimizerConfig& cfg) {
    BpeFertilityEvaluator evaluator(cfg.bpe, eval_corpora);
    return run_mixture_loop(corpora, cfg, evaluator);
}

std::string trajectory_to_jsonl(const MixtureState& state) {
    std::string out;
    for (const IterationRecord& rec : state.history) {
        json j;
        j["n"] = rec.n;
        j["f"] = rec.fertility;
        j["delta"] = rec.deficit;
        j["w"] = rec.weight;
        j["t"] = rec.target;
        j["m"] = rec.mixture;
        j["c"] = rec.chars;
        out += j.dump();
        out += '\n';
    }
    return out;
}

}  // namespace curtok
