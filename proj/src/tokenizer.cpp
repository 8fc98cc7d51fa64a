#include "curtok/tokenizer.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "curtok/corpus.hpp"
#include "curtok/unicode.hpp"

namespace curtok {

using json = nlohmann::json;

std::vector<Piece> pretokenize(const std::u32string& scalars, const PretokConfig& cfg) {
    std::vector<Piece> pieces;
    std::optional<Piece> cur;
    auto flush = [&] {
        if (cur) {
            pieces.push_back(std::move(*cur));
            cur.reset();
        }
    };
    for (char32_t c : scalars) {
        if (cfg.split_whitespace && c == U' ') {
            flush();
            cur = Piece{true, {}};
            continue;
        }
        if (cfg.split_whitespace && uni::is_whitespace(c)) {
            flush();
            pieces.push_back(Piece{false, std::u32string(1, c)});
            continue;
        }
        if (cfg.split_digits && uni::is_decimal_digit(c)) {
            if (cur && cur->space_prefix && cur->content.empty()) {
                cur->content.push_back(c);
                flush();
            } else {
                flush();
                pieces.push_back(Piece{false, std::u32string(1, c)});
            }
            continue;
        }
        if (!cur) cur = Piece{false, {}};
        cur->content.push_back(c);
    }
    flush();
    return pieces;
}

std::u32string detokenize(const std::vector<Piece>& pieces) {
    std::u32string out;
    for (const Piece& p : pieces) {
        if (p.space_prefix) out.push_back(U' ');
        out.append(p.content);
    }
    return out;
}

std::vector<std::string> pretokenize_display(std::string_view text, const PretokConfig& cfg) {
    std::vector<std::string> out;
    for (const Piece& p : pretokenize(uni::decode_utf8(text), cfg)) {
        std::u32string s;
        if (p.space_prefix) s.push_back(kSpaceMarker);
        s.append(p.content);
        out.push_back(uni::encode_utf8(s));
    }
    return out;
}

std::set<char32_t> collect_seed_alphabet(const std::vector<std::string>& texts) {
    std::set<char32_t> out;
    for (const std::string& t : texts)
        for (char32_t c : uni::decode_utf8(t)) out.insert(c);
    return out;
}

std::set<char32_t> collect_seed_alphabet(const std::vector<Document>& docs) {
    std::set<char32_t> out;
    for (const Document& d : docs)
        for (char32_t c : uni::decode_utf8(d.text)) out.insert(c);
    return out;
}

std::string TokenizerModel::byte_token_name(uint8_t byte) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "<0x%02X>", byte);
    return buf;
}

TokenizerModel::TokenizerModel(std::vector<std::string> specials, std::set<char32_t> seed_alphabet,
                               std::vector<std::pair<std::string, std::string>> merges,
                               PretokConfig pretok, size_t vocab_limit, std::string name)
    : name_(std::move(name)),
      vocab_limit_(vocab_limit),
      pretok_(pretok),
      specials_(std::move(specials)),
      seed_alphabet_(std::move(seed_alphabet)),
      merges_(std::move(merges)) {
    seed_alphabet_.insert(kSpaceMarker);
    for (const std::string& s : specials_) vocab_.push_back(s);
    for (int b = 0; b < 256; ++b) vocab_.push_back(byte_token_name(static_cast<uint8_t>(b)));
    std::set<std::string> seen(vocab_.begin(), vocab_.end());
    for (char32_t c : seed_alphabet_) {
        std::string tok = uni::encode_utf8(std::u32string(1, c));
        if (seen.insert(tok).second) vocab_.push_back(tok);
    }
    for (const auto& [l, r] : merges_) {
        std::string tok = l + r;
        if (seen.insert(tok).second) vocab_.push_back(tok);
    }
    if (vocab_limit_ == 0) vocab_limit_ = vocab_.size();
    if (vocab_.size() > vocab_limit_)
        throw std::invalid_argument("vocabulary exceeds its limit: " +
                                    std::to_string(vocab_.size()) + " > " +
                                    std::to_string(vocab_limit_));
    rebuild_index();
}

void TokenizerModel::rebuild_index() {
    token_to_id_.clear();
    token_to_id_.reserve(vocab_.size());
    for (size_t i = 0; i < vocab_.size(); ++i) token_to_id_.emplace(vocab_[i], static_cast<int>(i));
    byte_base_ = static_cast<int>(specials_.size());
    marker_id_ = token_id(uni::encode_utf8(std::u32string(1, kSpaceMarker)));
    merge_rank_.clear();
    for (size_t rank = 0; rank < merges_.size(); ++rank) {
        const auto& [l, r] = merges_[rank];
        int li = token_id(l), ri = token_id(r), mi = token_id(l + r);
        if (li < 0 || ri < 0 || mi < 0)
            throw std::invalid_argument("merge references a token missing from the vocabulary: (" +
                                        l + ", " + r + ")");
        merge_rank_.emplace(std::make_pair(li, ri), std::make_pair(static_cast<int>(rank), mi));
    }
}

int TokenizerModel::token_id(std::string_view token) const {
    auto it = token_to_id_.find(std::string(token));
    return it == token_to_id_.end() ? -1 : it->second;
}

bool TokenizerModel::is_byte_token(int id) const {
    return id >= byte_base_ && id < byte_base_ + 256;
}

std::vector<int> TokenizerModel::symbolize(const Piece& piece) const {
    std::vector<int> syms;
    auto push_bytes = [&](const std::string& utf8) {
        for (unsigned char b : utf8) syms.push_back(byte_base_ + b);
    };
    if (piece.space_prefix) syms.push_back(marker_id_);
    for (char32_t c : piece.content) {
        if (c == kSpaceMarker) {
            push_bytes(uni::encode_utf8(std::u32string(1, c)));
            continue;
        }
        if (c == U' ') {
            syms.push_back(marker_id_);
            continue;
        }
        std::string tok = uni::encode_utf8(std::u32string(1, c));
        int id = token_id(tok);
        if (id >= 0)
            syms.push_back(id);
        else
            push_bytes(tok);
    }
    return syms;
}

std::vector<int> TokenizerModel::encode_piece(const Piece& piece) const {
    std::vector<int> syms = symbolize(piece);
    if (merge_rank_.empty()) return syms;
    while (syms.size() >= 2) {
        int best_rank = std::numeric_limits<int>::max();
        size_t best_pos = 0;
        int best_id = -1;
        for (size_t i = 0; i + 1 < syms.size(); ++i) {
            auto it = merge_rank_.find({syms[i], syms[i + 1]});
            if (it != merge_rank_.end() && it->second.first < best_rank) {
                best_rank = it->second.first;
                best_pos = i;
                best_id = it->second.second;
            }
        }
        if (best_id < 0) break;
        syms[best_pos] = best_id;
        syms.erase(syms.begin() + static_cast<ptrdiff_t>(best_pos) + 1);
    }
    return syms;
}

std::vector<int> TokenizerModel::encode(std::string_view text) const {
    std::vector<int> out;
    for (const Piece& p : pretokenize(uni::decode_utf8(text), pretok_)) {
        std::vector<int> ids = encode_piece(p);
        out.insert(out.end(), ids.begin(), ids.end());
    }
    return out;
}

std::string TokenizerModel::decode(const std::vector<int>& ids) const {
    std::string bytes;
    for (int id : ids) {
        if (id < 0 || id >= static_cast<int>(vocab_.size()))
            throw std::out_of_range("token id out of range: " + std::to_string(id));
        if (is_byte_token(id)) {
            bytes.push_back(static_cast<char>(id - byte_base_));
            continue;
        }
        for (char32_t c : uni::decode_utf8(vocab_[id]))
            uni::append_utf8(bytes, c == kSpaceMarker ? U' ' : c);
    }
    // Stray byte tokens may leave invalid sequences; those become U+FFFD.
    return uni::encode_utf8(uni::decode_utf8(bytes));
}

std::string TokenizerModel::to_text() const {
    json j;
    j["format"] = "curtok-bpe";
    j["version"] = 1;
    j["name"] = name_;
    j["vocab_limit"] = vocab_limit_;
    j["pretok"] = {{"split_whitespace", pretok_.split_whitespace},
                   {"split_digits", pretok_.split_digits}};
    j["specials"] = specials_;
    json seed = json::array();
    for (char32_t c : seed_alphabet_) seed.push_back(uni::encode_utf8(std::u32string(1, c)));
    j["seed_alphabet"] = std::move(seed);
    j["vocab"] = vocab_;
    json merges = json::array();
    for (const auto& [l, r] : merges_) merges.push_back(json::array({l, r}));
    j["merges"] = std::move(merges);
    return j.dump(1) + "\n";
}

TokenizerModel TokenizerModel::from_text(const std::string& serialized) {
    json j = json::parse(serialized, nullptr, false);
    if (j.is_discarded()) throw std::invalid_argument("tokenizer model is not valid JSON");
    if (!j.is_object() || j.value("format", "") != "curtok-bpe")
        throw std::invalid_argument("unrecognized tokenizer model format");
    if (j.value("version", 0) != 1)
        throw std::invalid_argument("unsupported tokenizer model version");

    TokenizerModel m;
    m.name_ = j.value("name", "bpe");
    m.vocab_limit_ = j.at("vocab_limit").get<size_t>();
    m.pretok_.split_whitespace = j.at("pretok").at("split_whitespace").get<bool>();
    m.pretok_.split_digits = j.at("pretok").at("split_digits").get<bool>();
    m.specials_ = j.at("specials").get<std::vector<std::string>>();
    for (const auto& s : j.at("seed_alphabet")) {
        std::u32string u = uni::decode_utf8(s.get<std::string>());
        if (u.size() != 1)
            throw std::invalid_argument("seed alphabet entries must be single scalars");
        m.seed_alphabet_.insert(u[0]);
    }
    m.vocab_ = j.at("vocab").get<std::vector<std::string>>();
    for (const auto& e : j.at("merges")) {
        if (!e.is_array() || e.size() != 2)
            throw std::invalid_argument("merges must be [left, right] pairs");
        m.merges_.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }

    if (m.vocab_.size() > m.vocab_limit_)
        throw std::invalid_argument("vocabulary exceeds its declared limit");
    std::set<std::string> uniq(m.vocab_.begin(), m.vocab_.end());
    if (uniq.size() != m.vocab_.size())
        throw std::invalid_argument("vocabulary contains duplicate tokens");
    for (int b = 0; b < 256; ++b)
        if (!uniq.count(byte_token_name(static_cast<uint8_t>(b))))
            throw std::invalid_argument("vocabulary is missing byte token " +
                                        byte_token_name(static_cast<uint8_t>(b)));
    for (char32_t c : m.seed_alphabet_)
        if (!uniq.count(uni::encode_utf8(std::u32string(1, c))))
            throw std::invalid_argument("vocabulary is missing a seed alphabet token");
    // Merge list must be a valid derivation order: each side is a seed
    // scalar (the marker rides in the seed set) or the output of an earlier
    // merge. Byte tokens and specials never merge.
    std::set<std::string> derivable;
    for (char32_t c : m.seed_alphabet_) derivable.insert(uni::encode_utf8(std::u32string(1, c)));
    for (const auto& [l, r] : m.merges_) {
        if (!derivable.count(l) || !derivable.count(r))
            throw std::invalid_argument("merge (" + l + ", " + r +
                                        ") uses a token not derivable at that point");
        if (!uniq.count(l + r))
            throw std::invalid_argument("merge output missing from vocabulary: " + l + r);
        derivable.insert(l + r);
    }
    m.rebuild_index();
    return m;
}

void TokenizerModel::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << to_text();
    if (!out) throw std::runtime_error("write failed: " + path);
}

TokenizerModel TokenizerModel::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

namespace {

struct HeapEntry {
    int64_t count;
    std::pair<int, int> pair;
};

}  // namespace

TokenizerModel train_bpe(const std::vector<std::string>& texts, const BpeTrainConfig& cfg,
                         const std::set<char32_t>& seed_alphabet) {
    TokenizerModel model(cfg.specials, seed_alphabet, {}, cfg.pretok,
                         std::numeric_limits<size_t>::max(), cfg.name);
    size_t floor = model.vocab_.size();
    if (cfg.vocab_size < floor)
        throw std::invalid_argument(
            "vocab_size " + std::to_string(cfg.vocab_size) +
            " is below the floor of specials + byte tokens + seed alphabet (" +
            std::to_string(floor) + ")");

    // Unique piece -> (symbol sequence, occurrence count).
    std::vector<std::vector<int>> seqs;
    std::vector<int64_t> seq_count;
    {
        std::map<std::pair<bool, std::u32string>, int64_t> piece_counts;
        for (const std::string& t : texts)
            for (Piece& p : pretokenize(uni::decode_utf8(t), cfg.pretok))
                ++piece_counts[{p.space_prefix, std::move(p.content)}];
        for (const auto& [key, n] : piece_counts) {
            seqs.push_back(model.symbolize(Piece{key.first, key.second}));
            seq_count.push_back(n);
        }
    }

    using Pair = std::pair<int, int>;
    std::unordered_map<Pair, int64_t, TokenizerModel::PairHash> pair_count;
    std::unordered_map<Pair, std::set<size_t>, TokenizerModel::PairHash> pair_pieces;

    auto cmp = [&](const HeapEntry& a, const HeapEntry& b) {
        if (a.count != b.count) return a.count < b.count;
        if (model.vocab_[a.pair.first] != model.vocab_[b.pair.first])
            return model.vocab_[a.pair.first] > model.vocab_[b.pair.first];
        return model.vocab_[a.pair.second] > model.vocab_[b.pair.second];
    };
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, decltype(cmp)> heap(cmp);

    // Every count change pushes a fresh heap entry; stale entries are
    // skipped on pop by comparing against the live count. Byte fallback
    // tokens are terminal: merging them would concatenate their "<0xHH>"
    // names into strings decode cannot map back to raw bytes.
    auto bump = [&](Pair p, size_t piece, int64_t delta) {
        if (model.is_byte_token(p.first) || model.is_byte_token(p.second)) return;
        auto it = pair_count.try_emplace(p, 0).first;
        it->second += delta;
        if (delta > 0) pair_pieces[p].insert(piece);
        if (it->second > 0) {
            heap.push({it->second, p});
        } else {
            pair_count.erase(it);
            pair_pieces.erase(p);
        }
    };
    for (size_t i = 0; i < seqs.size(); ++i)
        for (size_t k = 0; k + 1 < seqs[i].size(); ++k)
            bump({seqs[i][k], seqs[i][k + 1]}, i, seq_count[i]);

    int64_t min_count = static_cast<int64_t>(std::max<size_t>(cfg.min_pair_count, 1));
    while (model.vocab_.size() < cfg.vocab_size && !heap.empty()) {
        HeapEntry top = heap.top();
        heap.pop();
        auto it = pair_count.find(top.pair);
        if (it == pair_count.end() || it->second != top.count) continue;  // stale
        if (top.count < min_count) break;

        const std::string left = model.vocab_[top.pair.first];
        const std::string right = model.vocab_[top.pair.second];
        std::string merged = left + right;
        int merged_id = model.token_id(merged);
        if (merged_id < 0) {
            merged_id = static_cast<int>(model.vocab_.size());
            model.vocab_.push_back(merged);
            model.token_to_id_.emplace(merged, merged_id);
        }
        model.merges_.emplace_back(left, right);

        std::set<size_t> touched;
        touched.swap(pair_pieces[top.pair]);
        for (size_t pi : touched) {
            std::vector<int>& seq = seqs[pi];
            for (size_t k = 0; k + 1 < seq.size(); ++k)
                bump({seq[k], seq[k + 1]}, pi, -seq_count[pi]);
            std::vector<int> next;
            next.reserve(seq.size());
            for (size_t k = 0; k < seq.size();) {
                if (k + 1 < seq.size() && seq[k] == top.pair.first &&
                    seq[k + 1] == top.pair.second) {
                    next.push_back(merged_id);
                    k += 2;
                } else {
                    next.push_back(seq[k]);
                    ++k;
                }
            }
            seq = std::move(next);
            for (size_t k = 0; k + 1 < seq.size(); ++k)
                bump({seq[k], seq[k + 1]}, pi, seq_count[pi]);
        }
    }

    return TokenizerModel(cfg.specials, seed_alphabet, std::move(model.merges_), cfg.pretok,
                          cfg.vocab_size, cfg.name);
}

TokenizerModel train_bpe(const std::vector<std::string>& texts, const BpeTrainConfig& cfg) {
    return train_bpe(texts, cfg, collect_seed_alphabet(texts));
}

TokenizerModel byte_fallback_model(const PretokConfig& cfg, std::string name) {
    return TokenizerModel({}, {}, {}, cfg, 0, std::move(name));
}

FertilityReport measure_fertility(const TokenizerModel& model, const std::vector<Document>& docs,
                                  const std::string& corpus_id) {
    FertilityReport report;
    report.corpus_id = corpus_id;
    report.tokenizer_id = model.name();
    std::map<std::string, FertilityEntry> acc;
    for (const Document& d : docs) {
        if (!d.lang || d.lang->empty())
            throw std::invalid_argument("document '" + d.id + "' has no lang tag");
        FertilityEntry& e = acc[*d.lang];
        e.words += uni::word_count(d.text);
        e.tokens += model.encode(d.text).size();
    }
    for (auto& [lang, e] : acc) {
        if (e.words == 0) {
            report.warnings.push_back("language '" + lang + "' has zero words; omitted");
            continue;
        }
        e.fertility = static_cast<double>(e.tokens) / static_cast<double>(e.words);
        report.by_lang.emplace(lang, e);
    }
    return report;
}

}  // namespace curtok
