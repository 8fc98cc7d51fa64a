#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace curtok {

struct Document;

// Whitespace marker used in token strings; a leading U+2581 denotes the
// space that preceded the piece. Literal U+2581 in input text always
// encodes through byte fallback so decoding stays unambiguous.
inline constexpr char32_t kSpaceMarker = U'▁';

struct PretokConfig {
    bool split_whitespace = true;
    bool split_digits = true;

    bool operator==(const PretokConfig&) const = default;
};

// One pre-tokenized piece. space_prefix records a single U+0020 consumed
// before the content; other whitespace scalars form their own pieces.
struct Piece {
    bool space_prefix = false;
    std::u32string content;

    bool operator==(const Piece&) const = default;
};

std::vector<Piece> pretokenize(const std::u32string& scalars, const PretokConfig& cfg);
std::u32string detokenize(const std::vector<Piece>& pieces);

// Marker-rendered piece strings ("hi there" -> ["hi", "▁there"]).
std::vector<std::string> pretokenize_display(std::string_view text, const PretokConfig& cfg);

std::set<char32_t> collect_seed_alphabet(const std::vector<std::string>& texts);
std::set<char32_t> collect_seed_alphabet(const std::vector<Document>& docs);

class TokenizerModel {
public:
    TokenizerModel() = default;

    // Assembles the vocabulary from its parts: specials, the 256 byte
    // tokens, the space marker, the seed alphabet (sorted by code point),
    // then one entry per merge output (reused if the string already exists).
    TokenizerModel(std::vector<std::string> specials, std::set<char32_t> seed_alphabet,
                   std::vector<std::pair<std::string, std::string>> merges, PretokConfig pretok,
                   size_t vocab_limit, std::string name = "bpe");

    const std::string& name() const { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }
    size_t vocab_size() const { return vocab_.size(); }
    size_t vocab_limit() const { return vocab_limit_; }
    const std::vector<std::string>& vocab() const { return vocab_; }
    const std::vector<std::pair<std::string, std::string>>& merges() const { return merges_; }
    const std::set<char32_t>& seed_alphabet() const { return seed_alphabet_; }
    const PretokConfig& pretok() const { return pretok_; }
    const std::vector<std::string>& specials() const { return specials_; }

    int token_id(std::string_view token) const;  // -1 when absent
    bool is_byte_token(int id) const;
    static std::string byte_token_name(uint8_t byte);

    std::vector<int> encode(std::string_view text) const;
    std::vector<int> encode_piece(const Piece& piece) const;
    std::string decode(const std::vector<int>& ids) const;

    std::string to_text() const;
    static TokenizerModel from_text(const std::string& serialized);
    void save(const std::string& path) const;
    static TokenizerModel load(const std::string& path);

private:
    friend TokenizerModel train_bpe(const std::vector<std::string>&, const struct BpeTrainConfig&,
                                    const std::set<char32_t>&);

    void rebuild_index();
    std::vector<int> symbolize(const Piece& piece) const;

    std::string name_ = "bpe";
    size_t vocab_limit_ = 0;
    PretokConfig pretok_;
    std::vector<std::string> specials_;
    std::set<char32_t> seed_alphabet_;
    std::vector<std::string> vocab_;
    std::vector<std::pair<std::string, std::string>> merges_;

    std::unordered_map<std::string, int> token_to_id_;
    int byte_base_ = 0;
    int marker_id_ = -1;
    struct PairHash {
        size_t operator()(const std::pair<int, int>& p) const {
            return (static_cast<size_t>(p.first) << 32) ^ static_cast<uint32_t>(p.second);
        }
    };
    // (left id, right id) -> (rank, merged id)
    std::unordered_map<std::pair<int, int>, std::pair<int, int>, PairHash> merge_rank_;
};

struct BpeTrainConfig {
    size_t vocab_size = 128000;
    PretokConfig pretok;
    std::vector<std::string> specials;
    size_t min_pair_count = 2;
    std::string name = "bpe";
};

// Greedy highest-count pair merging; ties broken by lexicographically
// smallest (left, right) token strings. Deterministic for a fixed corpus.
TokenizerModel train_bpe(const std::vector<std::string>& texts, const BpeTrainConfig& cfg,
                         const std::set<char32_t>& seed_alphabet);
TokenizerModel train_bpe(const std::vector<std::string>& texts, const BpeTrainConfig& cfg);

// No merges, empty seed alphabet: everything but spaces goes through byte
// fallback. Useful as a fertility baseline and for exact token-count tests.
TokenizerModel byte_fallback_model(const PretokConfig& cfg = {}, std::string name = "byte-fallback");

struct FertilityEntry {
    double fertility = 0.0;
    uint64_t words = 0;
    uint64_t tokens = 0;
};

struct FertilityReport {
    std::string corpus_id;
    std::string tokenizer_id;
    std::map<std::string, FertilityEntry> by_lang;
    std::vector<std::string> warnings;
};

// Average tokens per word, per language. Every document must carry a lang
// tag; languages with zero words are omitted with a warning.
FertilityReport measure_fertility(const TokenizerModel& model, const std::vector<Document>& docs,
                                  const std::string& corpus_id);

}  // namespace curtok
