#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace curtok {

enum class Verdict { KEEP, DROP, MODIFIED };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct StageDecision {
    std::string stage;
    Verdict verdict = Verdict::KEEP;
    std::string reason;
    std::optional<double> score;

    bool operator==(const StageDecision&) const = default;
};

struct Document {
    std::string id;
    std::string text;
    std::optional<std::string> lang;
    std::map<std::string, std::string> meta;
    std::vector<StageDecision> trail;
    // Unknown top-level record keys, preserved verbatim across read/write.
    nlohmann::json extra = nlohmann::json::object();
};

struct LineError {
    size_t line_no = 0;
    std::string message;
    std::string raw;
};

class CorpusError : public std::runtime_error {
public:
    CorpusError(const std::string& what, size_t written = 0)
        : std::runtime_error(what), written_count(written) {}
    size_t written_count;
};

// Streaming JSONL reader. Malformed lines come back as LineError records in
// file order; they are never silently skipped. Duplicate ids within one file
// violate the corpus invariant and surface as line errors too.
class CorpusReader {
public:
    explicit CorpusReader(const std::string& path);
    ~CorpusReader();
    CorpusReader(CorpusReader&&) noexcept;
    CorpusReader& operator=(CorpusReader&&) noexcept;

    using Item = std::variant<Document, LineError>;
    std::optional<Item> next();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

CorpusReader read_corpus(const std::string& path);

// Convenience: drain a whole file.
std::pair<std::vector<Document>, std::vector<LineError>> read_corpus_all(const std::string& path);

class CorpusWriter {
public:
    explicit CorpusWriter(const std::string& path);
    ~CorpusWriter();
    CorpusWriter(CorpusWriter&&) noexcept;
    CorpusWriter& operator=(CorpusWriter&&) noexcept;

    void write(const Document& doc);
    size_t count() const;
    void close();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

size_t write_corpus(const std::vector<Document>& docs, const std::string& path);

nlohmann::json document_to_json(const Document& doc);
Document document_from_json(const nlohmann::json& j);

// Fixed token-range buckets; documents beyond the last range go to overflow.
struct LengthHistogram {
    static constexpr size_t kBucketCount = 8;
    static const std::array<std::pair<uint32_t, uint32_t>, kBucketCount> kRanges;

    std::array<uint64_t, kBucketCount> counts{};
    uint64_t overflow = 0;

    void add(size_t token_count);
    uint64_t total() const;
    static std::string range_label(size_t bucket);
    std::string to_tsv() const;
    nlohmann::json to_json() const;
};

class TokenizerModel;
LengthHistogram token_length_histogram(const std::vector<Document>& docs,
                                       const TokenizerModel& tok);

}  // namespace curtok
