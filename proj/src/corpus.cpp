#include "curtok/corpus.hpp"

#include <fstream>
#include <set>

#include "curtok/tokenizer.hpp"
#include "curtok/unicode.hpp"

namespace curtok {

using nlohmann::json;

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::KEEP: return "KEEP";
        case Verdict::DROP: return "DROP";
        case Verdict::MODIFIED: return "MODIFIED";
    }
    return "KEEP";
}

Verdict verdict_from_string(const std::string& s) {
    if (s == "KEEP") return Verdict::KEEP;
    if (s == "DROP") return Verdict::DROP;
    if (s == "MODIFIED") return Verdict::MODIFIED;
    throw std::invalid_argument("unknown verdict: " + s);
}

namespace {

json trail_to_json(const std::vector<StageDecision>& trail) {
    json arr = json::array();
    for (const auto& d : trail) {
        json e{{"stage", d.stage}, {"verdict", to_string(d.verdict)}, {"reason", d.reason}};
        if (d.score) e["score"] = *d.score;
        arr.push_back(std::move(e));
    }
    return arr;
}

bool trail_from_json(const json& arr, std::vector<StageDecision>& out) {
    if (!arr.is_array()) return false;
    std::vector<StageDecision> trail;
    for (const auto& e : arr) {
        if (!e.is_object() || !e.contains("stage") || !e.contains("verdict")) return false;
        StageDecision d;
        d.stage = e.at("stage").get<std::string>();
        try {
            d.verdict = verdict_from_string(e.at("verdict").get<std::string>());
        } catch (const std::exception&) {
            return false;
        }
        d.reason = e.value("reason", std::string{});
        if (e.contains("score") && e.at("score").is_number()) d.score = e.at("score").get<double>();
        trail.push_back(std::move(d));
    }
    out = std::move(trail);
    return true;
}

}  // namespace

json document_to_json(const Document& doc) {
    json j = doc.extra.is_object() ? doc.extra : json::object();
    j["id"] = doc.id;
    j["text"] = doc.text;
    if (doc.lang) j["lang"] = *doc.lang;
    json meta = json::object();
    for (const auto& [k, v] : doc.meta) meta[k] = v;
    // The trail rides inside meta so the on-disk schema stays flat.
    if (!doc.trail.empty()) meta["trail"] = trail_to_json(doc.trail).dump();
    if (!meta.empty()) j["meta"] = std::move(meta);
    return j;
}

Document document_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("record is not an object");
    if (!j.contains("id")) throw std::invalid_argument("missing \"id\"");
    if (!j.contains("text")) throw std::invalid_argument("missing \"text\"");
    if (!j.at("id").is_string()) throw std::invalid_argument("\"id\" is not a string");
    if (!j.at("text").is_string()) throw std::invalid_argument("\"text\" is not a string");

    Document doc;
    doc.id = j.at("id").get<std::string>();
    doc.text = j.at("text").get<std::string>();
    if (doc.id.empty()) throw std::invalid_argument("empty \"id\"");
    if (j.contains("lang") && j.at("lang").is_string())
        doc.lang = j.at("lang").get<std::string>();
    if (j.contains("meta") && j.at("meta").is_object()) {
        for (const auto& [k, v] : j.at("meta").items()) {
            if (!v.is_string()) continue;
            if (k == "trail") {
                std::vector<StageDecision> trail;
                json parsed = json::parse(v.get<std::string>(), nullptr, false);
                if (!parsed.is_discarded() && trail_from_json(parsed, trail)) {
                    doc.trail = std::move(trail);
                    continue;
                }
            }
            doc.meta[k] = v.get<std::string>();
        }
    }
    for (const auto& [k, v] : j.items()) {
        if (k != "id" && k != "text" && k != "lang" && k != "meta") doc.extra[k] = v;
    }
    return doc;
}

struct CorpusReader::Impl {
    std::ifstream in;
    std::string path;
    size_t line_no = 0;
    std::set<std::string> seen_ids;
};

CorpusReader::CorpusReader(const std::string& path) : impl_(std::make_unique<Impl>()) {
    impl_->path = path;
    impl_->in.open(path, std::ios::binary);
    if (!impl_->in) throw CorpusError("cannot open corpus file: " + path);
}

CorpusReader::~CorpusReader() = default;
CorpusReader::CorpusReader(CorpusReader&&) noexcept = default;
CorpusReader& CorpusReader::operator=(CorpusReader&&) noexcept = default;

std::optional<CorpusReader::Item> CorpusReader::next() {
    std::string line;
    while (std::getline(impl_->in, line)) {
        ++impl_->line_no;
        if (line.empty()) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            return Item{LineError{impl_->line_no, "invalid JSON", line}};
        try {
            Document doc = document_from_json(j);
            if (!impl_->seen_ids.insert(doc.id).second)
                return Item{LineError{impl_->line_no, "duplicate id: " + doc.id, line}};
            return Item{std::move(doc)};
        } catch (const std::exception& e) {
            return Item{LineError{impl_->line_no, e.what(), line}};
        }
    }
    if (impl_->in.bad()) throw CorpusError("read failure on " + impl_->path);
    return std::nullopt;
}

CorpusReader read_corpus(const std::string& path) { return CorpusReader(path); }

std::pair<std::vector<Document>, std::vector<LineError>> read_corpus_all(const std::string& path) {
    CorpusReader reader(path);
    std::vector<Document> docs;
    std::vector<LineError> errors;
    while (auto item = reader.next()) {
        if (std::holds_alternative<Document>(*item)) {
            docs.push_back(std::move(std::get<Document>(*item)));
        } else {
            errors.push_back(std::move(std::get<LineError>(*item)));
        }
    }
    return {std::move(docs), std::move(errors)};
}

struct CorpusWriter::Impl {
    std::ofstream out;
    std::string path;
    size_t count = 0;
    bool closed = false;
};

CorpusWriter::CorpusWriter(const std::string& path) : impl_(std::make_unique<Impl>()) {
    impl_->path = path;
    impl_->out.open(path, std::ios::binary | std::ios::trunc);
    if (!impl_->out) throw CorpusError("cannot open for writing: " + path);
}

CorpusWriter::~CorpusWriter() {
    if (impl_ && !impl_->closed) impl_->out.close();
}

CorpusWriter::CorpusWriter(CorpusWriter&&) noexcept = default;
CorpusWriter& CorpusWriter::operator=(CorpusWriter&&) noexcept = default;

void CorpusWriter::write(const Document& doc) {
    impl_->out << document_to_json(doc).dump() << '\n';
    if (!impl_->out)
        throw CorpusError("write failure on " + impl_->path + " after " +
                              std::to_string(impl_->count) + " records",
                          impl_->count);
    ++impl_->count;
}

size_t CorpusWriter::count() const { return impl_->count; }

void CorpusWriter::close() {
    impl_->out.close();
    impl_->closed = true;
    if (impl_->out.fail())
        throw CorpusError("close failure on " + impl_->path, impl_->count);
}

size_t write_corpus(const std::vector<Document>& docs, const std::string& path) {
    CorpusWriter writer(path);
    for (const auto& doc : docs) writer.write(doc);
    writer.close();
    return docs.size();
}

const std::array<std::pair<uint32_t, uint32_t>, LengthHistogram::kBucketCount>
    LengthHistogram::kRanges = {{{0, 128},
                                 {129, 256},
                                 {257, 512},
                                 {513, 1024},
                                 {1025, 2048},
                                 {2049, 4096},
                                 {4097, 8192},
                                 {8193, 16384}}};

void LengthHistogram::add(size_t token_count) {
    for (size_t i = 0; i < kBucketCount; ++i) {
        if (token_count >= kRanges[i].first && token_count <= kRanges[i].second) {
            ++counts[i];
            return;
        }
    }
    ++overflow;
}

uint64_t LengthHistogram::total() const {
    uint64_t sum = overflow;
    for (uint64_t c : counts) sum += c;
    return sum;
}

std::string LengthHistogram::range_label(size_t bucket) {
    const auto& r = kRanges.at(bucket);
    return std::to_string(r.first) + "-" + std::to_string(r.second);
}

std::string LengthHistogram::to_tsv() const {
    std::string out;
    for (size_t i = 0; i < kBucketCount; ++i)
        out += range_label(i) + "\t" + std::to_string(counts[i]) + "\n";
    out += "overflow\t" + std::to_string(overflow) + "\n";
    return out;
}

json LengthHistogram::to_json() const {
    json buckets = json::array();
    for (size_t i = 0; i < kBucketCount; ++i)
        buckets.push_back({{"range", range_label(i)}, {"count", counts[i]}});
    return json{{"buckets", buckets}, {"overflow", overflow}};
}

LengthHistogram token_length_histogram(const std::vector<Document>& docs,
                                       const TokenizerModel& tok) {
    LengthHistogram hist;
    for (const auto& doc : docs) hist.add(tok.encode(doc.text).size());
    return hist;
}

}  // namespace curtok
