#include "curtok/dedup.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "curtok/hash.hpp"
#include "curtok/unicode.hpp"

namespace curtok {

void DedupConfig::validate() const {
    if (shingle_k < 1) throw std::invalid_argument("shingle_k must be >= 1");
    if (num_hashes < 1) throw std::invalid_argument("num_hashes must be >= 1");
    if (bands * rows != num_hashes)
        throw std::invalid_argument("bands * rows must equal num_hashes");
    if (!(jaccard_threshold > 0.0 && jaccard_threshold <= 1.0))
        throw std::invalid_argument("jaccard_threshold must be in (0, 1]");
}

ExactDedupResult exact_dedup(const std::vector<Document>& docs) {
    ExactDedupResult result;
    std::unordered_map<Hash128, std::vector<size_t>, Hash128Hasher> by_hash;
    for (const Document& doc : docs) {
        Hash128 h = hash128(doc.text);
        auto& bucket = by_hash[h];
        const Document* original = nullptr;
        for (size_t idx : bucket)
            if (result.kept[idx].text == doc.text) {
                original = &result.kept[idx];
                break;
            }
        if (original) {
            result.dropped.emplace_back(doc.id, original->id);
        } else {
            bucket.push_back(result.kept.size());
            result.kept.push_back(doc);
        }
    }
    return result;
}

std::set<std::string> shingles(std::string_view text, size_t k) {
    if (k < 1) throw std::invalid_argument("shingle size must be >= 1");
    std::u32string s = uni::decode_utf8(text);
    std::set<std::string> out;
    if (s.size() < k) {
        out.insert(uni::encode_utf8(s));
        return out;
    }
    for (size_t i = 0; i + k <= s.size(); ++i) out.insert(uni::encode_utf8(s.substr(i, k)));
    return out;
}

MinHashSignature minhash_signature(const std::set<std::string>& shingle_set,
                                   const DedupConfig& cfg, std::string doc_id) {
    cfg.validate();
    if (shingle_set.empty())
        throw std::invalid_argument("cannot sign an empty shingle set (empty document)");
    std::vector<uint64_t> salts(cfg.num_hashes);
    for (size_t i = 0; i < cfg.num_hashes; ++i) salts[i] = derive_seed(cfg.seed, "minhash", i);

    MinHashSignature sig;
    sig.doc_id = std::move(doc_id);
    sig.seed = cfg.seed;
    sig.values.assign(cfg.num_hashes, UINT64_MAX);
    for (const std::string& sh : shingle_set) {
        uint64_t base = fnv1a64(sh);
        for (size_t i = 0; i < cfg.num_hashes; ++i) {
            uint64_t h = mix64(base ^ salts[i]);
            if (h < sig.values[i]) sig.values[i] = h;
        }
    }
    return sig;
}

double estimated_jaccard(const MinHashSignature& a, const MinHashSignature& b) {
    if (a.values.size() != b.values.size() || a.seed != b.seed)
        throw std::invalid_argument("signatures have mismatched length or seed");
    if (a.values.empty()) return 0.0;
    size_t same = 0;
    for (size_t i = 0; i < a.values.size(); ++i)
        if (a.values[i] == b.values[i]) ++same;
    return static_cast<double>(same) / static_cast<double>(a.values.size());
}

double exact_jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    size_t inter = 0;
    for (const std::string& s : a) inter += b.count(s);
    size_t uni_size = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni_size);
}

std::vector<std::pair<std::string, std::string>> lsh_candidate_pairs(
    const std::vector<MinHashSignature>& sigs, const DedupConfig& cfg) {
    cfg.validate();
    for (const MinHashSignature& s : sigs)
        if (s.values.size() != cfg.num_hashes || s.seed != cfg.seed)
            throw std::invalid_argument("signature '" + s.doc_id +
                                        "' does not match the dedup config");

    std::set<std::pair<std::string, std::string>> pairs;
    for (size_t band = 0; band < cfg.bands; ++band) {
        size_t off = band * cfg.rows;
        std::unordered_map<uint64_t, std::vector<size_t>> buckets;
        for (size_t i = 0; i < sigs.size(); ++i) {
            const uint64_t* slice = sigs[i].values.data() + off;
            uint64_t key = fnv1a64(
                std::string_view(reinterpret_cast<const char*>(slice), cfg.rows * sizeof(uint64_t)),
                mix64(band + 1));
            buckets[key].push_back(i);
        }
        for (const auto& [_, members] : buckets) {
            if (members.size() < 2) continue;
            for (size_t x = 0; x < members.size(); ++x)
                for (size_t y = x + 1; y < members.size(); ++y) {
                    const MinHashSignature& a = sigs[members[x]];
                    const MinHashSignature& b = sigs[members[y]];
                    if (std::memcmp(a.values.data() + off, b.values.data() + off,
                                    cfg.rows * sizeof(uint64_t)) != 0)
                        continue;  // bucket collision, rows differ
                    if (a.doc_id == b.doc_id) continue;
                    pairs.insert(a.doc_id < b.doc_id ? std::make_pair(a.doc_id, b.doc_id)
                                                     : std::make_pair(b.doc_id, a.doc_id));
                }
        }
    }
    return {pairs.begin(), pairs.end()};
}

namespace {

struct UnionFind {
    std::vector<size_t> parent;
    explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    size_t find(size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(size_t a, size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

FuzzyDedupResult fuzzy_dedup(const std::vector<Document>& docs, const DedupConfig& cfg) {
    cfg.validate();
    std::vector<std::set<std::string>> sets;
    std::vector<MinHashSignature> sigs;
    std::unordered_map<std::string, size_t> index_of;
    sets.reserve(docs.size());
    sigs.reserve(docs.size());
    for (size_t i = 0; i < docs.size(); ++i) {
        sets.push_back(shingles(docs[i].text, cfg.shingle_k));
        sigs.push_back(minhash_signature(sets.back(), cfg, docs[i].id));
        index_of.emplace(docs[i].id, i);
    }

    UnionFind uf(docs.size());
    for (const auto& [a, b] : lsh_candidate_pairs(sigs, cfg)) {
        size_t ia = index_of.at(a), ib = index_of.at(b);
        double j = cfg.exact_verify ? exact_jaccard(sets[ia], sets[ib])
                                    : estimated_jaccard(sigs[ia], sigs[ib]);
        if (j >= cfg.jaccard_threshold) uf.unite(ia, ib);
    }

    std::map<size_t, std::vector<size_t>> components;
    for (size_t i = 0; i < docs.size(); ++i) components[uf.find(i)].push_back(i);

    FuzzyDedupResult result;
    std::set<size_t> dropped_idx;
    std::map<std::string, DedupCluster> by_keeper;
    for (auto& [_, members] : components) {
        if (members.size() < 2) continue;
        size_t keep = members[0];
        for (size_t m : members)
            if (docs[m].id < docs[keep].id) keep = m;
        DedupCluster cluster;
        cluster.kept_id = docs[keep].id;
        for (size_t m : members)
            if (m != keep) {
                cluster.dropped_ids.push_back(docs[m].id);
                dropped_idx.insert(m);
            }
        std::sort(cluster.dropped_ids.begin(), cluster.dropped_ids.end());
        by_keeper.emplace(cluster.kept_id, std::move(cluster));
    }
    for (size_t i = 0; i < docs.size(); ++i)
        if (!dropped_idx.count(i)) result.kept.push_back(docs[i]);
    for (auto& [_, cluster] : by_keeper) result.clusters.push_back(std::move(cluster));
    return result;
}

std::string cluster_report(const std::vector<DedupCluster>& clusters) {
    std::string out;
    for (const DedupCluster& c : clusters) {
        out += c.kept_id;
        out += '\t';
        for (size_t i = 0; i < c.dropped_ids.size(); ++i) {
            if (i) out += ',';
            out += c.dropped_ids[i];
        }
        out += '\n';
    }
    return out;
}

}  // namespace curtok
