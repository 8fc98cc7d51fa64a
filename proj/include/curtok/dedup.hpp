#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "curtok/corpus.hpp"

namespace curtok {

struct DedupConfig {
    size_t shingle_k = 5;
    size_t num_hashes = 256;
    size_t bands = 32;
    size_t rows = 8;
    double jaccard_threshold = 0.8;
    uint64_t seed = 0;
    // Recompute true Jaccard on shingle sets instead of trusting the
    // signature estimate when verifying candidate pairs.
    bool exact_verify = false;

    void validate() const;  // bands * rows == num_hashes, threshold in (0,1], k >= 1
};

struct ExactDedupResult {
    std::vector<Document> kept;
    std::vector<std::pair<std::string, std::string>> dropped;  // (dup id, kept id)
};

// First occurrence in input order wins; equality is confirmed byte-wise on
// 128-bit hash collision.
ExactDedupResult exact_dedup(const std::vector<Document>& docs);

// All k-scalar windows; text shorter than k yields the whole text as the
// single shingle.
std::set<std::string> shingles(std::string_view text, size_t k);

struct MinHashSignature {
    std::string doc_id;
    uint64_t seed = 0;
    std::vector<uint64_t> values;  // length = num_hashes
};

MinHashSignature minhash_signature(const std::set<std::string>& shingle_set,
                                   const DedupConfig& cfg, std::string doc_id = "");

double estimated_jaccard(const MinHashSignature& a, const MinHashSignature& b);
double exact_jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

// Pairs sharing at least one band (all r rows equal), canonicalized so
// first < second, deduplicated and sorted.
std::vector<std::pair<std::string, std::string>> lsh_candidate_pairs(
    const std::vector<MinHashSignature>& sigs, const DedupConfig& cfg);

struct DedupCluster {
    std::string kept_id;
    std::vector<std::string> dropped_ids;  // sorted
};

struct FuzzyDedupResult {
    std::vector<Document> kept;
    std::vector<DedupCluster> clusters;  // sorted by kept_id
};

// Candidates verified against the Jaccard threshold, connected components
// clustered, smallest id kept per cluster.
FuzzyDedupResult fuzzy_dedup(const std::vector<Document>& docs, const DedupConfig& cfg);

// One line per cluster: "kept_id<TAB>dropped,dropped,...".
std::string cluster_report(const std::vector<DedupCluster>& clusters);

}  // namespace curtok
