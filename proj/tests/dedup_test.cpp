#include <doctest.h>

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "curtok/dedup.hpp"
#include "curtok/hash.hpp"
#include "util.hpp"

using namespace curtok;

namespace {

Document make_doc(std::string id, std::string text) {
    Document d;
    d.id = std::move(id);
    d.text = std::move(text);
    return d;
}

// Distinct single-token strings so set overlap is exact by construction.
std::set<std::string> numbered_set(int from, int to) {
    std::set<std::string> s;
    for (int i = from; i < to; ++i) s.insert("tok" + std::to_string(i));
    return s;
}

}  // namespace

TEST_CASE("shingles are all k-scalar windows") {
    CHECK(shingles("abcd", 2) == std::set<std::string>{"ab", "bc", "cd"});
    CHECK(shingles("aaaa", 2) == std::set<std::string>{"aa"});
    CHECK(shingles("ab", 5) == std::set<std::string>{"ab"});
    CHECK(shingles("", 3) == std::set<std::string>{""});
    // scalar windows, not byte windows
    CHECK(shingles("नमस", 2) == std::set<std::string>{"नम", "मस"});
}

TEST_CASE("exact jaccard on small hand-counted sets") {
    std::set<std::string> a = {"a", "b", "c"};
    std::set<std::string> b = {"b", "c", "d"};
    CHECK(exact_jaccard(a, b) == doctest::Approx(0.5));
    CHECK(exact_jaccard(a, a) == doctest::Approx(1.0));
    CHECK(exact_jaccard(a, {"x"}) == doctest::Approx(0.0));
}

TEST_CASE("minhash estimate tracks exact jaccard") {
    DedupConfig cfg;
    // J = 50 / 150 = 1/3; estimator sd with 256 hashes is ~0.03
    auto a = numbered_set(0, 100);
    auto b = numbered_set(50, 150);
    MinHashSignature sa = minhash_signature(a, cfg, "a");
    MinHashSignature sb = minhash_signature(b, cfg, "b");
    double est = estimated_jaccard(sa, sb);
    CHECK(std::abs(est - 1.0 / 3.0) <= 0.125);

    // identical sets estimate exactly 1
    CHECK(estimated_jaccard(sa, minhash_signature(numbered_set(0, 100), cfg, "a2")) ==
          doctest::Approx(1.0));

    // disjoint sets estimate near 0
    MinHashSignature sc = minhash_signature(numbered_set(1000, 1100), cfg, "c");
    CHECK(estimated_jaccard(sa, sc) <= 0.05);
}

TEST_CASE("minhash estimate accuracy over many pairs") {
    DedupConfig cfg;
    SplitMix64 rng(derive_seed(23, "minhash"));
    double total_err = 0.0;
    int pairs = 30;
    for (int p = 0; p < pairs; ++p) {
        int common = 20 + static_cast<int>(rng.next_below(80));
        int only_a = 10 + static_cast<int>(rng.next_below(90));
        int only_b = 10 + static_cast<int>(rng.next_below(90));
        std::set<std::string> a, b;
        for (int i = 0; i < common; ++i) {
            a.insert("c" + std::to_string(p) + "_" + std::to_string(i));
            b.insert("c" + std::to_string(p) + "_" + std::to_string(i));
        }
        for (int i = 0; i < only_a; ++i) a.insert("a" + std::to_string(p) + "_" + std::to_string(i));
        for (int i = 0; i < only_b; ++i) b.insert("b" + std::to_string(p) + "_" + std::to_string(i));
        double est = estimated_jaccard(minhash_signature(a, cfg, "a"),
                                       minhash_signature(b, cfg, "b"));
        total_err += std::abs(est - exact_jaccard(a, b));
    }
    CHECK(total_err / pairs <= 0.06);
}

TEST_CASE("minhash signature of an empty set is an error") {
    DedupConfig cfg;
    CHECK_THROWS(minhash_signature({}, cfg, "x"));
}

TEST_CASE("minhash signatures depend on the seed") {
    DedupConfig a, b;
    b.seed = 99;
    auto s = numbered_set(0, 50);
    CHECK(minhash_signature(s, a, "x").values != minhash_signature(s, b, "x").values);
    CHECK(minhash_signature(s, a, "x").values == minhash_signature(s, a, "y").values);
}

TEST_CASE("lsh surfaces near-duplicate pairs and skips distant ones") {
    DedupConfig cfg;
    // J(a,b) ~ 0.95: collision probability under 32x8 banding is ~1
    auto a = numbered_set(0, 200);
    auto b = numbered_set(0, 195);
    // J(a,c) ~ 0.1: collision probability ~ 3e-7 per band
    std::set<std::string> c = numbered_set(0, 40);
    for (int i = 0; i < 300; ++i) c.insert("far" + std::to_string(i));

    std::vector<MinHashSignature> sigs = {
        minhash_signature(a, cfg, "a"),
        minhash_signature(b, cfg, "b"),
        minhash_signature(c, cfg, "c"),
    };
    auto pairs = lsh_candidate_pairs(sigs, cfg);
    CHECK(pairs == std::vector<std::pair<std::string, std::string>>{{"a", "b"}});
}

TEST_CASE("exact dedup keeps the first occurrence in file order") {
    std::vector<Document> docs = {
        make_doc("d0", "alpha"), make_doc("d1", "beta"),  make_doc("d2", "alpha"),
        make_doc("d3", "gamma"), make_doc("d4", "beta"),
    };
    ExactDedupResult r = exact_dedup(docs);
    REQUIRE(r.kept.size() == 3);
    CHECK(r.kept[0].id == "d0");
    CHECK(r.kept[1].id == "d1");
    CHECK(r.kept[2].id == "d3");
    CHECK(r.dropped == std::vector<std::pair<std::string, std::string>>{
                           {"d2", "d0"}, {"d4", "d1"}});
}

TEST_CASE("exact dedup is idempotent") {
    std::vector<Document> docs;
    SplitMix64 rng(derive_seed(5, "exact"));
    for (int i = 0; i < 200; ++i)
        docs.push_back(make_doc("d" + std::to_string(i),
                                "text " + std::to_string(rng.next_below(60))));
    ExactDedupResult once = exact_dedup(docs);
    ExactDedupResult twice = exact_dedup(once.kept);
    CHECK(twice.dropped.empty());
    CHECK(twice.kept.size() == once.kept.size());
}

namespace {

std::vector<Document> near_duplicate_fixture() {
    std::string base =
        "the curious archivist catalogued every manuscript in the collection "
        "and shelved each item under its proper heading with great care";
    std::vector<Document> docs;
    docs.push_back(make_doc("n0", base));
    docs.push_back(make_doc("n1", base + " indeed"));
    docs.push_back(make_doc("n2", "truly " + base));
    docs.push_back(make_doc("u0", "completely different subject matter about orbital mechanics "
                                  "and the motion of planetary bodies around the sun"));
    docs.push_back(make_doc("u1", "a short unrelated note"));
    return docs;
}

}  // namespace

TEST_CASE("fuzzy dedup clusters near-duplicates under the smallest id") {
    DedupConfig cfg;
    cfg.jaccard_threshold = 0.7;
    FuzzyDedupResult r = fuzzy_dedup(near_duplicate_fixture(), cfg);
    REQUIRE(r.clusters.size() == 1);
    CHECK(r.clusters[0].kept_id == "n0");
    CHECK(r.clusters[0].dropped_ids == std::vector<std::string>{"n1", "n2"});
    REQUIRE(r.kept.size() == 3);
    CHECK(r.kept[0].id == "n0");
    CHECK(r.kept[1].id == "u0");
    CHECK(r.kept[2].id == "u1");
}

TEST_CASE("fuzzy dedup is idempotent") {
    DedupConfig cfg;
    cfg.jaccard_threshold = 0.7;
    FuzzyDedupResult once = fuzzy_dedup(near_duplicate_fixture(), cfg);
    FuzzyDedupResult twice = fuzzy_dedup(once.kept, cfg);
    CHECK(twice.clusters.empty());
    CHECK(twice.kept.size() == once.kept.size());
}

TEST_CASE("fuzzy dedup with exact verification agrees on clear cases") {
    DedupConfig cfg;
    cfg.jaccard_threshold = 0.7;
    cfg.exact_verify = true;
    FuzzyDedupResult r = fuzzy_dedup(near_duplicate_fixture(), cfg);
    REQUIRE(r.clusters.size() == 1);
    CHECK(r.clusters[0].kept_id == "n0");
}

TEST_CASE("dedup config validation") {
    DedupConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.bands = 31;
    CHECK_THROWS(cfg.validate());
    cfg = DedupConfig{};
    cfg.jaccard_threshold = 0.0;
    CHECK_THROWS(cfg.validate());
    cfg = DedupConfig{};
    cfg.jaccard_threshold = 1.5;
    CHECK_THROWS(cfg.validate());
    cfg = DedupConfig{};
    cfg.shingle_k = 0;
    CHECK_THROWS(cfg.validate());
}

TEST_CASE("cluster report format") {
    std::vector<DedupCluster> clusters = {{"a", {"b", "c"}}, {"x", {"y"}}};
    CHECK(cluster_report(clusters) == "a\tb,c\nx\ty\n");
}
