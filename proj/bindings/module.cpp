#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "curtok/corpus.hpp"
#include "curtok/dedup.hpp"
#include "curtok/mixture.hpp"
#include "curtok/pipeline.hpp"
#include "curtok/quality.hpp"
#include "curtok/scrub.hpp"
#include "curtok/sft.hpp"
#include "curtok/tokenizer.hpp"
#include "curtok/unicode.hpp"

namespace py = pybind11;
using namespace curtok;

namespace {

Document doc_from_dict(const py::dict& d) {
    Document doc;
    doc.id = py::cast<std::string>(d["id"]);
    doc.text = py::cast<std::string>(d["text"]);
    if (d.contains("lang")) doc.lang = py::cast<std::string>(d["lang"]);
    return doc;
}

py::dict doc_to_dict(const Document& doc) {
    py::dict d;
    d["id"] = doc.id;
    d["text"] = doc.text;
    if (doc.lang) d["lang"] = *doc.lang;
    if (!doc.trail.empty()) {
        py::list trail;
        for (const StageDecision& s : doc.trail) {
            py::dict e;
            e["stage"] = s.stage;
            e["verdict"] = to_string(s.verdict);
            e["reason"] = s.reason;
            trail.append(e);
        }
        d["trail"] = trail;
    }
    return d;
}

std::vector<Document> docs_from_list(const py::list& items) {
    std::vector<Document> docs;
    docs.reserve(items.size());
    for (const auto& item : items) docs.push_back(doc_from_dict(py::cast<py::dict>(item)));
    return docs;
}

py::dict scores_to_dict(const JudgeScores& s) {
    py::dict d;
    d["code"] = s.code;
    d["math"] = s.math;
    d["toxic"] = s.toxic;
    d["quality"] = s.quality;
    d["language"] = s.language;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "corpus curation and tokenizer optimization toolkit";

    // ---- unicode ----
    m.def(
        "nfc", [](const std::string& text) { return uni::nfc_utf8(text); },
        py::arg("text"), "Canonical composition of a UTF-8 string.");
    m.def(
        "reformat",
        [](const std::string& text) {
            auto [fixed, changed] = reformat_unicode(text);
            return py::make_tuple(fixed, changed);
        },
        py::arg("text"),
        "Repair double-encoded text and apply canonical composition; returns (text, changed).");
    m.def(
        "word_count", [](const std::string& text) { return uni::word_count(text); },
        py::arg("text"));
    m.def(
        "mean_word_length", [](const std::string& text) { return uni::mean_word_length(text); },
        py::arg("text"));

    // ---- tokenizer ----
    py::class_<TokenizerModel>(m, "Tokenizer")
        .def_property_readonly("name", &TokenizerModel::name)
        .def_property_readonly("vocab_size", &TokenizerModel::vocab_size)
        .def_property_readonly("merge_count",
                               [](const TokenizerModel& t) { return t.merges().size(); })
        .def("encode", &TokenizerModel::encode, py::arg("text"))
        .def("decode", &TokenizerModel::decode, py::arg("ids"))
        .def(
            "tokens",
            [](const TokenizerModel& t, const std::string& text) {
                std::vector<std::string> out;
                for (int id : t.encode(text)) out.push_back(t.vocab()[id]);
                return out;
            },
            py::arg("text"), "Encode and render each id as its vocabulary string.")
        .def("save", &TokenizerModel::save, py::arg("path"))
        .def_static("load", &TokenizerModel::load, py::arg("path"));

    m.def(
        "train_bpe",
        [](const std::vector<std::string>& texts, size_t vocab_size, size_t min_pair_count,
           bool split_digits, const std::vector<std::string>& specials, const std::string& name) {
            BpeTrainConfig cfg;
            cfg.vocab_size = vocab_size;
            cfg.min_pair_count = min_pair_count;
            cfg.pretok.split_digits = split_digits;
            cfg.specials = specials;
            cfg.name = name;
            return train_bpe(texts, cfg);
        },
        py::arg("texts"), py::arg("vocab_size"), py::arg("min_pair_count") = 2,
        py::arg("split_digits") = true, py::arg("specials") = std::vector<std::string>{},
        py::arg("name") = "bpe");
    m.def(
        "byte_fallback", [](const std::string& name) { return byte_fallback_model({}, name); },
        py::arg("name") = "byte-fallback",
        "Merge-free model: everything but spaces goes through byte tokens.");
    m.def(
        "pretokenize",
        [](const std::string& text, bool split_digits) {
            PretokConfig cfg;
            cfg.split_digits = split_digits;
            return pretokenize_display(text, cfg);
        },
        py::arg("text"), py::arg("split_digits") = true,
        "Marker-rendered pieces, e.g. 'hi there' -> ['hi', '▁there'].");
    m.def(
        "fertility",
        [](const TokenizerModel& tok, const std::map<std::string, std::vector<std::string>>& corpora) {
            std::vector<Document> docs;
            size_t n = 0;
            for (const auto& [lang, texts] : corpora)
                for (const std::string& t : texts) {
                    Document d;
                    d.id = lang + "-" + std::to_string(n++);
                    d.text = t;
                    d.lang = lang;
                    docs.push_back(std::move(d));
                }
            FertilityReport report = measure_fertility(tok, docs, "py");
            std::map<std::string, double> out;
            for (const auto& [lang, entry] : report.by_lang) out[lang] = entry.fertility;
            return out;
        },
        py::arg("tokenizer"), py::arg("corpora"),
        "Average tokens per word for each language, corpora as {lang: [text, ...]}.");

    // ---- mixture ----
    m.def("normalized_deficit", &normalized_deficit, py::arg("fertility"), py::arg("f_best"));
    m.def("target_shares", &target_shares, py::arg("deficit"), py::arg("epsilon"));
    m.def("momentum_update", &momentum_update, py::arg("previous"), py::arg("target"),
          py::arg("mu"));
    m.def("allocate_characters", &allocate_characters, py::arg("mixture"), py::arg("total_chars"));
    m.def(
        "sample_characters",
        [](const std::vector<std::string>& texts, uint64_t budget, uint64_t seed) {
            std::vector<Document> docs(texts.size());
            for (size_t i = 0; i < texts.size(); ++i) {
                docs[i].id = "t" + std::to_string(i);
                docs[i].text = texts[i];
            }
            SampleResult r = sample_characters(docs, budget, seed);
            return py::make_tuple(r.text, r.scalar_count, r.exhausted);
        },
        py::arg("texts"), py::arg("budget"), py::arg("seed") = 0,
        "Seeded whole-document sampling up to a scalar budget; returns (text, count, exhausted).");

    // ---- dedup ----
    m.def(
        "shingles",
        [](const std::string& text, size_t k) { return shingles(text, k); }, py::arg("text"),
        py::arg("k") = 5);
    m.def("exact_jaccard", &exact_jaccard, py::arg("a"), py::arg("b"));
    m.def(
        "minhash_jaccard",
        [](const std::set<std::string>& a, const std::set<std::string>& b, size_t num_hashes,
           uint64_t seed) {
            DedupConfig cfg;
            cfg.num_hashes = num_hashes;
            cfg.bands = 1;
            cfg.rows = num_hashes;
            cfg.seed = seed;
            return estimated_jaccard(minhash_signature(a, cfg), minhash_signature(b, cfg));
        },
        py::arg("a"), py::arg("b"), py::arg("num_hashes") = 256, py::arg("seed") = 0);
    m.def(
        "dedup_exact",
        [](const py::list& docs) {
            ExactDedupResult r = exact_dedup(docs_from_list(docs));
            std::vector<std::string> kept;
            for (const Document& d : r.kept) kept.push_back(d.id);
            return py::make_tuple(kept, r.dropped);
        },
        py::arg("docs"), "Returns (kept ids, [(duplicate id, kept id), ...]).");
    m.def(
        "dedup_near",
        [](const py::list& docs, double threshold, size_t k, size_t num_hashes, size_t bands,
           size_t rows, uint64_t seed) {
            DedupConfig cfg;
            cfg.jaccard_threshold = threshold;
            cfg.shingle_k = k;
            cfg.num_hashes = num_hashes;
            cfg.bands = bands;
            cfg.rows = rows;
            cfg.seed = seed;
            FuzzyDedupResult r = fuzzy_dedup(docs_from_list(docs), cfg);
            std::vector<std::string> kept;
            for (const Document& d : r.kept) kept.push_back(d.id);
            std::map<std::string, std::vector<std::string>> clusters;
            for (const DedupCluster& c : r.clusters) clusters[c.kept_id] = c.dropped_ids;
            return py::make_tuple(kept, clusters);
        },
        py::arg("docs"), py::arg("threshold") = 0.8, py::arg("k") = 5,
        py::arg("num_hashes") = 256, py::arg("bands") = 32, py::arg("rows") = 8,
        py::arg("seed") = 0, "Returns (kept ids, {kept id: [dropped ids]}).");

    // ---- scrubbing ----
    m.def(
        "pii_spans",
        [](const std::string& text) {
            std::vector<py::tuple> out;
            for (const PiiSpan& s : detect_pii(text))
                out.push_back(py::make_tuple(to_string(s.category), s.start, s.end, s.matched));
            return out;
        },
        py::arg("text"), "Disjoint spans as (category, start, end, matched), scalar offsets.");
    m.def(
        "redact",
        [](const std::string& text) { return redact_pii(text, detect_pii(text)); },
        py::arg("text"));
    m.def(
        "codemath",
        [](const std::string& text, double threshold) {
            Document d;
            d.id = "py";
            d.text = text;
            CodeMathVerdict v = codemath_filter(d, CodeMathWeights{}, threshold);
            py::dict out;
            out["code"] = v.code_score;
            out["math"] = v.math_density;
            out["structural"] = v.structural_score;
            out["combined"] = v.combined;
            out["drop"] = v.verdict == Verdict::DROP;
            return out;
        },
        py::arg("text"), py::arg("threshold") = 0.5);

    // ---- language identification ----
    struct LangIdHandle {
        std::vector<LangProfile> profiles;
    };
    py::class_<LangIdHandle>(m, "LangId")
        .def_static(
            "train",
            [](const std::map<std::string, std::vector<std::string>>& corpora) {
                return LangIdHandle{train_langid(corpora)};
            },
            py::arg("corpora"))
        .def_static(
            "load", [](const std::string& path) { return LangIdHandle{load_langid(path)}; },
            py::arg("path"))
        .def(
            "save",
            [](const LangIdHandle& h, const std::string& path) { save_langid(h.profiles, path); },
            py::arg("path"))
        .def(
            "identify",
            [](const LangIdHandle& h, const std::string& text, double threshold) {
                return identify_language(h.profiles, text, threshold);
            },
            py::arg("text"), py::arg("threshold") = kDefaultLangidThreshold,
            "Returns (language, confidence); 'unknown' below the threshold.");

    // ---- judge ----
    m.def(
        "judge_prompt",
        [](const std::string& prompt, const std::string& completion) {
            InstructionPair p;
            p.prompt = prompt;
            p.completion = completion;
            return build_judge_prompt(p);
        },
        py::arg("prompt"), py::arg("completion"));
    m.def(
        "parse_judge_line",
        [](const std::string& line) { return scores_to_dict(parse_judge_response(line)); },
        py::arg("line"));
    m.def(
        "serialize_judge_line",
        [](int code, int math, int toxic, int quality, const std::vector<std::string>& language) {
            JudgeScores s;
            s.code = code;
            s.math = math;
            s.toxic = toxic;
            s.quality = quality;
            s.language = language;
            return serialize_judge_scores(s);
        },
        py::arg("code"), py::arg("math"), py::arg("toxic"), py::arg("quality"),
        py::arg("language"));
    m.def(
        "judge_decision",
        [](const std::string& line) {
            StageDecision d = retention_decision(parse_judge_response(line), RetentionPolicy{});
            return py::make_tuple(d.verdict == Verdict::KEEP, d.reason);
        },
        py::arg("line"), "Apply the default retention policy; returns (keep, reason).");

    // ---- pipeline ----
    m.def(
        "run_pipeline",
        [](const std::string& config_json, const py::list& docs) {
            PipelineConfig cfg = PipelineConfig::from_json(nlohmann::json::parse(config_json));
            PipelineRun run = run_pipeline_docs(docs_from_list(docs), cfg);
            py::list kept, dropped;
            for (const Document& d : run.kept) kept.append(doc_to_dict(d));
            for (const Document& d : run.dropped) dropped.append(doc_to_dict(d));
            py::dict out;
            out["kept"] = kept;
            out["dropped"] = dropped;
            out["report"] = run.report.to_tsv();
            return out;
        },
        py::arg("config_json"), py::arg("docs"),
        "Run a staged config over in-memory docs; returns {kept, dropped, report}.");
    m.def("registered_stages", &registered_stages);
}
