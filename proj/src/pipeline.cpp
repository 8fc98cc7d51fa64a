#include "curtok/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <set>
#include <sstream>

#include "curtok/dedup.hpp"
#include "curtok/hash.hpp"
#include "curtok/quality.hpp"
#include "curtok/scrub.hpp"

namespace curtok {

using json = nlohmann::json;
namespace fs = std::filesystem;

const std::vector<std::string>& registered_stages() {
    static const std::vector<std::string> names = {
        "word_count", "mean_word_length", "quality_classify", "langid", "unicode_reformat",
        "exact_dedup", "fuzzy_dedup",     "pii_redact",       "codemath_filter"};
    return names;
}

namespace {

std::string format_double(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

void check_keys(const json& params, const std::string& stage,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : params.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok)
            throw ConfigError("stage '" + stage + "' has an unknown parameter '" + key + "'");
    }
}

uint64_t get_uint(const json& params, const char* key, uint64_t fallback) {
    if (!params.contains(key)) return fallback;
    const json& v = params.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<int64_t>() >= 0))
        throw ConfigError(std::string("parameter '") + key + "' must be a non-negative integer");
    return v.get<uint64_t>();
}

double get_double(const json& params, const char* key, double fallback) {
    if (!params.contains(key)) return fallback;
    const json& v = params.at(key);
    if (!v.is_number()) throw ConfigError(std::string("parameter '") + key + "' must be a number");
    return v.get<double>();
}

std::string get_string(const json& params, const char* key, const std::string& fallback) {
    if (!params.contains(key)) return fallback;
    const json& v = params.at(key);
    if (!v.is_string()) throw ConfigError(std::string("parameter '") + key + "' must be a string");
    return v.get<std::string>();
}

std::string require_string(const json& params, const char* key, const std::string& stage) {
    if (!params.contains(key))
        throw ConfigError("stage '" + stage + "' requires parameter '" + key + "'");
    return get_string(params, key, "");
}

struct StageRunner {
    std::string name;
    std::function<void(std::vector<Document>&, std::vector<Document>&, StageStats&)> run;
};

StageRunner per_doc_stage(std::string name, std::function<StageDecision(Document&)> fn) {
    StageRunner runner;
    runner.name = name;
    runner.run = [fn = std::move(fn)](std::vector<Document>& docs,
                                      std::vector<Document>& dropped, StageStats& stats) {
        std::vector<Document> kept;
        kept.reserve(docs.size());
        for (Document& doc : docs) {
            StageDecision decision = fn(doc);
            doc.trail.push_back(decision);
            switch (decision.verdict) {
                case Verdict::MODIFIED:
                    ++stats.modified;
                    [[fallthrough]];
                case Verdict::KEEP:
                    kept.push_back(std::move(doc));
                    break;
                case Verdict::DROP:
                    dropped.push_back(std::move(doc));
                    break;
            }
        }
        docs = std::move(kept);
    };
    return runner;
}

// Applies a precomputed duplicate -> keeper map, appending trail decisions.
StageRunner dedup_stage(std::string name,
                        std::function<std::map<std::string, std::string>(
                            const std::vector<Document>&)> find_duplicates,
                        std::string drop_prefix) {
    StageRunner runner;
    runner.name = name;
    runner.run = [name, find_duplicates = std::move(find_duplicates),
                  drop_prefix = std::move(drop_prefix)](std::vector<Document>& docs,
                                                        std::vector<Document>& dropped,
                                                        StageStats& stats) {
        (void)stats;
        std::map<std::string, std::string> dup_to_kept = find_duplicates(docs);
        std::vector<Document> kept;
        kept.reserve(docs.size());
        for (Document& doc : docs) {
            auto it = dup_to_kept.find(doc.id);
            if (it == dup_to_kept.end()) {
                doc.trail.push_back({name, Verdict::KEEP, "unique", std::nullopt});
                kept.push_back(std::move(doc));
            } else {
                doc.trail.push_back({name, Verdict::DROP, drop_prefix + it->second, std::nullopt});
                dropped.push_back(std::move(doc));
            }
        }
        docs = std::move(kept);
    };
    return runner;
}

std::vector<StageRunner> build_stages(const PipelineConfig& cfg) {
    std::vector<StageRunner> runners;
    for (const StageConfig& stage : cfg.stages) {
        const json& params = stage.params;
        if (stage.name == "word_count") {
            check_keys(params, stage.name, {"min_words", "max_words"});
            HeuristicConfig h;
            h.min_words = get_uint(params, "min_words", h.min_words);
            h.max_words = get_uint(params, "max_words", h.max_words);
            try {
                h.validate();
            } catch (const std::exception& e) {
                throw ConfigError(std::string("stage 'word_count': ") + e.what());
            }
            runners.push_back(per_doc_stage(
                stage.name, [h](Document& d) { return word_count_filter(d, h); }));
        } else if (stage.name == "mean_word_length") {
            check_keys(params, stage.name, {"min_mean_word_len", "max_mean_word_len"});
            HeuristicConfig h;
            h.min_mean_word_len = get_double(params, "min_mean_word_len", h.min_mean_word_len);
            h.max_mean_word_len = get_double(params, "max_mean_word_len", h.max_mean_word_len);
            try {
                h.validate();
            } catch (const std::exception& e) {
                throw ConfigError(std::string("stage 'mean_word_length': ") + e.what());
            }
            runners.push_back(per_doc_stage(
                stage.name, [h](Document& d) { return mean_word_length_filter(d, h); }));
        } else if (stage.name == "quality_classify") {
            check_keys(params, stage.name, {"model", "keep"});
            std::string model_path = require_string(params, "model", stage.name);
            auto model = std::make_shared<QualityModel>();
            try {
                *model = QualityModel::load(model_path);
            } catch (const std::exception& e) {
                throw ConfigError("stage 'quality_classify': " + std::string(e.what()));
            }
            std::set<QualityBucket> keep{QualityBucket::HIGH};
            if (params.contains("keep")) {
                if (!params.at("keep").is_array())
                    throw ConfigError("stage 'quality_classify': 'keep' must be a list");
                keep.clear();
                for (const auto& b : params.at("keep")) {
                    try {
                        keep.insert(quality_bucket_from_string(b.get<std::string>()));
                    } catch (const std::exception& e) {
                        throw ConfigError("stage 'quality_classify': " + std::string(e.what()));
                    }
                }
            }
            runners.push_back(per_doc_stage(stage.name, [model, keep](Document& d) {
                auto [bucket, confidence] = model->classify(d.text);
                bool ok = keep.count(bucket) > 0;
                return StageDecision{"quality_classify", ok ? Verdict::KEEP : Verdict::DROP,
                                     "bucket=" + to_string(bucket), confidence};
            }));
        } else if (stage.name == "langid") {
            check_keys(params, stage.name, {"profiles", "langid_threshold", "allowed"});
            std::string profile_path = require_string(params, "profiles", stage.name);
            auto profiles = std::make_shared<std::vector<LangProfile>>();
            try {
                *profiles = load_langid(profile_path);
            } catch (const std::exception& e) {
                throw ConfigError("stage 'langid': " + std::string(e.what()));
            }
            double threshold = get_double(params, "langid_threshold", kDefaultLangidThreshold);
            std::set<std::string> allowed;
            if (params.contains("allowed")) {
                if (!params.at("allowed").is_array())
                    throw ConfigError("stage 'langid': 'allowed' must be a list");
                for (const auto& l : params.at("allowed")) allowed.insert(l.get<std::string>());
            }
            runners.push_back(per_doc_stage(stage.name, [profiles, threshold,
                                                         allowed](Document& d) {
                auto [lang, confidence] = identify_language(*profiles, d.text, threshold);
                if (lang == "unknown")
                    return StageDecision{"langid", Verdict::DROP, "unknown", confidence};
                if (!allowed.empty() && !allowed.count(lang))
                    return StageDecision{"langid", Verdict::DROP, "lang=" + lang, confidence};
                d.lang = lang;
                return StageDecision{"langid", Verdict::KEEP, "lang=" + lang, confidence};
            }));
        } else if (stage.name == "unicode_reformat") {
            check_keys(params, stage.name, {});
            runners.push_back(per_doc_stage(stage.name, [](Document& d) {
                auto [text, changed] = reformat_unicode(d.text);
                if (!changed)
                    return StageDecision{"unicode_reformat", Verdict::KEEP, "clean", std::nullopt};
                d.text = std::move(text);
                return StageDecision{"unicode_reformat", Verdict::MODIFIED, "reformatted",
                                     std::nullopt};
            }));
        } else if (stage.name == "exact_dedup") {
            check_keys(params, stage.name, {});
            runners.push_back(dedup_stage(
                stage.name,
                [](const std::vector<Document>& docs) {
                    std::map<std::string, std::string> dup_to_kept;
                    for (const auto& [dup, kept] : exact_dedup(docs).dropped)
                        dup_to_kept.emplace(dup, kept);
                    return dup_to_kept;
                },
                "duplicate_of="));
        } else if (stage.name == "fuzzy_dedup") {
            check_keys(params, stage.name,
                       {"shingle_k", "num_hashes", "bands", "rows", "jaccard_threshold",
                        "dedup_seed", "exact_verify"});
            DedupConfig dc;
            dc.shingle_k = get_uint(params, "shingle_k", dc.shingle_k);
            dc.num_hashes = get_uint(params, "num_hashes", dc.num_hashes);
            dc.bands = get_uint(params, "bands", dc.bands);
            dc.rows = get_uint(params, "rows", dc.rows);
            dc.jaccard_threshold = get_double(params, "jaccard_threshold", dc.jaccard_threshold);
            dc.seed = get_uint(params, "dedup_seed", derive_seed(cfg.seed, "fuzzy_dedup"));
            if (params.contains("exact_verify")) {
                if (!params.at("exact_verify").is_boolean())
                    throw ConfigError("stage 'fuzzy_dedup': 'exact_verify' must be a boolean");
                dc.exact_verify = params.at("exact_verify").get<bool>();
            }
            try {
                dc.validate();
            } catch (const std::exception& e) {
                throw ConfigError(std::string("stage 'fuzzy_dedup': ") + e.what());
            }
            runners.push_back(dedup_stage(
                stage.name,
                [dc](const std::vector<Document>& docs) {
                    std::map<std::string, std::string> dup_to_kept;
                    for (const DedupCluster& c : fuzzy_dedup(docs, dc).clusters)
                        for (const std::string& dropped : c.dropped_ids)
                            dup_to_kept.emplace(dropped, c.kept_id);
                    return dup_to_kept;
                },
                "near_duplicate_of="));
        } else if (stage.name == "pii_redact") {
            check_keys(params, stage.name, {"patterns"});
            auto patterns = std::make_shared<PiiPatterns>(default_pii_patterns());
            if (params.contains("patterns")) {
                try {
                    *patterns = load_pii_patterns(get_string(params, "patterns", ""));
                } catch (const std::exception& e) {
                    throw ConfigError("stage 'pii_redact': " + std::string(e.what()));
                }
            }
            runners.push_back(per_doc_stage(stage.name, [patterns](Document& d) {
                std::vector<PiiSpan> spans = detect_pii(d.text, *patterns);
                if (spans.empty())
                    return StageDecision{"pii_redact", Verdict::KEEP, "clean", std::nullopt};
                d.text = redact_pii(d.text, spans);
                return StageDecision{"pii_redact", Verdict::MODIFIED,
                                     "spans=" + std::to_string(spans.size()),
                                     static_cast<double>(spans.size())};
            }));
        } else if (stage.name == "codemath_filter") {
            check_keys(params, stage.name,
                       {"codemath_weights", "codemath_threshold", "classifier"});
            CodeMathWeights weights;
            if (params.contains("codemath_weights")) {
                const json& w = params.at("codemath_weights");
                if (!w.is_array() || w.size() != 4)
                    throw ConfigError(
                        "stage 'codemath_filter': 'codemath_weights' must be 4 numbers "
                        "(code, math, structural, classifier)");
                weights.code = w[0].get<double>();
                weights.math = w[1].get<double>();
                weights.structural = w[2].get<double>();
                weights.classifier = w[3].get<double>();
            }
            try {
                weights.validate();
            } catch (const std::exception& e) {
                throw ConfigError(std::string("stage 'codemath_filter': ") + e.what());
            }
            double threshold = get_double(params, "codemath_threshold", 0.5);
            std::shared_ptr<QualityModel> classifier;
            if (params.contains("classifier")) {
                classifier = std::make_shared<QualityModel>();
                try {
                    *classifier = QualityModel::load(get_string(params, "classifier", ""));
                } catch (const std::exception& e) {
                    throw ConfigError("stage 'codemath_filter': " + std::string(e.what()));
                }
            }
            runners.push_back(
                per_doc_stage(stage.name, [weights, threshold, classifier](Document& d) {
                    CodeMathVerdict v = codemath_filter(d, weights, threshold, classifier.get());
                    return StageDecision{"codemath_filter", v.verdict,
                                         "combined=" + format_double(v.combined, 4), v.combined};
                }));
        } else {
            throw ConfigError("unknown stage '" + stage.name + "'");
        }
    }
    return runners;
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("pipeline config must be a JSON object");
    static const std::set<std::string> known = {
        "stages", "input",     "output",        "dropped",              "report_dir",
        "seed",   "report_format", "histogram", "histogram_tokenizer"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");

    PipelineConfig cfg;
    cfg.input_path = j.value("input", "");
    cfg.output_path = j.value("output", "");
    cfg.dropped_path = j.value("dropped", "");
    cfg.report_dir = j.value("report_dir", "");
    cfg.report_format = j.value("report_format", "tsv");
    cfg.histogram = j.value("histogram", false);
    cfg.histogram_tokenizer = j.value("histogram_tokenizer", "");
    cfg.seed = j.value("seed", uint64_t{0});
    if (cfg.report_format != "tsv" && cfg.report_format != "records")
        throw ConfigError("report_format must be 'tsv' or 'records'");
    if (cfg.histogram && cfg.histogram_tokenizer.empty())
        throw ConfigError("histogram reports need 'histogram_tokenizer'");

    if (j.contains("stages")) {
        if (!j.at("stages").is_array()) throw ConfigError("'stages' must be a list");
        for (const auto& s : j.at("stages")) {
            if (!s.is_object() || !s.contains("name") || !s.at("name").is_string())
                throw ConfigError("each stage needs a 'name'");
            StageConfig stage;
            stage.name = s.at("name").get<std::string>();
            stage.params = s;
            stage.params.erase("name");
            const auto& names = registered_stages();
            if (std::find(names.begin(), names.end(), stage.name) == names.end())
                throw ConfigError("unknown stage '" + stage.name + "'");
            cfg.stages.push_back(std::move(stage));
        }
    }
    return cfg;
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config is not valid JSON: " + path);
    return from_json(j);
}

json PipelineConfig::to_json() const {
    json j;
    json stages_json = json::array();
    for (const StageConfig& s : stages) {
        json e = s.params;
        e["name"] = s.name;
        stages_json.push_back(std::move(e));
    }
    j["stages"] = std::move(stages_json);
    j["input"] = input_path;
    j["output"] = output_path;
    j["dropped"] = dropped_path;
    j["report_dir"] = report_dir;
    j["report_format"] = report_format;
    j["histogram"] = histogram;
    j["histogram_tokenizer"] = histogram_tokenizer;
    j["seed"] = seed;
    return j;
}

std::string PipelineConfig::digest() const {
    Hash128 h = hash128(to_json().dump());
    char buf[33];
    std::snprintf(buf, sizeof(buf), "%016llx%016llx", static_cast<unsigned long long>(h.hi),
                  static_cast<unsigned long long>(h.lo));
    return buf;
}

std::string PipelineReport::to_tsv() const {
    std::string out = "# config_digest=" + config_digest + "\n";
    out += "stage\tinput\tkept\tdropped\tmodified\n";
    uint64_t modified_total = 0;
    for (const StageStats& s : stages) {
        out += s.stage + "\t" + std::to_string(s.input) + "\t" + std::to_string(s.kept) + "\t" +
               std::to_string(s.dropped) + "\t" + std::to_string(s.modified) + "\n";
        modified_total += s.modified;
    }
    out += "total\t" + std::to_string(input_count) + "\t" + std::to_string(output_count) + "\t" +
           std::to_string(input_count - output_count) + "\t" + std::to_string(modified_total) +
           "\n";
    return out;
}

std::string PipelineReport::to_records() const {
    std::string out;
    for (const StageStats& s : stages) {
        json j;
        j["stage"] = s.stage;
        j["input"] = s.input;
        j["kept"] = s.kept;
        j["dropped"] = s.dropped;
        j["modified"] = s.modified;
        out += j.dump();
        out += '\n';
    }
    json total;
    total["config_digest"] = config_digest;
    total["input"] = input_count;
    total["output"] = output_count;
    out += total.dump();
    out += '\n';
    return out;
}

PipelineRun run_pipeline_docs(std::vector<Document> docs, const PipelineConfig& cfg) {
    std::vector<StageRunner> runners = build_stages(cfg);

    PipelineRun run;
    run.report.config_digest = cfg.digest();
    run.report.input_count = docs.size();
    auto start = std::chrono::steady_clock::now();
    for (StageRunner& runner : runners) {
        StageStats stats;
        stats.stage = runner.name;
        stats.input = docs.size();
        auto t0 = std::chrono::steady_clock::now();
        try {
            runner.run(docs, run.dropped, stats);
        } catch (const std::exception& e) {
            run.report.output_count = docs.size();
            throw PipelineError("stage '" + runner.name + "' failed: " + e.what(),
                                run.report);
        }
        auto t1 = std::chrono::steady_clock::now();
        stats.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        stats.kept = docs.size();
        stats.dropped = stats.input - stats.kept;
        run.report.stages.push_back(stats);
    }
    auto end = std::chrono::steady_clock::now();
    run.report.wall_ms = std::chrono::duration<double, std::milli>(end - start).count();
    run.report.output_count = docs.size();
    run.kept = std::move(docs);
    return run;
}

namespace {

void ensure_parent_dir(const std::string& path) {
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

void write_text_file(const std::string& path, const std::string& content) {
    ensure_parent_dir(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

PipelineReport run_pipeline(const PipelineConfig& cfg) {
    if (cfg.input_path.empty()) throw ConfigError("pipeline config needs 'input'");
    if (!fs::exists(cfg.input_path)) throw ConfigError("input does not exist: " + cfg.input_path);
    build_stages(cfg);  // fail on config problems before reading data

    auto [docs, errors] = read_corpus_all(cfg.input_path);
    for (const LineError& e : errors)
        std::fprintf(stderr, "%s:%zu: %s\n", cfg.input_path.c_str(), e.line_no,
                     e.message.c_str());

    PipelineRun run;
    try {
        run = run_pipeline_docs(std::move(docs), cfg);
    } catch (const PipelineError& e) {
        if (!cfg.report_dir.empty()) {
            ReportOptions options;
            options.out_dir = cfg.report_dir;
            options.format = cfg.report_format;
            emit_reports(e.partial_report, {}, options);
        }
        throw;
    }

    if (!cfg.output_path.empty()) {
        ensure_parent_dir(cfg.output_path);
        write_corpus(run.kept, cfg.output_path);
    }
    if (!cfg.dropped_path.empty()) {
        ensure_parent_dir(cfg.dropped_path);
        write_corpus(run.dropped, cfg.dropped_path);
    }
    if (!cfg.report_dir.empty()) {
        ReportOptions options;
        options.out_dir = cfg.report_dir;
        options.format = cfg.report_format;
        TokenizerModel tok;
        if (cfg.histogram) {
            try {
                tok = TokenizerModel::load(cfg.histogram_tokenizer);
            } catch (const std::exception& e) {
                throw ConfigError("histogram tokenizer: " + std::string(e.what()));
            }
            options.histogram = true;
            options.histogram_tokenizer = &tok;
        }
        emit_reports(run.report, run.kept, options);
    }
    return run.report;
}

namespace {

const std::map<std::string, std::string>& language_names() {
    static const std::map<std::string, std::string> names = {
        {"asm", "Assamese"}, {"ben", "Bengali"},   {"eng", "English"},  {"guj", "Gujarati"},
        {"hin", "Hindi"},    {"kan", "Kannada"},   {"mai", "Maithili"}, {"mal", "Malayalam"},
        {"mar", "Marathi"},  {"nep", "Nepali"},    {"ori", "Odia"},     {"pan", "Punjabi"},
        {"san", "Sanskrit"}, {"snd", "Sindhi"},    {"tam", "Tamil"},    {"tel", "Telugu"}};
    return names;
}

std::string row_label(const std::string& code) {
    auto it = language_names().find(code);
    if (it == language_names().end()) return code;
    return code + " – " + it->second;
}

// lang -> (model name -> fertility); languages with zero words are skipped
std::map<std::string, std::map<std::string, double>> fertility_grid(
    const std::vector<TokenizerModel>& models,
    const std::map<std::string, std::vector<Document>>& corpora) {
    std::vector<Document> docs;
    for (const auto& [lang, group] : corpora)
        for (const Document& d : group) {
            docs.push_back(d);
            docs.back().lang = lang;
        }
    std::map<std::string, std::map<std::string, double>> grid;
    for (const TokenizerModel& model : models) {
        FertilityReport report = measure_fertility(model, docs, "");
        for (const auto& [lang, entry] : report.by_lang)
            grid[lang][model.name()] = entry.fertility;
    }
    return grid;
}

}  // namespace

std::string fertility_table(const std::vector<TokenizerModel>& models,
                            const std::map<std::string, std::vector<Document>>& corpora) {
    auto grid = fertility_grid(models, corpora);
    std::string out = "Language";
    for (const TokenizerModel& m : models) out += "\t" + m.name();
    out += "\n";
    for (const auto& [lang, cells] : grid) {
        out += row_label(lang);
        for (const TokenizerModel& m : models) {
            auto it = cells.find(m.name());
            out += "\t" + (it == cells.end() ? std::string("-")
                                             : format_double(it->second, 2));
        }
        out += "\n";
    }
    return out;
}

std::string fertility_records(const std::vector<TokenizerModel>& models,
                              const std::map<std::string, std::vector<Document>>& corpora) {
    auto grid = fertility_grid(models, corpora);
    std::string out;
    for (const auto& [lang, cells] : grid) {
        json j;
        j["lang"] = lang;
        j["fertility"] = cells;
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<std::string> emit_reports(const PipelineReport& report,
                                      const std::vector<Document>& kept,
                                      const ReportOptions& options) {
    if (options.format != "tsv" && options.format != "records")
        throw ConfigError("report format must be 'tsv' or 'records'");
    fs::create_directories(options.out_dir);
    std::vector<std::string> written;

    bool tsv = options.format == "tsv";
    std::string stage_path =
        (fs::path(options.out_dir) / (tsv ? "stage_report.tsv" : "stage_report.jsonl")).string();
    write_text_file(stage_path, tsv ? report.to_tsv() : report.to_records());
    written.push_back(stage_path);

    if (options.histogram) {
        if (!options.histogram_tokenizer)
            throw ConfigError("histogram report needs a tokenizer model");
        LengthHistogram hist = token_length_histogram(kept, *options.histogram_tokenizer);
        std::string hist_path =
            (fs::path(options.out_dir) / (tsv ? "length_histogram.tsv" : "length_histogram.jsonl"))
                .string();
        write_text_file(hist_path, tsv ? hist.to_tsv() : hist.to_json().dump() + "\n");
        written.push_back(hist_path);
    }
    return written;
}

}  // namespace curtok
