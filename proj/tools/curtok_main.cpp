// Command-line front end: curate, train-tokenizer, fertility,
// optimize-mixture, sft-filter, report. Exit codes: 0 success, 1 config
// error, 2 runtime failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "curtok/corpus.hpp"
#include "curtok/hash.hpp"
#include "curtok/mixture.hpp"
#include "curtok/pipeline.hpp"
#include "curtok/sft.hpp"
#include "curtok/tokenizer.hpp"
#include "curtok/unicode.hpp"

using json = nlohmann::json;
namespace fs = std::filesystem;
using namespace curtok;

namespace {

json load_config_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config is not valid JSON: " + path);
    if (!j.is_object()) throw ConfigError("config must be a JSON object: " + path);
    return j;
}

std::vector<Document> load_corpus_docs(const std::string& path, const std::string& what) {
    if (!fs::exists(path)) throw ConfigError(what + " does not exist: " + path);
    auto [docs, errors] = read_corpus_all(path);
    for (const LineError& e : errors)
        std::fprintf(stderr, "%s:%zu: %s\n", path.c_str(), e.line_no, e.message.c_str());
    return docs;
}

std::map<std::string, std::vector<Document>> load_corpora_map(const json& obj,
                                                              const std::string& what) {
    if (!obj.is_object() || obj.empty())
        throw ConfigError(what + " must be a non-empty object of lang -> corpus path");
    std::map<std::string, std::vector<Document>> corpora;
    for (const auto& [lang, path] : obj.items()) {
        if (!path.is_string()) throw ConfigError(what + "." + lang + " must be a path");
        corpora[lang] = load_corpus_docs(path.get<std::string>(), what + "." + lang);
    }
    return corpora;
}

TokenizerModel load_model(const std::string& path) {
    try {
        return TokenizerModel::load(path);
    } catch (const std::exception& e) {
        throw ConfigError("tokenizer model " + path + ": " + e.what());
    }
}

void write_file(const std::string& path, const std::string& content) {
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

struct CommonFlags {
    std::string config_path;
    std::string out_dir = ".";
    std::string format = "tsv";
    uint64_t seed = 0;
    bool seed_given = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_format = true) {
    cmd->add_option("--config", flags.config_path, "JSON config file")
        ->required();
    cmd->add_option("--out", flags.out_dir, "output directory");
    auto* seed_opt = cmd->add_option("--seed", flags.seed, "root RNG seed override");
    cmd->callback([&flags, seed_opt] { flags.seed_given = seed_opt->count() > 0; });
    if (with_format)
        cmd->add_option("--format", flags.format, "report format")
            ->check(CLI::IsMember({"tsv", "records"}));
}

int cmd_curate(const CommonFlags& flags, bool out_given, bool format_given) {
    PipelineConfig cfg = PipelineConfig::from_file(flags.config_path);
    if (flags.seed_given) cfg.seed = flags.seed;
    if (out_given) cfg.report_dir = flags.out_dir;
    if (format_given) cfg.report_format = flags.format;
    PipelineReport report = run_pipeline(cfg);
    std::cout << report.to_tsv();
    return 0;
}

int cmd_train_tokenizer(const CommonFlags& flags) {
    json j = load_config_json(flags.config_path);
    BpeTrainConfig cfg;
    std::vector<std::string> input_paths;
    if (j.contains("inputs"))
        for (const auto& p : j.at("inputs")) input_paths.push_back(p.get<std::string>());
    else if (j.contains("input"))
        input_paths.push_back(j.at("input").get<std::string>());
    if (input_paths.empty()) throw ConfigError("train config needs 'input' or 'inputs'");
    cfg.vocab_size = j.value("vocab_size", cfg.vocab_size);
    cfg.min_pair_count = j.value("min_pair_count", cfg.min_pair_count);
    cfg.name = j.value("name", cfg.name);
    cfg.pretok.split_digits = j.value("split_digits", cfg.pretok.split_digits);
    if (j.contains("specials"))
        for (const auto& s : j.at("specials")) cfg.specials.push_back(s.get<std::string>());
    uint64_t max_chars = j.value("max_chars", uint64_t{0});

    std::vector<std::string> texts;
    uint64_t chars = 0;
    for (const std::string& path : input_paths) {
        for (Document& d : load_corpus_docs(path, "input")) {
            if (max_chars > 0 && chars >= max_chars) break;
            chars += uni::decode_utf8(d.text).size();
            texts.push_back(std::move(d.text));
        }
    }
    if (texts.empty()) throw ConfigError("no training text found");

    TokenizerModel model = train_bpe(texts, cfg);
    std::string model_path = (fs::path(flags.out_dir) / (cfg.name + ".json")).string();
    fs::create_directories(flags.out_dir);
    model.save(model_path);
    std::cout << "model\t" << model_path << "\n"
              << "vocab_size\t" << model.vocab_size() << "\n"
              << "merges\t" << model.merges().size() << "\n";
    return 0;
}

int cmd_fertility(const CommonFlags& flags) {
    json j = load_config_json(flags.config_path);
    if (!j.contains("models") || !j.at("models").is_array() || j.at("models").empty())
        throw ConfigError("fertility config needs a non-empty 'models' list");
    std::vector<TokenizerModel> models;
    for (const auto& p : j.at("models")) models.push_back(load_model(p.get<std::string>()));
    if (!j.contains("corpora")) throw ConfigError("fertility config needs 'corpora'");
    auto corpora = load_corpora_map(j.at("corpora"), "corpora");

    fs::create_directories(flags.out_dir);
    std::string out_path;
    std::string content;
    if (flags.format == "tsv") {
        content = fertility_table(models, corpora);
        out_path = (fs::path(flags.out_dir) / "fertility.tsv").string();
    } else {
        content = fertility_records(models, corpora);
        out_path = (fs::path(flags.out_dir) / "fertility.jsonl").string();
    }
    write_file(out_path, content);
    std::cout << content;
    return 0;
}

int cmd_optimize_mixture(const CommonFlags& flags) {
    json j = load_config_json(flags.config_path);
    if (!j.contains("corpora")) throw ConfigError("mixture config needs 'corpora'");
    auto corpora = load_corpora_map(j.at("corpora"), "corpora");
    auto eval_corpora =
        j.contains("eval_corpora") ? load_corpora_map(j.at("eval_corpora"), "eval_corpora")
                                   : corpora;

    OptimizerConfig cfg;
    cfg.mu = j.value("mu", cfg.mu);
    cfg.epsilon = j.value("epsilon", cfg.epsilon);
    cfg.f_best = j.value("f_best", cfg.f_best);
    cfg.total_chars = j.value("total_chars", cfg.total_chars);
    cfg.iterations = j.value("iterations", cfg.iterations);
    cfg.seed = j.value("seed", cfg.seed);
    if (flags.seed_given) cfg.seed = flags.seed;
    cfg.bpe.vocab_size = j.value("vocab_size", size_t{4096});
    try {
        cfg.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }

    MixtureState state = run_mixture_loop(corpora, eval_corpora, cfg);

    fs::create_directories(flags.out_dir);
    std::string traj_path = (fs::path(flags.out_dir) / "trajectory.jsonl").string();
    write_file(traj_path, trajectory_to_jsonl(state));

    std::string content;
    if (flags.format == "tsv") {
        content = "lang\tmixture\n";
        for (const auto& [lang, m] : state.mixture) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.6f", m);
            content += lang + "\t" + buf + "\n";
        }
        write_file((fs::path(flags.out_dir) / "mixture.tsv").string(), content);
    } else {
        json out;
        out["iteration"] = state.iteration;
        out["mixture"] = state.mixture;
        content = out.dump() + "\n";
        write_file((fs::path(flags.out_dir) / "mixture.jsonl").string(), content);
    }
    std::cout << content;
    return 0;
}

int cmd_sft_filter(const CommonFlags& flags) {
    json j = load_config_json(flags.config_path);
    if (!j.contains("input")) throw ConfigError("sft config needs 'input'");
    std::vector<Document> docs = load_corpus_docs(j.at("input").get<std::string>(), "input");
    std::vector<InstructionPair> pairs;
    pairs.reserve(docs.size());
    for (const Document& d : docs) pairs.push_back(pair_from_document(d));

    JudgeRunConfig run_cfg;
    if (j.contains("policy")) {
        const json& p = j.at("policy");
        run_cfg.policy.max_code = p.value("max_code", run_cfg.policy.max_code);
        run_cfg.policy.max_math = p.value("max_math", run_cfg.policy.max_math);
        run_cfg.policy.max_toxic = p.value("max_toxic", run_cfg.policy.max_toxic);
        run_cfg.policy.min_quality = p.value("min_quality", run_cfg.policy.min_quality);
        run_cfg.policy.required_language =
            p.value("required_language", run_cfg.policy.required_language);
    }
    run_cfg.retries = j.value("retries", run_cfg.retries);
    run_cfg.backoff_ms = j.value("backoff_ms", run_cfg.backoff_ms);

    if (!j.contains("judge") || !j.at("judge").is_object())
        throw ConfigError("sft config needs a 'judge' object");
    const json& judge = j.at("judge");
    std::unique_ptr<JudgeClient> client;
    if (judge.contains("stub")) {
        std::string stub_path = judge.at("stub").get<std::string>();
        std::ifstream in(stub_path, std::ios::binary);
        if (!in) throw ConfigError("cannot open stub responses: " + stub_path);
        std::vector<std::string> responses;
        std::string line;
        while (std::getline(in, line)) responses.push_back(line);
        client = std::make_unique<StubJudgeClient>(std::move(responses));
    } else if (judge.contains("endpoint")) {
        JudgeEndpointConfig ec;
        ec.url = judge.at("endpoint").get<std::string>();
        ec.auth_token_env = judge.value("auth_token_env", ec.auth_token_env);
        ec.timeout_seconds = judge.value("timeout_seconds", ec.timeout_seconds);
        client = std::make_unique<HttpJudgeClient>(ec);
    } else {
        throw ConfigError("judge needs 'endpoint' or 'stub'");
    }

    // Optional language gate before any judging.
    if (j.contains("language_precheck")) {
        const json& lp = j.at("language_precheck");
        std::vector<LangProfile> profiles;
        try {
            profiles = load_langid(lp.at("profiles").get<std::string>());
        } catch (const std::exception& e) {
            throw ConfigError(std::string("language_precheck: ") + e.what());
        }
        double threshold = lp.value("threshold", kDefaultLangidThreshold);
        std::vector<InstructionPair> passed;
        for (const InstructionPair& p : pairs)
            if (language_rule_filter(p, profiles, threshold).verdict != Verdict::DROP)
                passed.push_back(p);
        pairs = std::move(passed);
    }

    fs::create_directories(flags.out_dir);
    std::string audit_path =
        j.value("audit", (fs::path(flags.out_dir) / "audit.jsonl").string());
    fs::path ap(audit_path);
    if (ap.has_parent_path()) fs::create_directories(ap.parent_path());
    std::ofstream audit(audit_path, std::ios::binary);
    if (!audit) throw std::runtime_error("cannot open audit log: " + audit_path);

    std::vector<JudgedPair> judged = judge_pairs(*client, pairs, run_cfg, &audit);

    std::vector<Document> kept, dropped;
    for (const JudgedPair& jp : judged) {
        Document d = pair_to_document(jp.pair);
        d.trail.push_back(jp.decision);
        (jp.decision.verdict == Verdict::DROP ? dropped : kept).push_back(std::move(d));
    }
    std::string kept_path = j.value("output", (fs::path(flags.out_dir) / "kept.jsonl").string());
    write_corpus(kept, kept_path);
    if (j.contains("dropped")) write_corpus(dropped, j.at("dropped").get<std::string>());

    std::cout << "judged\t" << judged.size() << "\n"
              << "kept\t" << kept.size() << "\n"
              << "dropped\t" << dropped.size() << "\n";
    return 0;
}

// Rebuilds per-stage stats from the decision trails of kept + dropped docs.
PipelineReport report_from_trails(const std::vector<Document>& kept,
                                  const std::vector<Document>& dropped) {
    PipelineReport report;
    std::vector<std::string> order;
    std::map<std::string, StageStats> by_stage;
    auto scan = [&](const std::vector<Document>& docs) {
        for (const Document& d : docs)
            for (const StageDecision& dec : d.trail) {
                if (!by_stage.count(dec.stage)) {
                    order.push_back(dec.stage);
                    by_stage[dec.stage].stage = dec.stage;
                }
                StageStats& s = by_stage[dec.stage];
                ++s.input;
                if (dec.verdict == Verdict::DROP) ++s.dropped;
                else ++s.kept;
                if (dec.verdict == Verdict::MODIFIED) ++s.modified;
            }
    };
    scan(kept);
    scan(dropped);
    for (const std::string& name : order) report.stages.push_back(by_stage[name]);
    report.input_count = kept.size() + dropped.size();
    report.output_count = kept.size();
    return report;
}

int cmd_report(const CommonFlags& flags) {
    json j = load_config_json(flags.config_path);
    if (!j.contains("kept")) throw ConfigError("report config needs 'kept'");
    std::vector<Document> kept = load_corpus_docs(j.at("kept").get<std::string>(), "kept");
    std::vector<Document> dropped;
    if (j.contains("dropped"))
        dropped = load_corpus_docs(j.at("dropped").get<std::string>(), "dropped");

    PipelineReport report = report_from_trails(kept, dropped);
    Hash128 h = hash128(j.dump());
    char digest[33];
    std::snprintf(digest, sizeof(digest), "%016llx%016llx",
                  static_cast<unsigned long long>(h.hi), static_cast<unsigned long long>(h.lo));
    report.config_digest = digest;

    ReportOptions options;
    options.out_dir = flags.out_dir;
    options.format = flags.format;
    TokenizerModel tok;
    if (j.contains("histogram_tokenizer")) {
        tok = load_model(j.at("histogram_tokenizer").get<std::string>());
        options.histogram = true;
        options.histogram_tokenizer = &tok;
    }
    std::vector<std::string> written = emit_reports(report, kept, options);

    if (j.contains("models") && j.contains("corpora")) {
        std::vector<TokenizerModel> models;
        for (const auto& p : j.at("models")) models.push_back(load_model(p.get<std::string>()));
        auto corpora = load_corpora_map(j.at("corpora"), "corpora");
        bool tsv = flags.format == "tsv";
        std::string path =
            (fs::path(flags.out_dir) / (tsv ? "fertility.tsv" : "fertility.jsonl")).string();
        write_file(path, tsv ? fertility_table(models, corpora)
                             : fertility_records(models, corpora));
        written.push_back(path);
    }
    for (const std::string& path : written) std::cout << path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"corpus curation and tokenizer optimization toolkit"};
    app.require_subcommand(1);

    CommonFlags curate_flags, train_flags, fert_flags, mix_flags, sft_flags, report_flags;

    auto* curate = app.add_subcommand("curate", "run the filtering pipeline");
    add_common(curate, curate_flags);
    auto* train = app.add_subcommand("train-tokenizer", "train a BPE tokenizer");
    add_common(train, train_flags, false);
    auto* fert = app.add_subcommand("fertility", "measure tokens-per-word by language");
    add_common(fert, fert_flags);
    auto* mix = app.add_subcommand("optimize-mixture", "fertility-driven mixture optimization");
    add_common(mix, mix_flags);
    auto* sft = app.add_subcommand("sft-filter", "judge-based instruction pair filtering");
    add_common(sft, sft_flags, false);
    auto* report = app.add_subcommand("report", "emit reports from curated corpora");
    add_common(report, report_flags);

    try {
        app.parse(argc, argv);
        if (curate->parsed())
            return cmd_curate(curate_flags, curate->count("--out") > 0,
                              curate->count("--format") > 0);
        if (train->parsed()) return cmd_train_tokenizer(train_flags);
        if (fert->parsed()) return cmd_fertility(fert_flags);
        if (mix->parsed()) return cmd_optimize_mixture(mix_flags);
        if (sft->parsed()) return cmd_sft_filter(sft_flags);
        if (report->parsed()) return cmd_report(report_flags);
        return 1;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
