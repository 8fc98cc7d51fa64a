#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "curtok/corpus.hpp"
#include "curtok/tokenizer.hpp"

namespace curtok {

// Configuration problems exit with code 1; runtime failures with 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StageConfig {
    std::string name;
    nlohmann::json params;  // stage-specific keys, validated per schema
};

struct PipelineConfig {
    std::vector<StageConfig> stages;
    std::string input_path;
    std::string output_path;
    std::string dropped_path;  // optional; dropped docs with their trails
    std::string report_dir;    // optional; where reports land
    std::string report_format = "tsv";  // "tsv" | "records"
    bool histogram = false;
    std::string histogram_tokenizer;  // model path, required when histogram on
    uint64_t seed = 0;

    static PipelineConfig from_json(const nlohmann::json& j);
    static PipelineConfig from_file(const std::string& path);
    nlohmann::json to_json() const;
    std::string digest() const;  // hash of the canonical JSON form
};

// Stage names accepted in configs, in the default order.
const std::vector<std::string>& registered_stages();

struct StageStats {
    std::string stage;
    uint64_t input = 0;
    uint64_t kept = 0;
    uint64_t dropped = 0;
    uint64_t modified = 0;  // modified docs are also counted in kept
    double wall_ms = 0.0;   // in-memory only; serialized reports omit it
};

struct PipelineReport {
    std::vector<StageStats> stages;
    uint64_t input_count = 0;
    uint64_t output_count = 0;
    std::string config_digest;
    double wall_ms = 0.0;

    // Timing stays out of both so reruns are byte-identical.
    std::string to_tsv() const;
    std::string to_records() const;  // one JSON object per line
};

struct PipelineRun {
    std::vector<Document> kept;
    std::vector<Document> dropped;
    PipelineReport report;
};

struct PipelineError : std::runtime_error {
    PipelineError(const std::string& what, PipelineReport partial)
        : std::runtime_error(what), partial_report(std::move(partial)) {}
    PipelineReport partial_report;
};

// Validates config and loads stage resources before touching any input.
PipelineRun run_pipeline_docs(std::vector<Document> docs, const PipelineConfig& cfg);

// File-to-file variant: reads input_path, writes output/dropped/report files.
PipelineReport run_pipeline(const PipelineConfig& cfg);

// Languages sorted by code; one column per model; cells to 2 decimals.
// Known codes render as "hin – Hindi" style row labels.
std::string fertility_table(const std::vector<TokenizerModel>& models,
                            const std::map<std::string, std::vector<Document>>& corpora);
// Machine-readable variant: one JSON object per language.
std::string fertility_records(const std::vector<TokenizerModel>& models,
                              const std::map<std::string, std::vector<Document>>& corpora);

struct ReportOptions {
    std::string out_dir;
    std::string format = "tsv";  // "tsv" | "records"
    bool histogram = false;
    const TokenizerModel* histogram_tokenizer = nullptr;
};

// Writes the stage report and any optional reports; returns written paths.
std::vector<std::string> emit_reports(const PipelineReport& report,
                                      const std::vector<Document>& kept,
                                      const ReportOptions& options);

}  // namespace curtok
