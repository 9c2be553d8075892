#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cdxsem/analytics.hpp"
#include "cdxsem/cdx.hpp"
#include "cdxsem/entities.hpp"
#include "cdxsem/langid.hpp"
#include "cdxsem/tokenize.hpp"

namespace cdxsem::pipeline {

inline constexpr std::string_view kToolVersion = "0.1.0";

struct RunConfig {
    std::vector<std::string> inputs;
    std::string layout = "default"; // "default" | "auto" | explicit descriptor
    std::string category_map;       // optional
    std::string stop_list;          // optional; empty stop list when unset
    std::vector<std::string> profiles;
    std::string gazetteer;
    std::size_t max_terms = 2;
    std::uint64_t min_url_freq = 3;
    double lang_cutoff = 0.8;
    std::uint64_t seed = 1;
    std::string output_dir;
    int workers = 1;
    bool emit_prefilter = false;
    bool approximate_distinct = false;

    static RunConfig from_json_file(const std::filesystem::path& path);
    void apply_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct StageCounters {
    std::uint64_t lines_read = 0;
    std::uint64_t header_lines = 0;
    std::uint64_t malformed_lines = 0;
    std::uint64_t non_html = 0;
    std::uint64_t never_successful = 0;
    std::uint64_t admitted_captures = 0;
    std::uint64_t urls_without_tokens = 0;
    std::uint64_t language_de = 0;
    std::uint64_t language_en = 0;
    std::uint64_t language_other = 0;
    std::uint64_t prefilter_entity_bearing = 0;
    std::uint64_t entity_bearing_captures = 0;
    std::uint64_t annotation_rows = 0;

    std::uint64_t records_parsed() const { return lines_read - header_lines - malformed_lines; }
    void merge(const StageCounters& o);
    nlohmann::json to_json() const;
};

struct RunManifest {
    RunConfig config;
    StageCounters counters;
    std::vector<std::pair<std::string, std::string>> input_digests; // (path, digest)
    bool completed = false;
    std::string error;

    nlohmann::json to_json() const;
    void write(const std::filesystem::path& path) const;
};

// File names inside the output directory.
inline constexpr std::string_view kAnnotationsFile = "annotations.ndjson";
inline constexpr std::string_view kPrefilterAnnotationsFile = "annotations_prefilter.ndjson";
inline constexpr std::string_view kEntityTableFile = "entity_table.csv";
inline constexpr std::string_view kPrefilterEntityTableFile = "entity_table_prefilter.csv";
inline constexpr std::string_view kManifestFile = "manifest.json";
inline constexpr std::string_view kIngestSummaryFile = "ingest_summary.json";

std::string annotation_to_json(const analytics::AnnotatedCapture& row);
analytics::AnnotatedCapture annotation_from_json(std::string_view line);

// Loads every annotation row of an NDJSON file.
std::vector<analytics::AnnotatedCapture> load_annotations(const std::filesystem::path& path);

// ingest -> tokenize -> stop words -> language -> extraction -> accumulate
// -> post-filter -> mention filtering, in two streaming passes plus a
// rewrite of the intermediate annotations. Deterministic for fixed
// (inputs, config, seed) at any worker count.
RunManifest run_annotate(const RunConfig& config);

// Passes 1-2 only: cleaning filters and an ingest summary; optionally
// writes the admitted captures as NDJSON.
RunManifest run_ingest(const RunConfig& config, const std::optional<std::string>& captures_out);

// Stop-word candidate generation over the admitted captures.
tokenize::StopCandidateReport run_stopword_candidates(const RunConfig& config, std::size_t sample_size,
                                                      std::size_t top_k);

// Distinct entity-bearing URLs (first-seen order, distinct mentions per
// URL) plus the corpus-wide entity table, from pre-filter annotations.
struct ExtractionCorpus {
    std::vector<entities::UrlExtraction> urls;
    entities::EntityTable table{false};
};

ExtractionCorpus collect_extractions(const std::filesystem::path& prefilter_annotations);

struct ReportSpec {
    std::string kind;            // captures-per-year, top-entities, ...
    std::string format = "csv";  // csv | json | tsv
    std::vector<std::string> categories;
    std::optional<int> year_from;
    std::optional<int> year_to;
    std::size_t top_k = 10;
    std::string entity_type = "location";
    std::string entity_table; // needed by top-entities
};

// Renders one report over an annotated corpus; deterministic bytes.
std::string run_report(const std::filesystem::path& annotations, const ReportSpec& spec);

const std::vector<std::string>& report_kinds();

} // namespace cdxsem::pipeline
