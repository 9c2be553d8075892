#include "cdxsem/pipeline.hpp"

#include <algorithm>
#include <fstream>

#include "cdxsem/errors.hpp"
#include "cdxsem/io.hpp"
#include "cdxsem/parallel.hpp"
#include "cdxsem/text.hpp"

namespace cdxsem::pipeline {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kChunkLines = 2048; // fixed so output bytes never depend on worker count

void require_file(const std::string& path, const char* what) {
    if (path.empty())
        throw UsageError(std::string(what) + " not configured");
    if (!fs::exists(path))
        throw UsageError(std::string(what) + " does not exist: " + path);
}

} // namespace

RunConfig RunConfig::from_json_file(const fs::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(io::read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad config file " + path.string() + ": " + e.what());
    }
    RunConfig config;
    config.apply_json(j);
    return config;
}

void RunConfig::apply_json(const nlohmann::json& j) {
    try {
        if (j.contains("inputs"))
            inputs = j.at("inputs").get<std::vector<std::string>>();
        if (j.contains("layout"))
            layout = j.at("layout").get<std::string>();
        if (j.contains("category_map"))
            category_map = j.at("category_map").get<std::string>();
        if (j.contains("stop_list"))
            stop_list = j.at("stop_list").get<std::string>();
        if (j.contains("profiles"))
            profiles = j.at("profiles").get<std::vector<std::string>>();
        if (j.contains("gazetteer"))
            gazetteer = j.at("gazetteer").get<std::string>();
        if (j.contains("max_terms"))
            max_terms = j.at("max_terms").get<std::size_t>();
        if (j.contains("min_url_freq"))
            min_url_freq = j.at("min_url_freq").get<std::uint64_t>();
        if (j.contains("lang_cutoff"))
            lang_cutoff = j.at("lang_cutoff").get<double>();
        if (j.contains("seed"))
            seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("output_dir"))
            output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("workers"))
            workers = j.at("workers").get<int>();
        if (j.contains("emit_prefilter"))
            emit_prefilter = j.at("emit_prefilter").get<bool>();
        if (j.contains("approximate_distinct"))
            approximate_distinct = j.at("approximate_distinct").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bad config value: ") + e.what());
    }
}

nlohmann::json RunConfig::to_json() const {
    return nlohmann::json{{"inputs", inputs},
                          {"layout", layout},
                          {"category_map", category_map},
                          {"stop_list", stop_list},
                          {"profiles", profiles},
                          {"gazetteer", gazetteer},
                          {"max_terms", max_terms},
                          {"min_url_freq", min_url_freq},
                          {"lang_cutoff", lang_cutoff},
                          {"seed", seed},
                          {"output_dir", output_dir},
                          {"workers", workers},
                          {"emit_prefilter", emit_prefilter},
                          {"approximate_distinct", approximate_distinct}};
}

void StageCounters::merge(const StageCounters& o) {
    lines_read += o.lines_read;
    header_lines += o.header_lines;
    malformed_lines += o.malformed_lines;
    non_html += o.non_html;
    never_successful += o.never_successful;
    admitted_captures += o.admitted_captures;
    urls_without_tokens += o.urls_without_tokens;
    language_de += o.language_de;
    language_en += o.language_en;
    language_other += o.language_other;
    prefilter_entity_bearing += o.prefilter_entity_bearing;
    entity_bearing_captures += o.entity_bearing_captures;
    annotation_rows += o.annotation_rows;
}

nlohmann::json StageCounters::to_json() const {
    return nlohmann::json{{"lines_read", lines_read},
                          {"header_lines", header_lines},
                          {"malformed_lines", malformed_lines},
                          {"records_parsed", records_parsed()},
                          {"non_html", non_html},
                          {"never_successful", never_successful},
                          {"admitted_captures", admitted_captures},
                          {"urls_without_tokens", urls_without_tokens},
                          {"language_de", language_de},
                          {"language_en", language_en},
                          {"language_other", language_other},
                          {"prefilter_entity_bearing", prefilter_entity_bearing},
                          {"entity_bearing_captures", entity_bearing_captures},
                          {"annotation_rows", annotation_rows}};
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json inputs = nlohmann::json::array();
    for (const auto& [path, digest] : input_digests)
        inputs.push_back({{"path", path}, {"digest", digest}});
    return nlohmann::json{{"tool", "cdxsem"},
                          {"tool_version", std::string(kToolVersion)},
                          {"completed", completed},
                          {"error", error},
                          {"seed", config.seed},
                          {"config", config.to_json()},
                          {"inputs", inputs},
                          {"counters", counters.to_json()}};
}

void RunManifest::write(const fs::path& path) const {
    io::write_file(path, to_json().dump(2) + "\n");
}

std::string annotation_to_json(const analytics::AnnotatedCapture& row) {
    nlohmann::json entities = nlohmann::json::array();
    for (const auto& [label, type] : row.mentions)
        entities.push_back({{"label", label}, {"type", std::string(entities::to_string(type))}});
    const nlohmann::json j{{"url", row.url},         {"timestamp", row.timestamp},
                           {"domain", row.domain},   {"category", row.category},
                           {"year", row.year},       {"language", row.language},
                           {"entities", entities}};
    return j.dump();
}

analytics::AnnotatedCapture annotation_from_json(std::string_view line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bad annotation row: ") + e.what());
    }
    analytics::AnnotatedCapture row;
    try {
        row.url = j.at("url").get<std::string>();
        row.timestamp = j.at("timestamp").get<std::string>();
        row.domain = j.at("domain").get<std::string>();
        row.category = j.at("category").get<std::string>();
        row.year = j.at("year").get<int>();
        row.language = j.at("language").get<std::string>();
        for (const auto& e : j.at("entities")) {
            const auto type = entities::entity_type_from(e.at("type").get<std::string>());
            if (!type)
                throw DataError("bad annotation row: unknown entity type");
            row.mentions.emplace_back(e.at("label").get<std::string>(), *type);
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bad annotation row: ") + e.what());
    }
    return row;
}

std::vector<analytics::AnnotatedCapture> load_annotations(const fs::path& path) {
    std::vector<analytics::AnnotatedCapture> rows;
    io::LineReader reader(path);
    std::string_view line;
    while (reader.next(line)) {
        if (text::trim(line).empty())
            continue;
        rows.push_back(annotation_from_json(line));
    }
    return rows;
}

namespace {

void for_each_annotation(const fs::path& path,
                         const std::function<void(analytics::AnnotatedCapture&&)>& fn) {
    io::LineReader reader(path);
    std::string_view line;
    while (reader.next(line)) {
        if (text::trim(line).empty())
            continue;
        fn(annotation_from_json(line));
    }
}

cdx::FieldLayout resolve_layout(const RunConfig& config) {
    if (config.layout == "default")
        return cdx::FieldLayout::standard11();
    if (config.layout == "auto") {
        if (!config.inputs.empty()) {
            io::LineReader reader(config.inputs.front());
            std::string_view first;
            if (reader.next(first))
                if (auto layout = cdx::FieldLayout::from_header(first))
                    return *layout;
        }
        return cdx::FieldLayout::standard11();
    }
    return cdx::FieldLayout::parse(config.layout);
}

bool skip_as_header(std::string_view line) {
    return line.empty() || (line.front() == ' ' && cdx::FieldLayout::is_header(line));
}

struct Pass1Result {
    cdx::UrlIdentitySet successful;
    std::uint64_t lines = 0;
    std::uint64_t headers = 0;
    std::uint64_t malformed = 0;
};

// Pass 1: the set of URL identities that ever answered 2xx.
Pass1Result collect_successful(const RunConfig& config, const cdx::FieldLayout& layout) {
    Pass1Result total;
    auto map = [&layout](parallel::LineChunk&& chunk) {
        Pass1Result partial;
        for (const auto& line : chunk.lines) {
            if (skip_as_header(line)) {
                ++partial.lines;
                ++partial.headers;
                continue;
            }
            cdx::IngestCounters counters;
            cdx::collect_successful_urls(line, layout, partial.successful, counters);
            partial.lines += counters.lines_read;
            partial.malformed += counters.malformed_lines;
        }
        return partial;
    };
    auto emit = [&total](Pass1Result&& partial) {
        total.lines += partial.lines;
        total.headers += partial.headers;
        total.malformed += partial.malformed;
        if (total.successful.empty())
            total.successful = std::move(partial.successful);
        else
            total.successful.merge(partial.successful);
    };
    parallel::run_chunked<Pass1Result>(config.inputs, config.workers, kChunkLines, map, emit);
    return total;
}

struct AnnotateContext {
    cdx::FieldLayout layout;
    cdx::UrlIdentitySet successful;
    cdx::CategoryMap categories;
    tokenize::StopList stop;
    std::vector<langid::LanguageProfile> profiles;
    entities::Gazetteer gazetteer;
    double cutoff = 0.8;
};

struct Pass2Row {
    std::string json;
    std::string url;
    std::vector<std::pair<std::string, entities::EntityType>> mentions;
};

struct Pass2Chunk {
    StageCounters counters;
    std::vector<Pass2Row> rows;
};

Pass2Chunk process_chunk(parallel::LineChunk&& chunk, const AnnotateContext& ctx) {
    Pass2Chunk out;
    for (const auto& line : chunk.lines) {
        ++out.counters.lines_read;
        if (skip_as_header(line)) {
            ++out.counters.header_lines;
            continue;
        }
        auto record = cdx::parse_cdx_line(line, ctx.layout);
        if (!record) {
            ++out.counters.malformed_lines;
            continue;
        }
        if (!cdx::is_html_capture(*record)) {
            ++out.counters.non_html;
            continue;
        }
        if (!ctx.successful.contains(cdx::url_identity(*record))) {
            ++out.counters.never_successful;
            continue;
        }
        ++out.counters.admitted_captures;
        cdx::Capture capture = cdx::enrich_capture(std::move(*record), ctx.categories);

        auto raw_tokens = tokenize::extract_path_tokens(capture.record.original_url);
        if (raw_tokens.empty())
            ++out.counters.urls_without_tokens;
        const auto tokens = tokenize::clean_tokens(std::move(raw_tokens), ctx.stop);

        const auto decision = langid::detect_language(tokens, ctx.profiles, ctx.cutoff);
        if (decision.tag == "de")
            ++out.counters.language_de;
        else if (decision.tag == "en")
            ++out.counters.language_en;
        else
            ++out.counters.language_other;

        analytics::AnnotatedCapture row;
        row.url = capture.record.original_url;
        row.timestamp = capture.record.timestamp;
        row.domain = capture.domain;
        row.category = capture.category;
        row.year = capture.year;
        row.language = decision.tag;
        if (decision.tag != langid::kOtherTag)
            row.mentions = ctx.gazetteer.match(tokens, decision.tag);

        Pass2Row out_row;
        out_row.url = row.url;
        out_row.mentions = row.mentions;
        out_row.json = annotation_to_json(row);
        out.rows.push_back(std::move(out_row));
    }
    return out;
}

} // namespace

RunManifest run_annotate(const RunConfig& config) {
    RunManifest manifest;
    manifest.config = config;

    if (config.inputs.empty())
        throw UsageError("no input files configured");
    for (const auto& input : config.inputs)
        require_file(input, "input");
    require_file(config.gazetteer, "gazetteer");
    if (config.profiles.empty())
        throw UsageError("no language profiles configured");
    for (const auto& p : config.profiles)
        require_file(p, "language profile");
    if (!config.category_map.empty())
        require_file(config.category_map, "category map");
    if (!config.stop_list.empty())
        require_file(config.stop_list, "stop list");
    if (config.output_dir.empty())
        throw UsageError("output directory not configured");
    if (config.workers < 1)
        throw UsageError("workers must be at least 1");

    fs::create_directories(config.output_dir);
    const fs::path out_dir(config.output_dir);
    const fs::path annotations_path = out_dir / kAnnotationsFile;
    const fs::path prefilter_path = out_dir / kPrefilterAnnotationsFile;
    const fs::path manifest_path = out_dir / kManifestFile;

    for (const auto& input : config.inputs)
        manifest.input_digests.emplace_back(input, io::file_digest(input));

    AnnotateContext ctx;
    ctx.cutoff = config.lang_cutoff;
    ctx.layout = resolve_layout(config);
    if (!config.category_map.empty())
        ctx.categories = cdx::CategoryMap::load(config.category_map);
    if (!config.stop_list.empty())
        ctx.stop = tokenize::StopList::load(config.stop_list);
    for (const auto& p : config.profiles)
        ctx.profiles.push_back(langid::LanguageProfile::load(p));
    for (const auto required : {"de", "en"}) {
        const bool found = std::any_of(ctx.profiles.begin(), ctx.profiles.end(),
                                       [&](const auto& p) { return p.language() == required; });
        if (!found)
            throw DataError(std::string("annotate needs a \"") + required + "\" language profile");
    }
    ctx.gazetteer = entities::Gazetteer::load(config.gazetteer);

    auto fail = [&](const std::string& stage, const std::exception& e) -> RunManifest {
        manifest.completed = false;
        manifest.error = stage + ": " + e.what();
        manifest.write(manifest_path);
        throw DataError(manifest.error);
    };

    // Pass 1: successful-URL identities.
    try {
        auto pass1 = collect_successful(config, ctx.layout);
        ctx.successful = std::move(pass1.successful);
        manifest.counters.lines_read = pass1.lines;
        manifest.counters.header_lines = pass1.headers;
        manifest.counters.malformed_lines = pass1.malformed;
    } catch (const std::exception& e) {
        return fail("ingest pass 1", e);
    }

    // Pass 2: admission, tokens, language, extraction; pre-filter rows out,
    // entity table accumulated.
    entities::EntityTable table(config.approximate_distinct);
    StageCounters pass2;
    try {
        std::ofstream prefilter(prefilter_path, std::ios::binary | std::ios::trunc);
        if (!prefilter)
            throw DataError("cannot write " + prefilter_path.string());
        auto map = [&ctx](parallel::LineChunk&& chunk) { return process_chunk(std::move(chunk), ctx); };
        auto emit = [&](Pass2Chunk&& chunk) {
            pass2.merge(chunk.counters);
            for (auto& row : chunk.rows) {
                if (!row.mentions.empty())
                    ++pass2.prefilter_entity_bearing;
                for (auto& [label, type] : row.mentions) {
                    entities::EntityMention mention;
                    mention.label = label;
                    mention.type = type;
                    mention.url = row.url;
                    table.add(mention);
                }
                prefilter << row.json << '\n';
            }
        };
        parallel::run_chunked<Pass2Chunk>(config.inputs, config.workers, kChunkLines, map, emit);
        prefilter.flush();
        if (!prefilter)
            throw DataError("write failed: " + prefilter_path.string());
    } catch (const std::exception& e) {
        return fail("annotate pass 2", e);
    }
    manifest.counters.non_html = pass2.non_html;
    manifest.counters.never_successful = pass2.never_successful;
    manifest.counters.admitted_captures = pass2.admitted_captures;
    manifest.counters.urls_without_tokens = pass2.urls_without_tokens;
    manifest.counters.language_de = pass2.language_de;
    manifest.counters.language_en = pass2.language_en;
    manifest.counters.language_other = pass2.language_other;
    manifest.counters.prefilter_entity_bearing = pass2.prefilter_entity_bearing;

    // Post-filter, then project surviving entities back onto the rows.
    try {
        const entities::EntityTable surviving = entities::postfilter(table, config.max_terms, config.min_url_freq);
        io::write_file(out_dir / kEntityTableFile, surviving.to_csv());
        if (config.emit_prefilter)
            io::write_file(out_dir / kPrefilterEntityTableFile, table.to_csv());

        std::ofstream out(annotations_path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw DataError("cannot write " + annotations_path.string());
        io::LineReader reader(prefilter_path);
        std::string_view line;
        while (reader.next(line)) {
            if (text::trim(line).empty())
                continue;
            auto row = annotation_from_json(line);
            std::erase_if(row.mentions, [&](const auto& m) {
                return !surviving.contains({m.first, m.second});
            });
            if (!row.mentions.empty())
                ++manifest.counters.entity_bearing_captures;
            ++manifest.counters.annotation_rows;
            out << annotation_to_json(row) << '\n';
        }
        out.flush();
        if (!out)
            throw DataError("write failed: " + annotations_path.string());
    } catch (const std::exception& e) {
        return fail("post-filter pass 3", e);
    }

    if (!config.emit_prefilter)
        fs::remove(prefilter_path);

    manifest.completed = true;
    manifest.write(manifest_path);
    return manifest;
}

RunManifest run_ingest(const RunConfig& config, const std::optional<std::string>& captures_out) {
    RunManifest manifest;
    manifest.config = config;

    if (config.inputs.empty())
        throw UsageError("no input files configured");
    for (const auto& input : config.inputs)
        require_file(input, "input");
    if (!config.category_map.empty())
        require_file(config.category_map, "category map");
    if (config.output_dir.empty())
        throw UsageError("output directory not configured");

    fs::create_directories(config.output_dir);
    const cdx::FieldLayout layout = resolve_layout(config);
    cdx::CategoryMap categories;
    if (!config.category_map.empty())
        categories = cdx::CategoryMap::load(config.category_map);

    for (const auto& input : config.inputs)
        manifest.input_digests.emplace_back(input, io::file_digest(input));

    auto pass1 = collect_successful(config, layout);
    manifest.counters.lines_read = pass1.lines;
    manifest.counters.header_lines = pass1.headers;
    manifest.counters.malformed_lines = pass1.malformed;

    std::ofstream captures_stream;
    if (captures_out) {
        captures_stream.open(*captures_out, std::ios::binary | std::ios::trunc);
        if (!captures_stream)
            throw DataError("cannot write " + *captures_out);
    }

    cdx::IngestCounters admit_counters;
    io::for_each_line(config.inputs, [&](std::string_view line) {
        if (skip_as_header(line))
            return;
        if (auto capture = cdx::admit_capture(line, layout, pass1.successful, categories, admit_counters)) {
            if (captures_out) {
                const nlohmann::json j{{"url", capture->record.original_url},
                                       {"timestamp", capture->record.timestamp},
                                       {"domain", capture->domain},
                                       {"category", capture->category},
                                       {"year", capture->year}};
                captures_stream << j.dump() << '\n';
            }
        }
    });
    manifest.counters.non_html = admit_counters.non_html;
    manifest.counters.never_successful = admit_counters.never_successful;
    manifest.counters.admitted_captures = admit_counters.admitted;

    const nlohmann::json summary{{"lines_read", manifest.counters.lines_read},
                                 {"header_lines", manifest.counters.header_lines},
                                 {"malformed_lines", manifest.counters.malformed_lines},
                                 {"non_html", manifest.counters.non_html},
                                 {"never_successful", manifest.counters.never_successful},
                                 {"admitted_captures", manifest.counters.admitted_captures},
                                 {"successful_urls", pass1.successful.size()}};
    io::write_file(fs::path(config.output_dir) / kIngestSummaryFile, summary.dump(2) + "\n");
    manifest.completed = true;
    return manifest;
}

tokenize::StopCandidateReport run_stopword_candidates(const RunConfig& config, std::size_t sample_size,
                                                      std::size_t top_k) {
    if (config.inputs.empty())
        throw UsageError("no input files configured");
    for (const auto& input : config.inputs)
        require_file(input, "input");
    if (!config.category_map.empty())
        require_file(config.category_map, "category map");

    const cdx::FieldLayout layout = resolve_layout(config);
    cdx::CategoryMap categories;
    if (!config.category_map.empty())
        categories = cdx::CategoryMap::load(config.category_map);

    auto pass1 = collect_successful(config, layout);

    tokenize::StopCandidateBuilder builder(sample_size, config.seed);
    cdx::IngestCounters admit_counters;
    io::for_each_line(config.inputs, [&](std::string_view line) {
        if (skip_as_header(line))
            return;
        if (auto capture = cdx::admit_capture(line, layout, pass1.successful, categories, admit_counters))
            builder.add_url(capture->record.original_url);
    });
    return builder.finish(top_k);
}

ExtractionCorpus collect_extractions(const fs::path& prefilter_annotations) {
    ExtractionCorpus corpus;
    std::unordered_map<std::string, std::size_t> url_index;
    for_each_annotation(prefilter_annotations, [&](analytics::AnnotatedCapture&& row) {
        for (const auto& [label, type] : row.mentions) {
            entities::EntityMention m;
            m.label = label;
            m.type = type;
            m.url = row.url;
            m.timestamp = row.timestamp;
            m.language = row.language;
            corpus.table.add(m);
        }
        if (row.mentions.empty())
            return;
        auto [it, inserted] = url_index.try_emplace(row.url, corpus.urls.size());
        if (inserted) {
            entities::UrlExtraction e;
            e.url = row.url;
            e.language = row.language;
            corpus.urls.push_back(std::move(e));
        }
        auto& mentions = corpus.urls[it->second].mentions;
        for (const auto& mention : row.mentions)
            if (std::find(mentions.begin(), mentions.end(), mention) == mentions.end())
                mentions.push_back(mention);
    });
    return corpus;
}

const std::vector<std::string>& report_kinds() {
    static const std::vector<std::string> kinds = {
        "captures-per-year",     "captures-per-category-year", "entity-share",
        "entity-share-per-category-year", "dominant-domains",  "top-entities",
        "entity-type-distribution",       "totals"};
    return kinds;
}

namespace {

bool year_in_range(int year, const ReportSpec& spec) {
    if (spec.year_from && year < *spec.year_from)
        return false;
    if (spec.year_to && year > *spec.year_to)
        return false;
    return true;
}

bool category_selected(const std::string& category, const ReportSpec& spec) {
    return spec.categories.empty() ||
           std::find(spec.categories.begin(), spec.categories.end(), category) != spec.categories.end();
}

} // namespace

std::string run_report(const fs::path& annotations, const ReportSpec& spec) {
    const auto& kinds = report_kinds();
    if (std::find(kinds.begin(), kinds.end(), spec.kind) == kinds.end())
        throw UsageError("unknown report kind: " + spec.kind);
    if (spec.format != "csv" && spec.format != "json" && spec.format != "tsv")
        throw UsageError("unknown report format: " + spec.format);

    if (spec.kind == "top-entities") {
        if (spec.entity_table.empty())
            throw UsageError("top-entities needs --entity-table");
        if (!fs::exists(spec.entity_table))
            throw DataError("missing entity table: " + spec.entity_table);
        const auto type = entities::entity_type_from(spec.entity_type);
        if (!type)
            throw UsageError("unknown entity type: " + spec.entity_type);
        const auto table = entities::EntityTable::from_csv(spec.entity_table);
        const auto ranked = analytics::top_entities(table, *type, spec.top_k);
        if (spec.format == "json") {
            nlohmann::json j = nlohmann::json::array();
            for (const auto& [key, freq] : ranked)
                j.push_back({{"label", key.label},
                             {"type", std::string(entities::to_string(key.type))},
                             {"capture_frequency", freq}});
            return j.dump(2) + "\n";
        }
        return analytics::top_entities_csv(ranked); // csv and tsv share the layout
    }

    if (!fs::exists(annotations))
        throw DataError("missing annotated corpus: " + annotations.string());

    analytics::Aggregator agg;
    for_each_annotation(annotations, [&](analytics::AnnotatedCapture&& row) { agg.add(std::move(row)); });

    if (spec.kind == "captures-per-year") {
        auto series = agg.captures_per_year();
        std::erase_if(series, [&](const auto& kv) { return !year_in_range(kv.first, spec); });
        if (spec.format == "json")
            return analytics::year_series_json(series);
        if (spec.format == "tsv")
            return analytics::year_series_tsv(series);
        return analytics::year_series_csv(series);
    }
    if (spec.kind == "captures-per-category-year") {
        auto table = agg.captures_per_category_year(spec.categories);
        std::erase_if(table, [&](const auto& kv) { return !year_in_range(kv.first.second, spec); });
        if (spec.format == "json")
            return analytics::category_year_json(table);
        if (spec.format == "tsv")
            return analytics::category_year_tsv(table);
        return analytics::category_year_csv(table);
    }
    if (spec.kind == "entity-share") {
        auto report = agg.entity_capture_share();
        std::erase_if(report, [&](const auto& kv) { return !category_selected(kv.first, spec); });
        if (spec.format == "json")
            return analytics::category_report_json(report);
        return analytics::category_report_csv(report);
    }
    if (spec.kind == "entity-share-per-category-year") {
        auto cells = agg.entity_share_per_category_year();
        std::erase_if(cells, [&](const auto& kv) {
            return !year_in_range(kv.first.second, spec) || !category_selected(kv.first.first, spec);
        });
        if (spec.format == "tsv")
            return analytics::entity_share_cells_tsv(cells);
        if (spec.format == "json") {
            nlohmann::json j = nlohmann::json::array();
            for (const auto& [key, pct] : cells)
                j.push_back({{"category", key.first}, {"year", key.second}, {"entity_capture_share", pct}});
            return j.dump(2) + "\n";
        }
        return analytics::entity_share_cells_csv(cells);
    }
    if (spec.kind == "dominant-domains") {
        auto records = agg.dominant_domains();
        std::erase_if(records, [&](const analytics::DominanceRecord& r) {
            return !year_in_range(r.year, spec) || !category_selected(r.category, spec);
        });
        if (spec.format == "json")
            return analytics::dominance_json(records);
        return analytics::dominance_csv(records);
    }
    if (spec.kind == "entity-type-distribution") {
        auto dist = agg.entity_type_distribution();
        std::erase_if(dist, [&](const auto& kv) { return !year_in_range(kv.first, spec); });
        if (spec.format == "tsv")
            return analytics::type_distribution_tsv(dist);
        if (spec.format == "json") {
            nlohmann::json j = nlohmann::json::array();
            for (const auto& [year, types] : dist)
                for (const auto& [type, share] : types)
                    j.push_back({{"year", year},
                                 {"type", std::string(entities::to_string(type))},
                                 {"share", share}});
            return j.dump(2) + "\n";
        }
        return analytics::type_distribution_csv(dist);
    }
    // totals
    if (spec.format == "json") {
        const nlohmann::json j{{"total_captures", agg.total_captures()},
                               {"entity_captures", agg.total_entity_captures()}};
        return j.dump(2) + "\n";
    }
    return "metric,value\nentity_captures," + std::to_string(agg.total_entity_captures()) +
           "\ntotal_captures," + std::to_string(agg.total_captures()) + "\n";
}

} // namespace cdxsem::pipeline
