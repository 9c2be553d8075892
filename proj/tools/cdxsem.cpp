// cdxsem: semantic annotation and analytics over Web-archive CDX indexes.
//
// Subcommands mirror the processing stages: ingest, stopwords, lang-train,
// lang-eval, annotate, ner-eval, report. Exit codes: 0 success, 1 usage,
// 2 data error.

#include <cstdio>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "cdxsem/errors.hpp"
#include "cdxsem/io.hpp"
#include "cdxsem/pipeline.hpp"
#include "cdxsem/text.hpp"

namespace {

using namespace cdxsem;

struct AnnotateArgs {
    std::string config_file;
    pipeline::RunConfig config;
};

void write_or_print(const std::string& output, const std::string& content) {
    if (output.empty() || output == "-")
        std::fputs(content.c_str(), stdout);
    else
        io::write_file(output, content);
}

std::pair<std::optional<int>, std::optional<int>> parse_years(const std::string& years) {
    if (years.empty())
        return {std::nullopt, std::nullopt};
    const auto colon = years.find(':');
    try {
        if (colon == std::string::npos) {
            const int y = std::stoi(years);
            return {y, y};
        }
        std::optional<int> from, to;
        if (colon > 0)
            from = std::stoi(years.substr(0, colon));
        if (colon + 1 < years.size())
            to = std::stoi(years.substr(colon + 1));
        return {from, to};
    } catch (const std::exception&) {
        throw UsageError("bad --years value: " + years + " (expected YYYY or FROM:TO)");
    }
}

int run_lang_eval(const std::string& labeled_path, const std::vector<std::string>& profile_paths,
                  double cutoff, const std::string& stop_path, const std::string& output) {
    tokenize::StopList stop;
    if (!stop_path.empty())
        stop = tokenize::StopList::load(stop_path);
    std::vector<langid::LanguageProfile> profiles;
    for (const auto& p : profile_paths)
        profiles.push_back(langid::LanguageProfile::load(p));

    std::vector<std::pair<std::vector<std::string>, std::string>> labeled;
    io::LineReader reader(labeled_path);
    std::string_view line;
    std::size_t line_no = 0;
    while (reader.next(line)) {
        ++line_no;
        const auto t = text::trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        const auto tab = t.find('\t');
        if (tab == std::string_view::npos)
            throw DataError(labeled_path + ":" + std::to_string(line_no) + ": expected url<TAB>tag");
        labeled.emplace_back(tokenize::tokenize_url(text::trim(t.substr(0, tab)), stop),
                             std::string(text::trim(t.substr(tab + 1))));
    }
    if (labeled.empty())
        throw DataError("no labeled URLs in " + labeled_path);

    const auto report = langid::evaluate_language_precision(labeled, profiles, cutoff);
    write_or_print(output, report.to_csv());
    std::fprintf(stderr, "lang-eval: %llu labeled, accuracy %.4f\n",
                 static_cast<unsigned long long>(report.total), report.accuracy());
    return 0;
}

int run_ner_eval(const std::string& annotations, std::size_t sample_size, std::uint64_t seed,
                 std::size_t max_terms, std::uint64_t min_url_freq, const std::string& verdicts_path,
                 const std::string& output) {
    auto corpus = pipeline::collect_extractions(annotations);
    const auto& extractions = corpus.urls;
    const auto& table = corpus.table;

    if (verdicts_path.empty()) {
        // Emit the judging sheet for the sampled URLs.
        const auto indices = entities::sample_indices(extractions.size(), sample_size, seed);
        std::string sheet = "# url<TAB>language<TAB>label<TAB>type<TAB>verdict(1 correct, 0 incorrect)\n";
        for (const auto idx : indices)
            for (const auto& [label, type] : extractions[idx].mentions)
                sheet += extractions[idx].url + "\t" + extractions[idx].language + "\t" + label + "\t" +
                         std::string(entities::to_string(type)) + "\t?\n";
        write_or_print(output, sheet);
        std::fprintf(stderr, "ner-eval: wrote judging sheet for %zu of %zu entity-bearing URLs\n",
                     indices.size(), extractions.size());
        return 0;
    }

    // Verdict files key mentions by (url, label, type); language column in
    // sheets is informational and skipped on load.
    entities::NerVerdicts verdicts;
    {
        io::LineReader reader(verdicts_path);
        std::string_view line;
        std::size_t line_no = 0;
        while (reader.next(line)) {
            ++line_no;
            const auto t = text::trim(line);
            if (t.empty() || t[0] == '#')
                continue;
            std::vector<std::string_view> cols;
            std::size_t pos = 0;
            while (true) {
                const auto tab = t.find('\t', pos);
                if (tab == std::string_view::npos) {
                    cols.push_back(t.substr(pos));
                    break;
                }
                cols.push_back(t.substr(pos, tab - pos));
                pos = tab + 1;
            }
            std::string_view url, label, type_name, verdict;
            if (cols.size() == 4) {
                url = cols[0], label = cols[1], type_name = cols[2], verdict = cols[3];
            } else if (cols.size() == 5) {
                url = cols[0], label = cols[2], type_name = cols[3], verdict = cols[4];
            } else {
                throw DataError(verdicts_path + ":" + std::to_string(line_no) + ": expected 4 or 5 columns");
            }
            const auto type = entities::entity_type_from(type_name);
            if (!type)
                throw DataError(verdicts_path + ":" + std::to_string(line_no) + ": unknown entity type");
            const auto v = text::trim(verdict);
            if (v != "0" && v != "1")
                throw DataError(verdicts_path + ":" + std::to_string(line_no) + ": verdict must be 0 or 1");
            verdicts.add(url, label, *type, v == "1");
        }
    }

    const auto surviving = entities::postfilter(table, max_terms, min_url_freq);
    const auto report = entities::evaluate_ner_precision(extractions, surviving, verdicts, sample_size, seed);
    write_or_print(output, report.to_csv());
    std::fprintf(stderr, "ner-eval: sampled %llu of %llu entity-bearing URLs (seed %llu)\n",
                 static_cast<unsigned long long>(report.sampled_urls),
                 static_cast<unsigned long long>(report.candidate_urls),
                 static_cast<unsigned long long>(report.seed));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semantic URL annotation and analytics for Web-archive CDX indexes"};
    app.require_subcommand(1);

    // --- ingest ---
    auto* ingest = app.add_subcommand("ingest", "Apply the cleaning filters and write an ingest summary");
    pipeline::RunConfig ingest_cfg;
    std::string ingest_captures_out;
    ingest->add_option("-i,--input", ingest_cfg.inputs, "CDX input file(s), plain or .gz")->required();
    ingest->add_option("--layout", ingest_cfg.layout, "Field layout: default, auto, or a descriptor");
    ingest->add_option("--category-map", ingest_cfg.category_map, "TSV domain<TAB>category");
    ingest->add_option("-o,--output-dir", ingest_cfg.output_dir, "Output directory")->required();
    ingest->add_option("--workers", ingest_cfg.workers, "Worker threads");
    ingest->add_option("--emit-captures", ingest_captures_out, "Also write admitted captures as NDJSON");

    // --- stopwords ---
    auto* stopwords = app.add_subcommand("stopwords", "Generate stop-word candidates from a URL sample");
    pipeline::RunConfig stop_cfg;
    std::size_t stop_sample_size = 10000;
    std::size_t stop_top_k = 100;
    std::string stop_output;
    stopwords->add_option("-i,--input", stop_cfg.inputs, "CDX input file(s)")->required();
    stopwords->add_option("--layout", stop_cfg.layout, "Field layout");
    stopwords->add_option("--category-map", stop_cfg.category_map, "TSV domain<TAB>category");
    stopwords->add_option("--sample-size", stop_sample_size, "Distinct URLs to sample (default 10000)");
    stopwords->add_option("--top-k", stop_top_k, "Candidates to report (default 100)");
    stopwords->add_option("--seed", stop_cfg.seed, "Sampling seed");
    stopwords->add_option("-o,--output", stop_output, "Candidate CSV (default stdout)");

    // --- lang-train ---
    auto* lang_train = app.add_subcommand("lang-train", "Train a character n-gram language profile");
    std::string lt_input, lt_language, lt_output;
    int lt_orders = 3;
    std::size_t lt_max_rank = 1000;
    lang_train->add_option("-i,--input", lt_input, "Token list: token [count] per line")->required();
    lang_train->add_option("-l,--language", lt_language, "Language tag, e.g. de")->required();
    lang_train->add_option("--orders", lt_orders, "Highest n-gram order (default 3)");
    lang_train->add_option("--max-rank", lt_max_rank, "Profile size (default 1000)");
    lang_train->add_option("-o,--output", lt_output, "Profile JSON path")->required();

    // --- lang-eval ---
    auto* lang_eval = app.add_subcommand("lang-eval", "Evaluate language detection on labeled URLs");
    std::string le_labeled, le_stop, le_output;
    std::vector<std::string> le_profiles;
    double le_cutoff = 0.8;
    lang_eval->add_option("--labeled", le_labeled, "TSV url<TAB>gold-tag")->required();
    lang_eval->add_option("--profiles", le_profiles, "Profile JSON file(s)")->required();
    lang_eval->add_option("--cutoff", le_cutoff, "Relative distance cutoff (default 0.8)");
    lang_eval->add_option("--stop-list", le_stop, "Stop-word list applied before detection");
    lang_eval->add_option("-o,--output", le_output, "Report CSV (default stdout)");

    // --- annotate ---
    auto* annotate = app.add_subcommand("annotate", "Run the full annotation pipeline");
    AnnotateArgs an;
    annotate->add_option("--config", an.config_file, "JSON config; flags override its values");
    auto* an_inputs = annotate->add_option("-i,--input", an.config.inputs, "CDX input file(s)");
    auto* an_layout = annotate->add_option("--layout", an.config.layout, "Field layout");
    auto* an_catmap = annotate->add_option("--category-map", an.config.category_map, "TSV domain<TAB>category");
    auto* an_stop = annotate->add_option("--stop-list", an.config.stop_list, "Stop-word list");
    auto* an_profiles = annotate->add_option("--profiles", an.config.profiles, "Language profile JSON file(s)");
    auto* an_gaz = annotate->add_option("--gazetteer", an.config.gazetteer, "Gazetteer TSV");
    auto* an_maxterms = annotate->add_option("--max-terms", an.config.max_terms, "Post-filter label length (default 2)");
    auto* an_minfreq = annotate->add_option("--min-url-freq", an.config.min_url_freq, "Post-filter URL frequency (default 3)");
    auto* an_cutoff = annotate->add_option("--lang-cutoff", an.config.lang_cutoff, "Language cutoff (default 0.8)");
    auto* an_seed = annotate->add_option("--seed", an.config.seed, "Run seed, recorded in the manifest");
    auto* an_outdir = annotate->add_option("-o,--output-dir", an.config.output_dir, "Output directory");
    auto* an_workers = annotate->add_option("--workers", an.config.workers, "Worker threads (default 1)");
    auto* an_prefilter = annotate->add_flag("--emit-prefilter", an.config.emit_prefilter,
                                            "Keep pre-filter annotations and entity table");
    auto* an_approx = annotate->add_flag("--approximate-distinct", an.config.approximate_distinct,
                                         "Sketched distinct-URL counts (memory-bounded mode)");

    // --- ner-eval ---
    auto* ner_eval = app.add_subcommand("ner-eval", "Sample entity-bearing URLs and measure NER precision");
    std::string ne_annotations, ne_verdicts, ne_output;
    std::size_t ne_sample = 100;
    std::uint64_t ne_seed = 1;
    std::size_t ne_max_terms = 2;
    std::uint64_t ne_min_freq = 3;
    ner_eval->add_option("--annotations", ne_annotations, "Pre-filter annotations NDJSON")->required();
    ner_eval->add_option("--sample-size", ne_sample, "URLs to sample (default 100)");
    ner_eval->add_option("--seed", ne_seed, "Sampling seed");
    ner_eval->add_option("--max-terms", ne_max_terms, "Post-filter label length (default 2)");
    ner_eval->add_option("--min-url-freq", ne_min_freq, "Post-filter URL frequency (default 3)");
    ner_eval->add_option("--verdicts", ne_verdicts, "Filled judging sheet; omit to emit a blank sheet");
    ner_eval->add_option("-o,--output", ne_output, "Report CSV or sheet TSV (default stdout)");

    // --- report ---
    auto* report = app.add_subcommand("report", "Aggregate an annotated corpus");
    pipeline::ReportSpec spec;
    std::string rp_annotations, rp_years, rp_output;
    report->add_option("--annotations", rp_annotations, "Annotations NDJSON");
    report
        ->add_option("--kind", spec.kind,
                     "I.e. captures-per-year, captures-per-category-year, entity-share, "
                     "entity-share-per-category-year, dominant-domains, top-entities, "
                     "entity-type-distribution, totals")
        ->required();
    report->add_option("--format", spec.format, "csv, json, or tsv (default csv)");
    report->add_option("--category", spec.categories, "Restrict to these categories");
    report->add_option("--years", rp_years, "Year or FROM:TO range");
    report->add_option("--top-k", spec.top_k, "Entities to rank (default 10)");
    report->add_option("--type", spec.entity_type, "Entity type for top-entities (default location)");
    report->add_option("--entity-table", spec.entity_table, "Entity table CSV for top-entities");
    report->add_option("-o,--output", rp_output, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*ingest) {
            const auto manifest = pipeline::run_ingest(
                ingest_cfg, ingest_captures_out.empty() ? std::nullopt
                                                        : std::optional<std::string>(ingest_captures_out));
            std::fprintf(stderr, "ingest: %llu lines, %llu admitted\n",
                         static_cast<unsigned long long>(manifest.counters.lines_read),
                         static_cast<unsigned long long>(manifest.counters.admitted_captures));
            return 0;
        }
        if (*stopwords) {
            const auto candidates = pipeline::run_stopword_candidates(stop_cfg, stop_sample_size, stop_top_k);
            if (candidates.sample_degraded)
                std::fprintf(stderr,
                             "stopwords: corpus has only %llu distinct URLs (requested %zu); "
                             "sampled the whole corpus\n",
                             static_cast<unsigned long long>(candidates.distinct_urls), stop_sample_size);
            write_or_print(stop_output, candidates.to_csv());
            return 0;
        }
        if (*lang_train) {
            const auto tokens = langid::load_weighted_tokens(lt_input);
            const auto profile = langid::LanguageProfile::train(tokens, lt_language, lt_orders, lt_max_rank);
            profile.save(lt_output);
            std::fprintf(stderr, "lang-train: %s profile with %zu n-grams\n", lt_language.c_str(),
                         profile.size());
            return 0;
        }
        if (*lang_eval)
            return run_lang_eval(le_labeled, le_profiles, le_cutoff, le_stop, le_output);
        if (*annotate) {
            pipeline::RunConfig config;
            if (!an.config_file.empty())
                config = pipeline::RunConfig::from_json_file(an.config_file);
            if (an_inputs->count())
                config.inputs = an.config.inputs;
            if (an_layout->count())
                config.layout = an.config.layout;
            if (an_catmap->count())
                config.category_map = an.config.category_map;
            if (an_stop->count())
                config.stop_list = an.config.stop_list;
            if (an_profiles->count())
                config.profiles = an.config.profiles;
            if (an_gaz->count())
                config.gazetteer = an.config.gazetteer;
            if (an_maxterms->count())
                config.max_terms = an.config.max_terms;
            if (an_minfreq->count())
                config.min_url_freq = an.config.min_url_freq;
            if (an_cutoff->count())
                config.lang_cutoff = an.config.lang_cutoff;
            if (an_seed->count())
                config.seed = an.config.seed;
            if (an_outdir->count())
                config.output_dir = an.config.output_dir;
            if (an_workers->count())
                config.workers = an.config.workers;
            if (an_prefilter->count())
                config.emit_prefilter = an.config.emit_prefilter;
            if (an_approx->count())
                config.approximate_distinct = an.config.approximate_distinct;

            const auto manifest = pipeline::run_annotate(config);
            std::fprintf(stderr, "annotate: %llu captures admitted, %llu with entities\n",
                         static_cast<unsigned long long>(manifest.counters.admitted_captures),
                         static_cast<unsigned long long>(manifest.counters.entity_bearing_captures));
            return 0;
        }
        if (*ner_eval)
            return run_ner_eval(ne_annotations, ne_sample, ne_seed, ne_max_terms, ne_min_freq, ne_verdicts,
                                ne_output);
        if (*report) {
            const auto [from, to] = parse_years(rp_years);
            spec.year_from = from;
            spec.year_to = to;
            write_or_print(rp_output, pipeline::run_report(rp_annotations, spec));
            return 0;
        }
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
