#include "cdxsem/entities.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <random>

#include "cdxsem/errors.hpp"
#include "cdxsem/io.hpp"
#include "cdxsem/text.hpp"

namespace cdxsem::entities {

std::string_view to_string(EntityType type) {
    switch (type) {
    case EntityType::location:
        return "location";
    case EntityType::person:
        return "person";
    case EntityType::organization:
        return "organization";
    case EntityType::misc:
        return "misc";
    }
    return "misc";
}

std::optional<EntityType> entity_type_from(std::string_view name) {
    if (name == "location")
        return EntityType::location;
    if (name == "person")
        return EntityType::person;
    if (name == "organization")
        return EntityType::organization;
    if (name == "misc")
        return EntityType::misc;
    return std::nullopt;
}

std::size_t label_term_count(std::string_view label) {
    if (label.empty())
        return 0;
    return static_cast<std::size_t>(std::count(label.begin(), label.end(), ' ')) + 1;
}

namespace {

// Labels are normalized like URL paths: alphabetic runs, lowercased.
std::vector<std::string> label_terms(std::string_view label) {
    std::vector<std::string> terms;
    std::string current;
    std::size_t i = 0;
    while (i < label.size()) {
        const char32_t cp = text::decode_utf8(label, i);
        if (text::is_alpha(cp)) {
            text::append_utf8(current, text::to_lower(cp));
        } else if (!current.empty()) {
            terms.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty())
        terms.push_back(std::move(current));
    return terms;
}

std::string join_terms(std::span<const std::string> terms) {
    std::string out;
    for (const auto& t : terms) {
        if (!out.empty())
            out.push_back(' ');
        out += t;
    }
    return out;
}

} // namespace

bool Gazetteer::add(std::string_view label, EntityType type, std::string_view language) {
    const auto terms = label_terms(label);
    if (terms.empty())
        return false;
    for (const auto& t : terms)
        if (text::codepoint_count(t) < 3)
            return false;
    auto& table = languages_[std::string(language)];
    table.phrases[join_terms(terms)] = type;
    table.max_terms = std::max(table.max_terms, terms.size());
    return true;
}

Gazetteer Gazetteer::load(const std::filesystem::path& path, LoadStats* stats) {
    Gazetteer g;
    LoadStats local;
    io::LineReader reader(path);
    std::string_view line;
    std::size_t line_no = 0;
    while (reader.next(line)) {
        ++line_no;
        const auto t = text::trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        std::vector<std::string_view> cols;
        std::size_t pos = 0;
        while (cols.size() < 3 && pos <= t.size()) {
            const auto tab = t.find('\t', pos);
            if (tab == std::string_view::npos) {
                cols.push_back(text::trim(t.substr(pos)));
                break;
            }
            cols.push_back(text::trim(t.substr(pos, tab - pos)));
            pos = tab + 1;
        }
        if (cols.size() != 3)
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": expected label<TAB>type<TAB>language");
        const auto type = entity_type_from(cols[1]);
        if (!type)
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": unknown entity type \"" +
                            std::string(cols[1]) + "\"");
        if (g.add(cols[0], *type, cols[2]))
            ++local.entries;
        else
            ++local.skipped_incompatible;
    }
    if (stats)
        *stats = local;
    return g;
}

bool Gazetteer::has_language(const std::string& language) const {
    return languages_.contains(language);
}

std::size_t Gazetteer::size() const {
    std::size_t n = 0;
    for (const auto& [lang, table] : languages_)
        n += table.phrases.size();
    return n;
}

std::vector<std::pair<std::string, EntityType>> Gazetteer::match(std::span<const std::string> tokens,
                                                                 const std::string& language) const {
    std::vector<std::pair<std::string, EntityType>> matches;
    const auto lang_it = languages_.find(language);
    if (lang_it == languages_.end())
        return matches;
    const LangTable& table = lang_it->second;

    std::size_t i = 0;
    while (i < tokens.size()) {
        std::size_t matched = 0;
        const std::size_t longest = std::min(table.max_terms, tokens.size() - i);
        for (std::size_t len = longest; len >= 1; --len) {
            const std::string phrase = join_terms(tokens.subspan(i, len));
            if (const auto it = table.phrases.find(phrase); it != table.phrases.end()) {
                matches.emplace_back(phrase, it->second);
                matched = len;
                break;
            }
        }
        i += matched ? matched : 1;
    }
    return matches;
}

std::vector<EntityMention> extract_entities(std::span<const std::string> tokens, const std::string& language,
                                            const CaptureRef& capture, const Gazetteer& gazetteer) {
    std::vector<EntityMention> mentions;
    for (auto& [label, type] : gazetteer.match(tokens, language)) {
        EntityMention m;
        m.label = label;
        m.type = type;
        m.url = capture.url;
        m.timestamp = capture.timestamp;
        m.language = language;
        mentions.push_back(std::move(m));
    }
    return mentions;
}

std::size_t EntityKeyHash::operator()(const EntityKey& k) const {
    std::uint64_t h = text::fnv1a64(k.label);
    h ^= static_cast<std::uint64_t>(k.type) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
}

void DistinctSketch::add_hash(std::uint64_t hash) {
    const auto idx = static_cast<std::size_t>(hash >> 56);
    const std::uint64_t rest = hash << 8;
    const auto rho = static_cast<std::uint8_t>(rest == 0 ? 57 : std::countl_zero(rest) + 1);
    registers_[idx] = std::max(registers_[idx], rho);
}

void DistinctSketch::merge(const DistinctSketch& o) {
    for (std::size_t i = 0; i < registers_.size(); ++i)
        registers_[i] = std::max(registers_[i], o.registers_[i]);
}

std::uint64_t DistinctSketch::estimate() const {
    constexpr double m = 256.0;
    constexpr double alpha = 0.7213 / (1.0 + 1.079 / m);
    double inverse_sum = 0.0;
    int zeros = 0;
    for (const auto r : registers_) {
        inverse_sum += std::ldexp(1.0, -static_cast<int>(r));
        if (r == 0)
            ++zeros;
    }
    double estimate = alpha * m * m / inverse_sum;
    if (estimate <= 2.5 * m && zeros > 0)
        estimate = m * std::log(m / zeros);
    return static_cast<std::uint64_t>(std::llround(estimate));
}

EntityTable::EntityTable(bool approximate_distinct) : approximate_(approximate_distinct) {}

void EntityTable::add(const EntityMention& mention) {
    const EntityKey key{mention.label, mention.type};
    ++capture_counts_[key];
    if (approximate_)
        sketches_[key].add_hash(text::fnv1a64(mention.url));
    else
        exact_urls_[key].insert(mention.url);
}

void EntityTable::merge(const EntityTable& other) {
    if (!fixed_url_counts_.empty() || !other.fixed_url_counts_.empty())
        throw DataError("entity tables loaded from CSV cannot be merged");
    if (approximate_ != other.approximate_)
        throw DataError("cannot merge exact and approximate entity tables");
    for (const auto& [key, count] : other.capture_counts_)
        capture_counts_[key] += count;
    if (approximate_) {
        for (const auto& [key, sketch] : other.sketches_)
            sketches_[key].merge(sketch);
    } else {
        for (const auto& [key, urls] : other.exact_urls_)
            exact_urls_[key].insert(urls.begin(), urls.end());
    }
}

bool EntityTable::contains(const EntityKey& key) const {
    return capture_counts_.contains(key);
}

std::uint64_t EntityTable::url_frequency_of(const EntityKey& key) const {
    if (const auto it = fixed_url_counts_.find(key); it != fixed_url_counts_.end())
        return it->second;
    if (approximate_) {
        const auto it = sketches_.find(key);
        if (it == sketches_.end())
            return 0;
        const auto cap_it = capture_counts_.find(key);
        const std::uint64_t captures = cap_it == capture_counts_.end() ? 0 : cap_it->second;
        return std::min(it->second.estimate(), captures);
    }
    const auto it = exact_urls_.find(key);
    return it == exact_urls_.end() ? 0 : it->second.size();
}

std::vector<std::pair<EntityKey, EntityTable::Entry>> EntityTable::entries() const {
    std::vector<std::pair<EntityKey, Entry>> out;
    out.reserve(capture_counts_.size());
    for (const auto& [key, captures] : capture_counts_)
        out.emplace_back(key, Entry{captures, url_frequency_of(key)});
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

std::string EntityTable::to_csv() const {
    std::string out = "label,type,url_frequency,capture_frequency\n";
    char buf[64];
    for (const auto& [key, entry] : entries()) {
        out += key.label;
        out.push_back(',');
        out += to_string(key.type);
        std::snprintf(buf, sizeof(buf), ",%llu,%llu\n", static_cast<unsigned long long>(entry.url_frequency),
                      static_cast<unsigned long long>(entry.capture_frequency));
        out += buf;
    }
    return out;
}

EntityTable EntityTable::from_csv(const std::filesystem::path& path) {
    EntityTable table;
    io::LineReader reader(path);
    std::string_view line;
    std::size_t line_no = 0;
    while (reader.next(line)) {
        ++line_no;
        if (line_no == 1 || text::trim(line).empty())
            continue; // header
        std::vector<std::string_view> cols;
        std::size_t pos = 0;
        while (true) {
            const auto comma = line.find(',', pos);
            if (comma == std::string_view::npos) {
                cols.push_back(line.substr(pos));
                break;
            }
            cols.push_back(line.substr(pos, comma - pos));
            pos = comma + 1;
        }
        if (cols.size() != 4)
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected 4 CSV columns");
        const auto type = entity_type_from(cols[1]);
        if (!type)
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": unknown entity type");
        const EntityKey key{std::string(cols[0]), *type};
        table.capture_counts_[key] = std::strtoull(std::string(cols[3]).c_str(), nullptr, 10);
        table.fixed_url_counts_[key] = std::strtoull(std::string(cols[2]).c_str(), nullptr, 10);
    }
    return table;
}

EntityTable postfilter(const EntityTable& table, std::size_t max_terms, std::uint64_t min_url_freq) {
    EntityTable out(table.approximate_);
    for (const auto& [key, captures] : table.capture_counts_) {
        if (label_term_count(key.label) > max_terms)
            continue;
        if (table.url_frequency_of(key) < min_url_freq)
            continue;
        out.capture_counts_[key] = captures;
        if (const auto it = table.exact_urls_.find(key); it != table.exact_urls_.end())
            out.exact_urls_[key] = it->second;
        if (const auto it = table.sketches_.find(key); it != table.sketches_.end())
            out.sketches_[key] = it->second;
        if (const auto it = table.fixed_url_counts_.find(key); it != table.fixed_url_counts_.end())
            out.fixed_url_counts_[key] = it->second;
    }
    return out;
}

std::string NerVerdicts::key(std::string_view url, std::string_view label, EntityType type) {
    std::string k(url);
    k.push_back('\t');
    k += label;
    k.push_back('\t');
    k += to_string(type);
    return k;
}

void NerVerdicts::add(std::string_view url, std::string_view label, EntityType type, bool correct) {
    verdicts_[key(url, label, type)] = correct;
}

std::optional<bool> NerVerdicts::lookup(const std::string& url, const std::string& label,
                                        EntityType type) const {
    const auto it = verdicts_.find(key(url, label, type));
    if (it == verdicts_.end())
        return std::nullopt;
    return it->second;
}

NerVerdicts NerVerdicts::load(const std::filesystem::path& path) {
    NerVerdicts v;
    io::LineReader reader(path);
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
        if (cols.size() != 4)
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": expected url<TAB>label<TAB>type<TAB>verdict");
        const auto type = entity_type_from(cols[2]);
        if (!type)
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": unknown entity type");
        const auto verdict = text::trim(cols[3]);
        if (verdict != "0" && verdict != "1")
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": verdict must be 0 or 1");
        v.add(cols[0], cols[1], *type, verdict == "1");
    }
    return v;
}

std::optional<double> NerLanguageStats::precision_before() const {
    if (mentions_before == 0)
        return std::nullopt;
    return static_cast<double>(correct_before) / mentions_before;
}

std::optional<double> NerLanguageStats::precision_after() const {
    if (mentions_after == 0)
        return std::nullopt;
    return static_cast<double>(correct_after) / mentions_after;
}

std::string NerEvalReport::to_csv() const {
    std::string out =
        "language,urls_sampled,mentions_before,correct_before,precision_before,"
        "mentions_after,correct_after,precision_after,unjudged\n";
    char buf[192];
    auto fmt = [](const std::optional<double>& p) {
        char b[16];
        if (!p)
            return std::string("n/a");
        std::snprintf(b, sizeof(b), "%.4f", *p);
        return std::string(b);
    };
    for (const auto& [language, s] : per_language) {
        std::snprintf(buf, sizeof(buf), "%s,%llu,%llu,%llu,%s,%llu,%llu,%s,%llu\n", language.c_str(),
                      static_cast<unsigned long long>(s.urls_sampled),
                      static_cast<unsigned long long>(s.mentions_before),
                      static_cast<unsigned long long>(s.correct_before), fmt(s.precision_before()).c_str(),
                      static_cast<unsigned long long>(s.mentions_after),
                      static_cast<unsigned long long>(s.correct_after), fmt(s.precision_after()).c_str(),
                      static_cast<unsigned long long>(s.unjudged));
        out += buf;
    }
    return out;
}

std::vector<std::size_t> sample_indices(std::size_t population, std::size_t sample_size, std::uint64_t seed) {
    std::vector<std::size_t> picked;
    if (sample_size == 0)
        return picked;
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < population; ++i) {
        if (picked.size() < sample_size) {
            picked.push_back(i);
            continue;
        }
        const auto j = std::uniform_int_distribution<std::size_t>(0, i)(rng);
        if (j < sample_size)
            picked[j] = i;
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

NerEvalReport evaluate_ner_precision(const std::vector<UrlExtraction>& extractions,
                                     const EntityTable& surviving, const NerVerdicts& verdicts,
                                     std::size_t sample_size, std::uint64_t seed) {
    NerEvalReport report;
    report.seed = seed;
    report.candidate_urls = extractions.size();

    const auto indices = sample_indices(extractions.size(), sample_size, seed);
    report.sampled_urls = indices.size();

    for (const auto idx : indices) {
        const UrlExtraction& extraction = extractions[idx];
        auto& stats = report.per_language[extraction.language];
        ++stats.urls_sampled;
        for (const auto& [label, type] : extraction.mentions) {
            const auto verdict = verdicts.lookup(extraction.url, label, type);
            if (!verdict) {
                ++stats.unjudged;
                continue;
            }
            ++stats.mentions_before;
            stats.correct_before += *verdict ? 1 : 0;
            if (surviving.contains({label, type})) {
                ++stats.mentions_after;
                stats.correct_after += *verdict ? 1 : 0;
            }
        }
    }
    return report;
}

} // namespace cdxsem::entities
