#include "cdxsem/analytics.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "cdxsem/errors.hpp"

namespace cdxsem::analytics {

namespace {

std::string fmt_share(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string fmt_pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

} // namespace

void Aggregator::add(const AnnotatedCapture& c) {
    ++total_captures_;
    ++year_counts_[c.year];
    ++category_year_counts_[{c.category, c.year}];
    ++category_counts_[c.category];
    category_domains_[c.category].insert(c.domain);
    ++category_domain_counts_[{c.category, c.domain}];
    ++category_year_domain_counts_[{c.category, c.year, c.domain}];
    ++year_domain_counts_[{c.year, c.domain}];
    if (c.has_entities()) {
        ++entity_captures_;
        ++category_entity_counts_[c.category];
        ++category_year_entity_counts_[{c.category, c.year}];
    }
    for (const auto& [label, type] : c.mentions)
        ++year_type_counts_[c.year][type];
}

void Aggregator::merge(const Aggregator& o) {
    total_captures_ += o.total_captures_;
    entity_captures_ += o.entity_captures_;
    for (const auto& [k, v] : o.year_counts_)
        year_counts_[k] += v;
    for (const auto& [k, v] : o.category_year_counts_)
        category_year_counts_[k] += v;
    for (const auto& [k, v] : o.category_year_entity_counts_)
        category_year_entity_counts_[k] += v;
    for (const auto& [k, v] : o.category_counts_)
        category_counts_[k] += v;
    for (const auto& [k, v] : o.category_entity_counts_)
        category_entity_counts_[k] += v;
    for (const auto& [k, v] : o.category_domains_)
        category_domains_[k].insert(v.begin(), v.end());
    for (const auto& [k, v] : o.category_domain_counts_)
        category_domain_counts_[k] += v;
    for (const auto& [k, v] : o.category_year_domain_counts_)
        category_year_domain_counts_[k] += v;
    for (const auto& [k, v] : o.year_domain_counts_)
        year_domain_counts_[k] += v;
    for (const auto& [year, types] : o.year_type_counts_)
        for (const auto& [type, count] : types)
            year_type_counts_[year][type] += count;
}

YearSeries Aggregator::captures_per_year() const {
    YearSeries out;
    for (const auto& [year, count] : year_counts_)
        out[year] = {count, total_captures_ ? static_cast<double>(count) / total_captures_ : 0.0};
    return out;
}

CategoryYearTable Aggregator::captures_per_category_year(const std::vector<std::string>& categories) const {
    CategoryYearTable out;
    for (const auto& [key, count] : category_year_counts_) {
        if (!categories.empty() &&
            std::find(categories.begin(), categories.end(), key.first) == categories.end())
            continue;
        out[key] = {count, total_captures_ ? static_cast<double>(count) / total_captures_ : 0.0};
    }
    return out;
}

CategoryReport Aggregator::entity_capture_share() const {
    CategoryReport out;
    for (const auto& [category, captures] : category_counts_) {
        CategoryReportRow row;
        row.captures = captures;
        if (const auto it = category_domains_.find(category); it != category_domains_.end())
            row.domains = it->second.size();
        if (const auto it = category_entity_counts_.find(category); it != category_entity_counts_.end())
            row.entity_captures = it->second;
        row.entity_capture_share = captures ? 100.0 * static_cast<double>(row.entity_captures) / captures : 0.0;
        out[category] = row;
    }
    return out;
}

std::map<std::pair<std::string, int>, double> Aggregator::entity_share_per_category_year() const {
    std::map<std::pair<std::string, int>, double> out;
    for (const auto& [key, captures] : category_year_counts_) {
        std::uint64_t with_entities = 0;
        if (const auto it = category_year_entity_counts_.find(key); it != category_year_entity_counts_.end())
            with_entities = it->second;
        out[key] = captures ? 100.0 * static_cast<double>(with_entities) / captures : 0.0;
    }
    return out;
}

DominanceRecord Aggregator::dominant_domain(const std::optional<std::string>& category, int year) const {
    DominanceRecord best;
    best.year = year;
    best.category = category.value_or("");
    std::uint64_t cell_total = 0;

    auto consider = [&](const std::string& domain, std::uint64_t count) {
        cell_total += count;
        if (best.domain.empty() || count > best.count || (count == best.count && domain < best.domain)) {
            best.domain = domain;
            best.count = count;
        }
    };

    if (category) {
        const auto from = category_year_domain_counts_.lower_bound({*category, year, ""});
        for (auto it = from; it != category_year_domain_counts_.end(); ++it) {
            const auto& [key, count] = *it;
            if (std::get<0>(key) != *category || std::get<1>(key) != year)
                break;
            consider(std::get<2>(key), count);
        }
    } else {
        const auto from = year_domain_counts_.lower_bound({year, ""});
        for (auto it = from; it != year_domain_counts_.end(); ++it) {
            const auto& [key, count] = *it;
            if (key.first != year)
                break;
            consider(key.second, count);
        }
    }
    if (cell_total == 0)
        throw DataError("dominant_domain: empty cell");
    best.share = static_cast<double>(best.count) / static_cast<double>(cell_total);
    return best;
}

std::vector<DominanceRecord> Aggregator::dominant_domains() const {
    std::vector<DominanceRecord> out;
    std::set<std::pair<std::string, int>> cells;
    for (const auto& [key, count] : category_year_counts_)
        if (count > 0)
            cells.insert(key);
    for (const auto& [category, year] : cells)
        out.push_back(dominant_domain(category, year));
    return out;
}

std::map<int, std::map<entities::EntityType, double>> Aggregator::entity_type_distribution() const {
    std::map<int, std::map<entities::EntityType, double>> out;
    for (const auto& [year, types] : year_type_counts_) {
        std::uint64_t total = 0;
        for (const auto& [type, count] : types)
            total += count;
        if (total == 0)
            continue;
        for (const auto& [type, count] : types)
            out[year][type] = static_cast<double>(count) / static_cast<double>(total);
    }
    return out;
}

std::vector<std::pair<entities::EntityKey, std::uint64_t>> top_entities(const entities::EntityTable& table,
                                                                        entities::EntityType type,
                                                                        std::size_t k) {
    if (k == 0)
        throw UsageError("top-k must be at least 1");
    std::vector<std::pair<entities::EntityKey, std::uint64_t>> ranked;
    for (const auto& [key, entry] : table.entries())
        if (key.type == type)
            ranked.emplace_back(key, entry.capture_frequency);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first.label < b.first.label;
    });
    if (ranked.size() > k)
        ranked.resize(k);
    return ranked;
}

std::string year_series_csv(const YearSeries& series) {
    std::string out = "year,captures,share\n";
    for (const auto& [year, cs] : series)
        out += std::to_string(year) + "," + std::to_string(cs.count) + "," + fmt_share(cs.share) + "\n";
    return out;
}

std::string year_series_tsv(const YearSeries& series) {
    std::string out;
    for (const auto& [year, cs] : series)
        out += std::to_string(year) + "\tall\t" + fmt_share(cs.share) + "\n";
    return out;
}

std::string year_series_json(const YearSeries& series) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& [year, cs] : series)
        j.push_back({{"year", year}, {"captures", cs.count}, {"share", cs.share}});
    return j.dump(2) + "\n";
}

std::string category_year_csv(const CategoryYearTable& table) {
    std::string out = "category,year,captures,share\n";
    for (const auto& [key, cs] : table)
        out += key.first + "," + std::to_string(key.second) + "," + std::to_string(cs.count) + "," +
               fmt_share(cs.share) + "\n";
    return out;
}

std::string category_year_tsv(const CategoryYearTable& table) {
    std::string out;
    for (const auto& [key, cs] : table)
        out += std::to_string(key.second) + "\t" + key.first + "\t" + fmt_share(cs.share) + "\n";
    return out;
}

std::string category_year_json(const CategoryYearTable& table) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& [key, cs] : table)
        j.push_back(
            {{"category", key.first}, {"year", key.second}, {"captures", cs.count}, {"share", cs.share}});
    return j.dump(2) + "\n";
}

std::string category_report_csv(const CategoryReport& report) {
    std::string out = "category,domains,captures,entity_captures,entity_capture_share\n";
    for (const auto& [category, row] : report)
        out += category + "," + std::to_string(row.domains) + "," + std::to_string(row.captures) + "," +
               std::to_string(row.entity_captures) + "," + fmt_pct(row.entity_capture_share) + "\n";
    return out;
}

std::string category_report_json(const CategoryReport& report) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& [category, row] : report)
        j.push_back({{"category", category},
                     {"domains", row.domains},
                     {"captures", row.captures},
                     {"entity_captures", row.entity_captures},
                     {"entity_capture_share", row.entity_capture_share}});
    return j.dump(2) + "\n";
}

std::string entity_share_cells_csv(const std::map<std::pair<std::string, int>, double>& cells) {
    std::string out = "category,year,entity_capture_share\n";
    for (const auto& [key, pct] : cells)
        out += key.first + "," + std::to_string(key.second) + "," + fmt_pct(pct) + "\n";
    return out;
}

std::string entity_share_cells_tsv(const std::map<std::pair<std::string, int>, double>& cells) {
    std::string out;
    for (const auto& [key, pct] : cells)
        out += std::to_string(key.second) + "\t" + key.first + "\t" + fmt_pct(pct) + "\n";
    return out;
}

std::string dominance_csv(const std::vector<DominanceRecord>& records) {
    std::string out = "category,year,domain,captures,share\n";
    for (const auto& r : records)
        out += (r.category.empty() ? "all" : r.category) + "," + std::to_string(r.year) + "," + r.domain +
               "," + std::to_string(r.count) + "," + fmt_share(r.share) + "\n";
    return out;
}

std::string dominance_json(const std::vector<DominanceRecord>& records) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : records)
        j.push_back({{"category", r.category.empty() ? "all" : r.category},
                     {"year", r.year},
                     {"domain", r.domain},
                     {"captures", r.count},
                     {"share", r.share}});
    return j.dump(2) + "\n";
}

std::string top_entities_csv(const std::vector<std::pair<entities::EntityKey, std::uint64_t>>& ranked) {
    std::string out = "label,type,capture_frequency\n";
    for (const auto& [key, freq] : ranked)
        out += key.label + "," + std::string(entities::to_string(key.type)) + "," + std::to_string(freq) + "\n";
    return out;
}

std::string type_distribution_csv(const std::map<int, std::map<entities::EntityType, double>>& dist) {
    std::string out = "year,type,share\n";
    for (const auto& [year, types] : dist)
        for (const auto& [type, share] : types)
            out += std::to_string(year) + "," + std::string(entities::to_string(type)) + "," +
                   fmt_share(share) + "\n";
    return out;
}

std::string type_distribution_tsv(const std::map<int, std::map<entities::EntityType, double>>& dist) {
    std::string out;
    for (const auto& [year, types] : dist)
        for (const auto& [type, share] : types)
            out += std::to_string(year) + "\t" + std::string(entities::to_string(type)) + "\t" +
                   fmt_share(share) + "\n";
    return out;
}

} // namespace cdxsem::analytics
