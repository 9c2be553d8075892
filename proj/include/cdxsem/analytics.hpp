#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "cdxsem/entities.hpp"

namespace cdxsem::analytics {

// One annotated capture as written by the annotate stage.
struct AnnotatedCapture {
    std::string url;
    std::string timestamp;
    std::string domain;
    std::string category;
    std::string language;
    int year = 0;
    std::vector<std::pair<std::string, entities::EntityType>> mentions;

    bool has_entities() const { return !mentions.empty(); }
};

struct CountShare {
    std::uint64_t count = 0;
    double share = 0.0;
};

using YearSeries = std::map<int, CountShare>;
using CategoryYearTable = std::map<std::pair<std::string, int>, CountShare>;

struct CategoryReportRow {
    std::uint64_t domains = 0;
    std::uint64_t captures = 0;
    std::uint64_t entity_captures = 0;
    double entity_capture_share = 0.0; // percent
};

using CategoryReport = std::map<std::string, CategoryReportRow>;

struct DominanceRecord {
    std::string category; // empty for whole-corpus scope
    int year = 0;
    std::string domain;
    std::uint64_t count = 0;
    double share = 0.0; // of the cell's captures
};

// All aggregates are mergeable partial counts; shares are computed from
// exact integer counts at render time.
class Aggregator {
  public:
    void add(const AnnotatedCapture& capture);
    void merge(const Aggregator& other);

    std::uint64_t total_captures() const { return total_captures_; }
    std::uint64_t total_entity_captures() const { return entity_captures_; }

    YearSeries captures_per_year() const;
    CategoryYearTable captures_per_category_year(const std::vector<std::string>& categories = {}) const;
    CategoryReport entity_capture_share() const;
    std::map<std::pair<std::string, int>, double> entity_share_per_category_year() const;
    DominanceRecord dominant_domain(const std::optional<std::string>& category, int year) const;
    std::vector<DominanceRecord> dominant_domains() const; // every non-empty cell, category scope
    std::map<int, std::map<entities::EntityType, double>> entity_type_distribution() const;

    // Per-domain capture counts inside a category (consistency checks).
    const std::map<std::pair<std::string, std::string>, std::uint64_t>& category_domain_counts() const {
        return category_domain_counts_;
    }

  private:
    std::uint64_t total_captures_ = 0;
    std::uint64_t entity_captures_ = 0;
    std::map<int, std::uint64_t> year_counts_;
    std::map<std::pair<std::string, int>, std::uint64_t> category_year_counts_;
    std::map<std::pair<std::string, int>, std::uint64_t> category_year_entity_counts_;
    std::map<std::string, std::uint64_t> category_counts_;
    std::map<std::string, std::uint64_t> category_entity_counts_;
    std::map<std::string, std::set<std::string>> category_domains_;
    std::map<std::pair<std::string, std::string>, std::uint64_t> category_domain_counts_;
    std::map<std::tuple<std::string, int, std::string>, std::uint64_t> category_year_domain_counts_;
    std::map<std::pair<int, std::string>, std::uint64_t> year_domain_counts_;
    std::map<int, std::map<entities::EntityType, std::uint64_t>> year_type_counts_;
};

std::vector<std::pair<entities::EntityKey, std::uint64_t>> top_entities(const entities::EntityTable& table,
                                                                        entities::EntityType type,
                                                                        std::size_t k);

// Deterministic renderings. Percentages carry 2 decimals, shares 6.
std::string year_series_csv(const YearSeries& series);
std::string year_series_tsv(const YearSeries& series);
std::string year_series_json(const YearSeries& series);

std::string category_year_csv(const CategoryYearTable& table);
std::string category_year_tsv(const CategoryYearTable& table);
std::string category_year_json(const CategoryYearTable& table);

std::string category_report_csv(const CategoryReport& report);
std::string category_report_json(const CategoryReport& report);

std::string entity_share_cells_csv(const std::map<std::pair<std::string, int>, double>& cells);
std::string entity_share_cells_tsv(const std::map<std::pair<std::string, int>, double>& cells);

std::string dominance_csv(const std::vector<DominanceRecord>& records);
std::string dominance_json(const std::vector<DominanceRecord>& records);

std::string top_entities_csv(const std::vector<std::pair<entities::EntityKey, std::uint64_t>>& ranked);

std::string type_distribution_csv(const std::map<int, std::map<entities::EntityType, double>>& dist);
std::string type_distribution_tsv(const std::map<int, std::map<entities::EntityType, double>>& dist);

} // namespace cdxsem::analytics
