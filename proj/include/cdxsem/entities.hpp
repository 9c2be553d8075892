#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace cdxsem::entities {

enum class EntityType { location, person, organization, misc };

std::string_view to_string(EntityType type);
std::optional<EntityType> entity_type_from(std::string_view name);

struct EntityMention {
    std::string label; // lowercase terms joined by single spaces
    EntityType type = EntityType::misc;
    std::string url;
    std::string timestamp;
    std::string language;
};

std::size_t label_term_count(std::string_view label);

// Dictionary of surface forms per language. Keys are lowercase token
// sequences compatible with the URL pipeline (every term >= 3 characters).
class Gazetteer {
  public:
    struct LoadStats {
        std::uint64_t entries = 0;
        std::uint64_t skipped_incompatible = 0; // terms the pipeline can never produce
    };

    Gazetteer() = default;
    // TSV label<TAB>type<TAB>language, '#' comments.
    static Gazetteer load(const std::filesystem::path& path, LoadStats* stats = nullptr);

    // Returns false when the label cannot match pipeline output.
    bool add(std::string_view label, EntityType type, std::string_view language);

    bool has_language(const std::string& language) const;
    std::size_t size() const;

    // Greedy longest-match left-to-right, non-overlapping; matches are
    // (label, type) in token order.
    std::vector<std::pair<std::string, EntityType>> match(std::span<const std::string> tokens,
                                                          const std::string& language) const;

  private:
    struct LangTable {
        std::unordered_map<std::string, EntityType> phrases;
        std::size_t max_terms = 0;
    };
    std::map<std::string, LangTable> languages_;
};

struct CaptureRef {
    std::string url;
    std::string timestamp;
};

std::vector<EntityMention> extract_entities(std::span<const std::string> tokens, const std::string& language,
                                            const CaptureRef& capture, const Gazetteer& gazetteer);

struct EntityKey {
    std::string label;
    EntityType type = EntityType::misc;
    bool operator==(const EntityKey&) const = default;
    bool operator<(const EntityKey& o) const {
        return label != o.label ? label < o.label : type < o.type;
    }
};

struct EntityKeyHash {
    std::size_t operator()(const EntityKey& k) const;
};

// Small HyperLogLog used by the memory-bounded distinct-URL counter.
// 256 registers; cardinalities at the post-filter threshold fall in the
// linear-counting regime and stay near-exact.
class DistinctSketch {
  public:
    void add_hash(std::uint64_t hash);
    void merge(const DistinctSketch& o);
    std::uint64_t estimate() const;

  private:
    std::array<std::uint8_t, 256> registers_{};
};

// Corpus-wide frequency table keyed by (label, type). url_frequency counts
// distinct URLs, capture_frequency counts captures. Exact distinct counting
// by default; approximate mode keeps a fixed-size sketch per entry instead
// of the URL set.
class EntityTable {
  public:
    struct Entry {
        std::uint64_t capture_frequency = 0;
        std::uint64_t url_frequency = 0; // resolved; approximate when sketched
    };

    explicit EntityTable(bool approximate_distinct = false);

    void add(const EntityMention& mention);
    void merge(const EntityTable& other);

    bool contains(const EntityKey& key) const;
    std::size_t size() const { return capture_counts_.size(); }
    bool approximate() const { return approximate_; }

    // Snapshot sorted by (label, type); url_frequency <= capture_frequency.
    std::vector<std::pair<EntityKey, Entry>> entries() const;

    std::string to_csv() const; // label,type,url_frequency,capture_frequency
    static EntityTable from_csv(const std::filesystem::path& path);

    friend EntityTable postfilter(const EntityTable& table, std::size_t max_terms, std::uint64_t min_url_freq);

  private:
    std::uint64_t url_frequency_of(const EntityKey& key) const;

    bool approximate_ = false;
    std::unordered_map<EntityKey, std::uint64_t, EntityKeyHash> capture_counts_;
    std::unordered_map<EntityKey, std::unordered_set<std::string>, EntityKeyHash> exact_urls_;
    std::unordered_map<EntityKey, DistinctSketch, EntityKeyHash> sketches_;
    std::unordered_map<EntityKey, std::uint64_t, EntityKeyHash> fixed_url_counts_; // from_csv tables
};

// Drops entries whose label has more than max_terms terms or whose distinct
// URL frequency is below min_url_freq. Idempotent; output is a subset.
EntityTable postfilter(const EntityTable& table, std::size_t max_terms = 2, std::uint64_t min_url_freq = 3);

inline bool mention_survives(const EntityMention& m, const EntityTable& surviving) {
    return surviving.contains({m.label, m.type});
}

// Human verdicts for sampled extractions, keyed by (url, label, type).
class NerVerdicts {
  public:
    static NerVerdicts load(const std::filesystem::path& path); // url<TAB>label<TAB>type<TAB>0|1
    void add(std::string_view url, std::string_view label, EntityType type, bool correct);
    std::optional<bool> lookup(const std::string& url, const std::string& label, EntityType type) const;
    std::size_t size() const { return verdicts_.size(); }

  private:
    std::unordered_map<std::string, bool> verdicts_;
    static std::string key(std::string_view url, std::string_view label, EntityType type);
};

struct NerLanguageStats {
    std::uint64_t urls_sampled = 0;
    std::uint64_t mentions_before = 0;
    std::uint64_t correct_before = 0;
    std::uint64_t mentions_after = 0;
    std::uint64_t correct_after = 0;
    std::uint64_t unjudged = 0;

    // "n/a" denominators are reported as nullopt.
    std::optional<double> precision_before() const;
    std::optional<double> precision_after() const;
};

struct NerEvalReport {
    std::map<std::string, NerLanguageStats> per_language;
    std::uint64_t sampled_urls = 0;
    std::uint64_t candidate_urls = 0; // entity-bearing URLs in the corpus
    std::uint64_t seed = 0;

    std::string to_csv() const;
};

// One entity-bearing URL with everything extracted from it (pre-filter).
struct UrlExtraction {
    std::string url;
    std::string language;
    std::vector<std::pair<std::string, EntityType>> mentions; // distinct per URL
};

// Seeded sample of entity-bearing URLs, judged against human verdicts,
// before and after the post-filter.
NerEvalReport evaluate_ner_precision(const std::vector<UrlExtraction>& extractions,
                                     const EntityTable& surviving, const NerVerdicts& verdicts,
                                     std::size_t sample_size, std::uint64_t seed);

// Reservoir selection of the sampled URLs (exposed for sheet generation).
std::vector<std::size_t> sample_indices(std::size_t population, std::size_t sample_size, std::uint64_t seed);

} // namespace cdxsem::entities
