#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace cdxsem::cdx {

// One CDX index line: one snapshot of one URL at a given time.
struct CdxRecord {
    std::string url_key;
    std::string timestamp; // 14 digits, YYYYMMDDhhmmss, validated on parse
    std::string original_url;
    std::string mime_type;
    std::string status_code;
    std::string digest;
    std::vector<std::string> extra_fields;
};

// Maps whitespace-separated CDX columns onto record fields. Named columns:
// urlkey timestamp original mimetype statuscode digest; anything else goes
// to extra_fields in order. Also understands classic " CDX N b a m s k ..."
// header letters.
class FieldLayout {
  public:
    enum class Field { UrlKey, Timestamp, Original, MimeType, StatusCode, Digest, Extra };

    // Space-separated column names, e.g. the default 11-field layout
    // "urlkey timestamp original mimetype statuscode digest redirect
    //  metatags length offset filename".
    static FieldLayout parse(std::string_view descriptor);
    static FieldLayout standard11();
    // Builds a layout from a " CDX N b a m s k r M S V g" header line.
    static std::optional<FieldLayout> from_header(std::string_view line);
    static bool is_header(std::string_view line);

    std::size_t field_count() const { return fields_.size(); }
    const std::vector<Field>& fields() const { return fields_; }
    std::string descriptor() const;

  private:
    std::vector<Field> fields_;
};

// Returns the parsed record, or nullopt for a malformed line (too few
// fields, bad timestamp, empty URL). The caller counts and skips those.
std::optional<CdxRecord> parse_cdx_line(std::string_view line, const FieldLayout& layout);

bool valid_timestamp(std::string_view ts);

// True iff the URL path (before any query or fragment) ends in ".html" or
// ".htm", case-insensitive.
bool is_html_capture(const CdxRecord& r);
bool is_html_url(std::string_view url);

// True iff the status is all digits and starts with '2'. Placeholders such
// as "-" (revisit records) are not successes.
bool is_success(std::string_view status_code);

// Identity used to group captures of one URL: the archive's url_key when
// present, otherwise the original URL lowercased with scheme and port
// stripped.
std::string url_identity(const CdxRecord& r);
std::string normalize_url_identity(std::string_view original_url);

// Host of a URL, lowercased, port stripped. Empty when the URL has none.
std::string url_host(std::string_view url);

// Registered domain per a small built-in multi-label suffix list; falls
// back to the host itself when it has fewer than two labels.
std::string registered_domain(std::string_view host);

// domain<TAB>category, one per line, '#' comments. Domains lowercase.
class CategoryMap {
  public:
    CategoryMap() = default;
    static CategoryMap load(const std::filesystem::path& path);
    void add(std::string_view domain, std::string_view category);

    // Longest label-boundary suffix of host present in the map, if any.
    std::optional<std::string> match_domain(std::string_view host) const;
    std::optional<std::string> category_of(std::string_view domain) const;
    std::size_t size() const { return entries_.size(); }

  private:
    std::map<std::string, std::string, std::less<>> entries_;
};

// A record that passed the cleaning filters, enriched for analytics.
struct Capture {
    CdxRecord record;
    std::string domain;   // lowercase; category-map suffix match or registered domain
    std::string category; // "uncategorized" when unmapped
    int year = 0;         // first four digits of the timestamp
};

Capture enrich_capture(CdxRecord record, const CategoryMap& categories);

struct IngestCounters {
    std::uint64_t lines_read = 0;
    std::uint64_t malformed_lines = 0;
    std::uint64_t non_html = 0;
    std::uint64_t never_successful = 0;
    std::uint64_t admitted = 0;

    void merge(const IngestCounters& o) {
        lines_read += o.lines_read;
        malformed_lines += o.malformed_lines;
        non_html += o.non_html;
        never_successful += o.never_successful;
        admitted += o.admitted;
    }
};

using UrlIdentitySet = std::unordered_set<std::string>;

// Pass 1 of the cleaning rules: identities of URLs with at least one 2xx
// capture. Counts lines and malformed lines along the way.
void collect_successful_urls(std::string_view line, const FieldLayout& layout,
                             UrlIdentitySet& successful, IngestCounters& counters);

// Pass 2: admit html captures of ever-successful URLs, enriched. Returns
// nullopt for dropped lines and updates the drop counters.
std::optional<Capture> admit_capture(std::string_view line, const FieldLayout& layout,
                                     const UrlIdentitySet& successful, const CategoryMap& categories,
                                     IngestCounters& counters);

} // namespace cdxsem::cdx
