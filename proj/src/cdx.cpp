#include "cdxsem/cdx.hpp"

#include <algorithm>
#include <array>
#include <charconv>

#include "cdxsem/errors.hpp"
#include "cdxsem/io.hpp"
#include "cdxsem/text.hpp"

namespace cdxsem::cdx {

namespace {

FieldLayout::Field field_from_name(std::string_view name) {
    using F = FieldLayout::Field;
    if (name == "urlkey" || name == "url-key")
        return F::UrlKey;
    if (name == "timestamp")
        return F::Timestamp;
    if (name == "original" || name == "original-url" || name == "url")
        return F::Original;
    if (name == "mimetype" || name == "mime-type")
        return F::MimeType;
    if (name == "statuscode" || name == "status-code" || name == "status")
        return F::StatusCode;
    if (name == "digest" || name == "checksum")
        return F::Digest;
    return F::Extra;
}

FieldLayout::Field field_from_letter(char c) {
    using F = FieldLayout::Field;
    switch (c) {
    case 'N':
    case 'A':
    case 'B':
        return F::UrlKey;
    case 'b':
        return F::Timestamp;
    case 'a':
        return F::Original;
    case 'm':
        return F::MimeType;
    case 's':
        return F::StatusCode;
    case 'k':
    case 'c':
        return F::Digest;
    default:
        return F::Extra;
    }
}

const char* field_name(FieldLayout::Field f) {
    using F = FieldLayout::Field;
    switch (f) {
    case F::UrlKey:
        return "urlkey";
    case F::Timestamp:
        return "timestamp";
    case F::Original:
        return "original";
    case F::MimeType:
        return "mimetype";
    case F::StatusCode:
        return "statuscode";
    case F::Digest:
        return "digest";
    default:
        return "-";
    }
}

void require_core_fields(const std::vector<FieldLayout::Field>& fields, std::string_view what) {
    using F = FieldLayout::Field;
    for (const F need : {F::UrlKey, F::Timestamp, F::Original, F::StatusCode}) {
        if (std::find(fields.begin(), fields.end(), need) == fields.end())
            throw DataError("CDX layout " + std::string(what) + " lacks required field " + field_name(need));
    }
}

} // namespace

FieldLayout FieldLayout::parse(std::string_view descriptor) {
    FieldLayout layout;
    for (const auto name : text::split_whitespace(descriptor))
        layout.fields_.push_back(field_from_name(name));
    if (layout.fields_.empty())
        throw DataError("empty CDX layout descriptor");
    require_core_fields(layout.fields_, descriptor);
    return layout;
}

FieldLayout FieldLayout::standard11() {
    return parse("urlkey timestamp original mimetype statuscode digest redirect metatags length offset filename");
}

bool FieldLayout::is_header(std::string_view line) {
    const auto t = text::trim(line);
    return t.size() > 4 && t.substr(0, 4) == "CDX " && line.substr(0, 1) == " ";
}

std::optional<FieldLayout> FieldLayout::from_header(std::string_view line) {
    if (!is_header(line))
        return std::nullopt;
    FieldLayout layout;
    const auto tokens = text::split_whitespace(line);
    for (std::size_t i = 1; i < tokens.size(); ++i) { // tokens[0] == "CDX"
        if (tokens[i].size() != 1)
            return std::nullopt;
        layout.fields_.push_back(field_from_letter(tokens[i][0]));
    }
    if (layout.fields_.empty())
        return std::nullopt;
    require_core_fields(layout.fields_, line);
    return layout;
}

std::string FieldLayout::descriptor() const {
    std::string out;
    for (const auto f : fields_) {
        if (!out.empty())
            out.push_back(' ');
        out += field_name(f);
    }
    return out;
}

bool valid_timestamp(std::string_view ts) {
    if (ts.size() != 14)
        return false;
    for (const char c : ts)
        if (c < '0' || c > '9')
            return false;
    auto num = [&](std::size_t off, std::size_t len) {
        int v = 0;
        std::from_chars(ts.data() + off, ts.data() + off + len, v);
        return v;
    };
    const int year = num(0, 4), month = num(4, 2), day = num(6, 2);
    const int hour = num(8, 2), minute = num(10, 2), second = num(12, 2);
    if (month < 1 || month > 12 || day < 1)
        return false;
    static constexpr std::array<int, 12> days_in = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int max_day = days_in[month - 1];
    const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    if (month == 2 && leap)
        max_day = 29;
    if (day > max_day)
        return false;
    return hour < 24 && minute < 60 && second < 60;
}

std::optional<CdxRecord> parse_cdx_line(std::string_view line, const FieldLayout& layout) {
    const auto tokens = text::split_whitespace(line);
    if (tokens.size() < layout.field_count())
        return std::nullopt;

    CdxRecord r;
    using F = FieldLayout::Field;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const F f = i < layout.field_count() ? layout.fields()[i] : F::Extra;
        switch (f) {
        case F::UrlKey:
            r.url_key = tokens[i];
            break;
        case F::Timestamp:
            r.timestamp = tokens[i];
            break;
        case F::Original:
            r.original_url = tokens[i];
            break;
        case F::MimeType:
            r.mime_type = tokens[i];
            break;
        case F::StatusCode:
            r.status_code = tokens[i];
            break;
        case F::Digest:
            r.digest = tokens[i];
            break;
        case F::Extra:
            r.extra_fields.emplace_back(tokens[i]);
            break;
        }
    }
    if (!valid_timestamp(r.timestamp) || r.original_url.empty())
        return std::nullopt;
    return r;
}

namespace {

// Path component boundaries: end of authority to start of query/fragment.
std::string_view url_path_view(std::string_view url) {
    std::size_t start = 0;
    const auto scheme_end = url.find("://");
    if (scheme_end != std::string_view::npos)
        start = scheme_end + 3;
    const auto path_start = url.find('/', start);
    if (path_start == std::string_view::npos)
        return {};
    auto path = url.substr(path_start);
    const auto cut = path.find_first_of("?#");
    if (cut != std::string_view::npos)
        path = path.substr(0, cut);
    return path;
}

std::string_view authority_view(std::string_view url) {
    std::size_t start = 0;
    const auto scheme_end = url.find("://");
    if (scheme_end != std::string_view::npos)
        start = scheme_end + 3;
    auto rest = url.substr(start);
    const auto cut = rest.find_first_of("/?#");
    if (cut != std::string_view::npos)
        rest = rest.substr(0, cut);
    const auto at = rest.rfind('@');
    if (at != std::string_view::npos)
        rest = rest.substr(at + 1);
    return rest;
}

std::string_view strip_port(std::string_view authority) {
    if (!authority.empty() && authority.front() == '[') {
        const auto close = authority.find(']');
        if (close != std::string_view::npos)
            return authority.substr(0, close + 1);
        return authority;
    }
    const auto colon = authority.rfind(':');
    if (colon == std::string_view::npos)
        return authority;
    const auto port = authority.substr(colon + 1);
    if (port.empty())
        return authority.substr(0, colon);
    for (const char c : port)
        if (c < '0' || c > '9')
            return authority;
    return authority.substr(0, colon);
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z')
            c = static_cast<char>(c + 0x20);
    return out;
}

} // namespace

bool is_html_url(std::string_view url) {
    const auto path = url_path_view(url);
    return text::ends_with_ci(path, ".html") || text::ends_with_ci(path, ".htm");
}

bool is_html_capture(const CdxRecord& r) {
    return is_html_url(r.original_url);
}

bool is_success(std::string_view status_code) {
    if (status_code.empty() || status_code[0] != '2')
        return false;
    for (const char c : status_code)
        if (c < '0' || c > '9')
            return false;
    return true;
}

std::string normalize_url_identity(std::string_view original_url) {
    std::size_t start = 0;
    const auto scheme_end = original_url.find("://");
    if (scheme_end != std::string_view::npos)
        start = scheme_end + 3;
    const auto rest = original_url.substr(start);
    const auto authority = authority_view(original_url);
    const auto host = strip_port(authority);
    std::string out;
    out.reserve(rest.size());
    out += host;
    out += rest.substr(authority.size());
    return ascii_lower(out);
}

std::string url_identity(const CdxRecord& r) {
    if (!r.url_key.empty() && r.url_key != "-")
        return r.url_key;
    return normalize_url_identity(r.original_url);
}

std::string url_host(std::string_view url) {
    return ascii_lower(strip_port(authority_view(url)));
}

std::string registered_domain(std::string_view host) {
    // Multi-label public suffixes seen in practice; the corpus is mostly
    // single-label TLDs (.de), so the list stays short.
    static const std::array<std::string_view, 10> multi_suffixes = {
        "co.uk", "org.uk", "ac.uk", "gov.uk", "co.jp", "com.au", "com.br", "co.nz", "co.at", "or.at"};

    std::vector<std::string_view> labels;
    std::size_t pos = 0;
    while (pos <= host.size()) {
        const auto dot = host.find('.', pos);
        if (dot == std::string_view::npos) {
            labels.push_back(host.substr(pos));
            break;
        }
        labels.push_back(host.substr(pos, dot - pos));
        pos = dot + 1;
    }
    if (labels.size() <= 2)
        return std::string(host);

    std::size_t keep = 2;
    const std::string last_two = std::string(labels[labels.size() - 2]) + "." + std::string(labels.back());
    for (const auto suffix : multi_suffixes) {
        if (last_two == suffix) {
            keep = 3;
            break;
        }
    }
    std::string out;
    for (std::size_t i = labels.size() - keep; i < labels.size(); ++i) {
        if (!out.empty())
            out.push_back('.');
        out += labels[i];
    }
    return out;
}

CategoryMap CategoryMap::load(const std::filesystem::path& path) {
    CategoryMap map;
    io::LineReader reader(path);
    std::string_view line;
    std::size_t line_no = 0;
    while (reader.next(line)) {
        ++line_no;
        const auto t = text::trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        const auto tab = t.find('\t');
        if (tab == std::string_view::npos)
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected domain<TAB>category");
        const auto domain = text::trim(t.substr(0, tab));
        const auto category = text::trim(t.substr(tab + 1));
        if (domain.empty() || category.empty())
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": empty domain or category");
        map.add(domain, category);
    }
    return map;
}

void CategoryMap::add(std::string_view domain, std::string_view category) {
    entries_[ascii_lower(domain)] = std::string(category);
}

std::optional<std::string> CategoryMap::match_domain(std::string_view host) const {
    std::string_view remaining = host;
    while (!remaining.empty()) {
        if (auto it = entries_.find(remaining); it != entries_.end())
            return std::string(remaining);
        const auto dot = remaining.find('.');
        if (dot == std::string_view::npos)
            break;
        remaining = remaining.substr(dot + 1);
    }
    return std::nullopt;
}

std::optional<std::string> CategoryMap::category_of(std::string_view domain) const {
    if (auto it = entries_.find(domain); it != entries_.end())
        return it->second;
    return std::nullopt;
}

Capture enrich_capture(CdxRecord record, const CategoryMap& categories) {
    Capture c;
    const std::string host = url_host(record.original_url);
    if (auto mapped = categories.match_domain(host)) {
        c.domain = *mapped;
        c.category = *categories.category_of(*mapped);
    } else {
        c.domain = registered_domain(host);
        c.category = "uncategorized";
    }
    int year = 0;
    std::from_chars(record.timestamp.data(), record.timestamp.data() + 4, year);
    c.year = year;
    c.record = std::move(record);
    return c;
}

void collect_successful_urls(std::string_view line, const FieldLayout& layout,
                             UrlIdentitySet& successful, IngestCounters& counters) {
    ++counters.lines_read;
    auto record = parse_cdx_line(line, layout);
    if (!record) {
        ++counters.malformed_lines;
        return;
    }
    if (is_success(record->status_code))
        successful.insert(url_identity(*record));
}

std::optional<Capture> admit_capture(std::string_view line, const FieldLayout& layout,
                                     const UrlIdentitySet& successful, const CategoryMap& categories,
                                     IngestCounters& counters) {
    auto record = parse_cdx_line(line, layout);
    if (!record)
        return std::nullopt;
    if (!is_html_capture(*record)) {
        ++counters.non_html;
        return std::nullopt;
    }
    if (!successful.contains(url_identity(*record))) {
        ++counters.never_successful;
        return std::nullopt;
    }
    ++counters.admitted;
    return enrich_capture(std::move(*record), categories);
}

} // namespace cdxsem::cdx
