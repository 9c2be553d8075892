#include "cdxsem/tokenize.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "cdxsem/errors.hpp"
#include "cdxsem/io.hpp"
#include "cdxsem/text.hpp"

namespace cdxsem::tokenize {

namespace {

std::string_view path_of(std::string_view url) {
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

} // namespace

std::vector<std::string> extract_path_tokens(std::string_view original_url) {
    std::vector<std::string> tokens;
    if (original_url.empty())
        return tokens;

    std::string path = text::percent_decode(path_of(original_url));
    if (text::ends_with_ci(path, ".html"))
        path.resize(path.size() - 5);
    else if (text::ends_with_ci(path, ".htm"))
        path.resize(path.size() - 4);

    std::string current;
    std::size_t i = 0;
    while (i < path.size()) {
        const char32_t cp = text::decode_utf8(path, i);
        if (text::is_alpha(cp)) {
            text::append_utf8(current, text::to_lower(cp));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty())
        tokens.push_back(std::move(current));
    return tokens;
}

StopList StopList::load(const std::filesystem::path& path) {
    StopList list;
    io::LineReader reader(path);
    std::string_view line;
    while (reader.next(line)) {
        const auto t = text::trim(line);
        if (t.empty())
            continue;
        if (t.size() >= 2 && t.substr(0, 2) == "#!") {
            const auto body = text::trim(t.substr(2));
            const auto eq = body.find('=');
            if (eq != std::string_view::npos)
                list.provenance_[std::string(text::trim(body.substr(0, eq)))] =
                    std::string(text::trim(body.substr(eq + 1)));
            continue;
        }
        if (t[0] == '#')
            continue;
        list.add(t);
    }
    return list;
}

void StopList::save(const std::filesystem::path& path) const {
    std::string out;
    for (const auto& [key, value] : provenance_)
        out += "#!" + key + "=" + value + "\n";
    std::vector<std::string> sorted(terms_.begin(), terms_.end());
    std::sort(sorted.begin(), sorted.end());
    for (const auto& term : sorted)
        out += term + "\n";
    io::write_file(path, out);
}

void StopList::add(std::string_view term) {
    terms_.insert(text::lowercase_word(term));
}

void StopList::set_provenance(std::string key, std::string value) {
    provenance_[std::move(key)] = std::move(value);
}

std::vector<std::string> clean_tokens(std::vector<std::string> tokens, const StopList& stop) {
    std::erase_if(tokens, [&](const std::string& t) {
        return text::codepoint_count(t) < 3 || stop.contains(t);
    });
    return tokens;
}

std::vector<std::string> tokenize_url(std::string_view original_url, const StopList& stop) {
    return clean_tokens(extract_path_tokens(original_url), stop);
}

std::string StopCandidateReport::to_csv() const {
    std::string out = "token,count,share\n";
    char buf[64];
    for (const auto& c : candidates) {
        std::snprintf(buf, sizeof(buf), ",%llu,%.6f\n", static_cast<unsigned long long>(c.count), c.share);
        out += c.token;
        out += buf;
    }
    return out;
}

StopCandidateBuilder::StopCandidateBuilder(std::size_t sample_size, std::uint64_t seed)
    : sample_size_(sample_size), seed_(seed), rng_(seed) {
    if (sample_size_ == 0)
        throw UsageError("stop-word sample size must be at least 1");
}

void StopCandidateBuilder::add_url(std::string_view original_url) {
    std::string url(original_url);
    if (!seen_.insert(url).second)
        return;
    ++distinct_;
    if (reservoir_.size() < sample_size_) {
        reservoir_.push_back(std::move(url));
        return;
    }
    const std::uint64_t j = std::uniform_int_distribution<std::uint64_t>(0, distinct_ - 1)(rng_);
    if (j < sample_size_)
        reservoir_[static_cast<std::size_t>(j)] = std::move(url);
}

StopCandidateReport StopCandidateBuilder::finish(std::size_t top_k) const {
    if (top_k == 0)
        throw UsageError("stop-word top-k must be at least 1");

    StopCandidateReport report;
    report.seed = seed_;
    report.distinct_urls = distinct_;
    report.sampled_urls = reservoir_.size();
    report.sample_degraded = distinct_ < sample_size_;

    std::map<std::string, std::uint64_t> counts;
    for (const auto& url : reservoir_) {
        for (auto& token : extract_path_tokens(url)) {
            if (text::codepoint_count(token) < 3)
                continue;
            ++counts[std::move(token)];
            ++report.total_tokens;
        }
    }

    std::vector<StopCandidate> all;
    all.reserve(counts.size());
    for (const auto& [token, count] : counts)
        all.push_back({token, count, report.total_tokens ? static_cast<double>(count) / report.total_tokens : 0.0});
    std::sort(all.begin(), all.end(), [](const StopCandidate& a, const StopCandidate& b) {
        return a.count != b.count ? a.count > b.count : a.token < b.token;
    });
    if (all.size() > top_k)
        all.resize(top_k);
    report.candidates = std::move(all);
    return report;
}

} // namespace cdxsem::tokenize
