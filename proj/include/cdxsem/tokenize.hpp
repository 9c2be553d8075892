#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace cdxsem::tokenize {

// Semantic tokens of a URL path: maximal alphabetic runs, lowercased, taken
// from the path only (host, port, query, fragment and a final ".html"/".htm"
// extension removed; percent-escapes decoded once). Numbers and punctuation
// never appear in the output.
std::vector<std::string> extract_path_tokens(std::string_view original_url);

// One term per line, '#' comments, "#!key=value" metadata headers.
class StopList {
  public:
    StopList() = default;
    static StopList load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    void add(std::string_view term); // lowercased with the tokenizer's mapping
    bool contains(const std::string& term) const { return terms_.contains(term); }
    std::size_t size() const { return terms_.size(); }
    const std::map<std::string, std::string>& provenance() const { return provenance_; }
    void set_provenance(std::string key, std::string value);

  private:
    std::unordered_set<std::string> terms_;
    std::map<std::string, std::string> provenance_;
};

// Drops tokens shorter than three characters (code points), then tokens on
// the stop list. Order preserved. Idempotent.
std::vector<std::string> clean_tokens(std::vector<std::string> tokens, const StopList& stop);

std::vector<std::string> tokenize_url(std::string_view original_url, const StopList& stop);

struct StopCandidate {
    std::string token;
    std::uint64_t count = 0;
    double share = 0.0; // of all counted token occurrences in the sample
};

struct StopCandidateReport {
    std::vector<StopCandidate> candidates;
    std::uint64_t distinct_urls = 0;
    std::uint64_t sampled_urls = 0;
    std::uint64_t total_tokens = 0;
    std::uint64_t seed = 0;
    bool sample_degraded = false; // corpus had fewer distinct URLs than requested

    std::string to_csv() const; // token,count,share
};

// Seeded reservoir sample over distinct URLs; the frequency count feeds the
// manual stop-word review. Fully deterministic for a fixed seed.
class StopCandidateBuilder {
  public:
    StopCandidateBuilder(std::size_t sample_size, std::uint64_t seed);

    void add_url(std::string_view original_url);
    StopCandidateReport finish(std::size_t top_k) const;

  private:
    std::size_t sample_size_;
    std::uint64_t seed_;
    std::mt19937_64 rng_;
    std::unordered_set<std::string> seen_;
    std::vector<std::string> reservoir_;
    std::uint64_t distinct_ = 0;
};

} // namespace cdxsem::tokenize
