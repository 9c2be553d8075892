#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cdxsem::langid {

inline constexpr std::string_view kOtherTag = "other";

// Rank-order profile of the most frequent character n-grams of a language.
// Tokens are padded with '_' on both sides; grams are code-point windows of
// orders 1..max_order; grams consisting only of the pad marker are skipped.
// Ranks are 1..size(), most frequent first, ties broken lexicographically.
class LanguageProfile {
  public:
    LanguageProfile() = default;

    static LanguageProfile train(const std::vector<std::pair<std::string, std::uint64_t>>& weighted_tokens,
                                 std::string language, int max_order, std::size_t max_rank);
    static LanguageProfile train(std::span<const std::string> tokens, std::string language, int max_order,
                                 std::size_t max_rank);

    static LanguageProfile load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    const std::string& language() const { return language_; }
    int max_order() const { return max_order_; }
    std::size_t max_rank() const { return max_rank_; }
    std::size_t size() const { return ngrams_.size(); }
    const std::vector<std::string>& ngrams() const { return ngrams_; }

    // 1-based rank, or 0 when the gram is not in the profile.
    std::uint32_t rank_of(const std::string& gram) const;

  private:
    std::string language_;
    int max_order_ = 3;
    std::size_t max_rank_ = 1000;
    std::vector<std::string> ngrams_;
    std::unordered_map<std::string, std::uint32_t> ranks_;
};

// Calls fn for every n-gram of the padded token, orders 1..max_order.
void for_each_ngram(std::string_view token, int max_order, const std::function<void(std::string&&)>& fn);

struct ProfileScore {
    std::string language;
    std::uint64_t distance = 0; // out-of-place distance, missing grams cost max_rank
    double relative = 1.0;      // distance / (max_rank * query gram count)
};

struct LanguageDecision {
    std::string tag;               // winning language, or "other"
    std::size_t query_grams = 0;
    std::vector<ProfileScore> scores; // one per profile, input order
};

// Rank-order (out-of-place) classification. Returns "other" when there are
// no tokens/grams or the best relative distance exceeds the cutoff.
LanguageDecision detect_language(std::span<const std::string> tokens,
                                 std::span<const LanguageProfile> profiles, double cutoff);

struct TagStats {
    std::uint64_t predicted = 0;
    std::uint64_t correct = 0;
    std::uint64_t gold = 0;
};

struct LanguageEvalReport {
    std::map<std::string, TagStats> per_tag;
    std::uint64_t total = 0;
    std::uint64_t correct = 0;

    double accuracy() const { return total ? static_cast<double>(correct) / total : 0.0; }
    std::string to_csv() const; // tag,predicted,correct,precision + overall row
};

// Labeled pairs of (tokenized URL, gold tag) against the given profiles.
LanguageEvalReport evaluate_language_precision(
    const std::vector<std::pair<std::vector<std::string>, std::string>>& labeled,
    std::span<const LanguageProfile> profiles, double cutoff);

// Training corpus file: one token per line, optional whitespace-separated
// count (default 1), '#' comments.
std::vector<std::pair<std::string, std::uint64_t>> load_weighted_tokens(const std::filesystem::path& path);

} // namespace cdxsem::langid
