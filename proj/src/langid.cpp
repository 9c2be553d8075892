#include "cdxsem/langid.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>

#include <json.hpp>

#include "cdxsem/errors.hpp"
#include "cdxsem/io.hpp"
#include "cdxsem/text.hpp"

namespace cdxsem::langid {

namespace {
constexpr char32_t kPad = U'_';
}

void for_each_ngram(std::string_view token, int max_order, const std::function<void(std::string&&)>& fn) {
    if (token.empty())
        return;
    std::vector<char32_t> padded;
    padded.reserve(token.size() + 2);
    padded.push_back(kPad);
    std::size_t i = 0;
    while (i < token.size())
        padded.push_back(text::decode_utf8(token, i));
    padded.push_back(kPad);

    for (int n = 1; n <= max_order; ++n) {
        if (padded.size() < static_cast<std::size_t>(n))
            break;
        for (std::size_t start = 0; start + n <= padded.size(); ++start) {
            bool all_pad = true;
            for (int k = 0; k < n && all_pad; ++k)
                all_pad = padded[start + k] == kPad;
            if (all_pad)
                continue;
            std::string gram;
            for (int k = 0; k < n; ++k)
                text::append_utf8(gram, padded[start + k]);
            fn(std::move(gram));
        }
    }
}

namespace {

std::vector<std::string> rank_grams(const std::unordered_map<std::string, std::uint64_t>& counts,
                                    std::size_t max_rank) {
    std::vector<std::pair<std::string, std::uint64_t>> order(counts.begin(), counts.end());
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (order.size() > max_rank)
        order.resize(max_rank);
    std::vector<std::string> grams;
    grams.reserve(order.size());
    for (auto& [gram, count] : order)
        grams.push_back(std::move(gram));
    return grams;
}

} // namespace

LanguageProfile LanguageProfile::train(const std::vector<std::pair<std::string, std::uint64_t>>& weighted_tokens,
                                       std::string language, int max_order, std::size_t max_rank) {
    if (max_order < 1)
        throw UsageError("profile order must be at least 1");
    if (max_rank < 1)
        throw UsageError("profile max_rank must be at least 1");

    std::unordered_map<std::string, std::uint64_t> counts;
    for (const auto& [token, weight] : weighted_tokens) {
        if (weight == 0)
            continue;
        for_each_ngram(text::lowercase_word(token), max_order,
                       [&](std::string&& gram) { counts[std::move(gram)] += weight; });
    }
    if (counts.empty())
        throw DataError("empty corpus: no n-grams to train language profile \"" + language + "\"");

    LanguageProfile profile;
    profile.language_ = std::move(language);
    profile.max_order_ = max_order;
    profile.max_rank_ = max_rank;
    profile.ngrams_ = rank_grams(counts, max_rank);
    for (std::size_t i = 0; i < profile.ngrams_.size(); ++i)
        profile.ranks_[profile.ngrams_[i]] = static_cast<std::uint32_t>(i + 1);
    return profile;
}

LanguageProfile LanguageProfile::train(std::span<const std::string> tokens, std::string language,
                                       int max_order, std::size_t max_rank) {
    std::vector<std::pair<std::string, std::uint64_t>> weighted;
    weighted.reserve(tokens.size());
    for (const auto& t : tokens)
        weighted.emplace_back(t, 1);
    return train(weighted, std::move(language), max_order, max_rank);
}

std::uint32_t LanguageProfile::rank_of(const std::string& gram) const {
    const auto it = ranks_.find(gram);
    return it == ranks_.end() ? 0 : it->second;
}

void LanguageProfile::save(const std::filesystem::path& path) const {
    nlohmann::json j;
    j["version"] = 1;
    j["language"] = language_;
    j["orders"] = max_order_;
    j["max_rank"] = max_rank_;
    j["ngrams"] = ngrams_;
    io::write_file(path, j.dump(2) + "\n");
}

LanguageProfile LanguageProfile::load(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(io::read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad profile file " + path.string() + ": " + e.what());
    }
    LanguageProfile profile;
    try {
        profile.language_ = j.at("language").get<std::string>();
        profile.max_order_ = j.at("orders").get<int>();
        profile.max_rank_ = j.at("max_rank").get<std::size_t>();
        profile.ngrams_ = j.at("ngrams").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad profile file " + path.string() + ": " + e.what());
    }
    if (profile.ngrams_.size() > profile.max_rank_)
        throw DataError("bad profile file " + path.string() + ": more n-grams than max_rank");
    for (std::size_t i = 0; i < profile.ngrams_.size(); ++i)
        profile.ranks_[profile.ngrams_[i]] = static_cast<std::uint32_t>(i + 1);
    return profile;
}

LanguageDecision detect_language(std::span<const std::string> tokens,
                                 std::span<const LanguageProfile> profiles, double cutoff) {
    LanguageDecision decision;
    decision.tag = std::string(kOtherTag);

    int query_order = 1;
    for (const auto& p : profiles)
        query_order = std::max(query_order, p.max_order());

    std::unordered_map<std::string, std::uint64_t> counts;
    for (const auto& token : tokens)
        for_each_ngram(token, query_order, [&](std::string&& gram) { counts[std::move(gram)] += 1; });

    // Rank capped by the largest profile so rank differences stay comparable.
    std::size_t rank_cap = 1;
    for (const auto& p : profiles)
        rank_cap = std::max(rank_cap, p.max_rank());
    const std::vector<std::string> query = rank_grams(counts, rank_cap);
    decision.query_grams = query.size();
    if (query.empty() || profiles.empty())
        return decision;

    decision.scores.reserve(profiles.size());
    std::size_t best = 0;
    for (const auto& profile : profiles) {
        ProfileScore score;
        score.language = profile.language();
        const std::uint64_t miss_penalty = profile.max_rank();
        for (std::size_t qi = 0; qi < query.size(); ++qi) {
            const std::uint32_t profile_rank = profile.rank_of(query[qi]);
            if (profile_rank == 0) {
                score.distance += miss_penalty;
            } else {
                const auto query_rank = static_cast<std::uint64_t>(qi + 1);
                const std::uint64_t diff = query_rank > profile_rank ? query_rank - profile_rank
                                                                     : profile_rank - query_rank;
                score.distance += std::min<std::uint64_t>(diff, miss_penalty);
            }
        }
        score.relative = static_cast<double>(score.distance) /
                         (static_cast<double>(miss_penalty) * static_cast<double>(query.size()));
        decision.scores.push_back(std::move(score));
        const ProfileScore& added = decision.scores.back();
        const ProfileScore& leader = decision.scores[best];
        if (added.relative < leader.relative ||
            (added.relative == leader.relative && added.language < leader.language))
            best = decision.scores.size() - 1;
    }

    if (decision.scores[best].relative <= cutoff)
        decision.tag = decision.scores[best].language;
    return decision;
}

std::string LanguageEvalReport::to_csv() const {
    std::string out = "tag,predicted,correct,precision\n";
    char buf[96];
    for (const auto& [tag, stats] : per_tag) {
        if (stats.predicted == 0) {
            std::snprintf(buf, sizeof(buf), "%s,0,0,n/a\n", tag.c_str());
        } else {
            std::snprintf(buf, sizeof(buf), "%s,%llu,%llu,%.4f\n", tag.c_str(),
                          static_cast<unsigned long long>(stats.predicted),
                          static_cast<unsigned long long>(stats.correct),
                          static_cast<double>(stats.correct) / stats.predicted);
        }
        out += buf;
    }
    std::snprintf(buf, sizeof(buf), "overall,%llu,%llu,%.4f\n", static_cast<unsigned long long>(total),
                  static_cast<unsigned long long>(correct), accuracy());
    out += buf;
    return out;
}

std::vector<std::pair<std::string, std::uint64_t>> load_weighted_tokens(const std::filesystem::path& path) {
    std::vector<std::pair<std::string, std::uint64_t>> tokens;
    io::LineReader reader(path);
    std::string_view line;
    std::size_t line_no = 0;
    while (reader.next(line)) {
        ++line_no;
        const auto t = text::trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        const auto fields = text::split_whitespace(t);
        std::uint64_t count = 1;
        if (fields.size() >= 2) {
            char* end = nullptr;
            const std::string c(fields[1]);
            count = std::strtoull(c.c_str(), &end, 10);
            if (!end || *end != '\0' || count == 0)
                throw DataError(path.string() + ":" + std::to_string(line_no) + ": bad token count");
        }
        tokens.emplace_back(std::string(fields[0]), count);
    }
    return tokens;
}

LanguageEvalReport evaluate_language_precision(
    const std::vector<std::pair<std::vector<std::string>, std::string>>& labeled,
    std::span<const LanguageProfile> profiles, double cutoff) {
    LanguageEvalReport report;
    for (const auto& [tokens, gold] : labeled) {
        const auto decision = detect_language(tokens, profiles, cutoff);
        auto& predicted_stats = report.per_tag[decision.tag];
        ++predicted_stats.predicted;
        ++report.per_tag[gold].gold;
        ++report.total;
        if (decision.tag == gold) {
            ++predicted_stats.correct;
            ++report.correct;
        }
    }
    return report;
}

} // namespace cdxsem::langid
