#include <doctest.h>

#include <algorithm>
#include <random>

#include "cdxsem/errors.hpp"
#include "cdxsem/io.hpp"
#include "cdxsem/langid.hpp"
#include "cdxsem/text.hpp"
#include "cdxsem/tokenize.hpp"
#include "support.hpp"

using namespace cdxsem;

namespace {

std::vector<langid::LanguageProfile> shipped_profiles() {
    std::vector<langid::LanguageProfile> profiles;
    profiles.push_back(langid::LanguageProfile::load(testsupport::data("profiles/de.json")));
    profiles.push_back(langid::LanguageProfile::load(testsupport::data("profiles/en.json")));
    return profiles;
}

// url<TAB>tag fixture rows
std::vector<std::pair<std::string, std::string>> load_labeled_fixture() {
    std::vector<std::pair<std::string, std::string>> rows;
    io::LineReader reader(testsupport::fixture("lang_eval_200.tsv"));
    std::string_view line;
    while (reader.next(line)) {
        const auto t = text::trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        const auto tab = t.find('\t');
        REQUIRE(tab != std::string_view::npos);
        rows.emplace_back(std::string(t.substr(0, tab)), std::string(text::trim(t.substr(tab + 1))));
    }
    return rows;
}

} // namespace

TEST_CASE("training on a single-symbol corpus") {
    const std::vector<std::string> corpus = {"aaa"};
    const auto p = langid::LanguageProfile::train(corpus, "xx", 1, 1);
    CHECK(p.size() == 1);
    CHECK(p.ngrams() == std::vector<std::string>{"a"});
    CHECK(p.rank_of("a") == 1);
    CHECK(p.rank_of("b") == 0);
}

TEST_CASE("training ranks by frequency with lexicographic ties, padding included") {
    // two "ab" tokens, orders 1..2: grams _a a ab b b_ all occur twice;
    // the tie breaks lexicographically and max_rank cuts at 3
    const std::vector<std::string> corpus = {"ab", "ab"};
    const auto p = langid::LanguageProfile::train(corpus, "xx", 2, 3);
    CHECK(p.ngrams() == std::vector<std::string>{"_a", "a", "ab"});

    const auto full = langid::LanguageProfile::train(corpus, "xx", 2, 100);
    CHECK(full.ngrams() == std::vector<std::string>{"_a", "a", "ab", "b", "b_"});
}

TEST_CASE("training twice over the same corpus yields identical profiles") {
    const std::vector<std::string> corpus = {"wohnung", "nachrichten", "immobilien", "wetter"};
    const auto a = langid::LanguageProfile::train(corpus, "de", 3, 200);
    const auto b = langid::LanguageProfile::train(corpus, "de", 3, 200);
    CHECK(a.ngrams() == b.ngrams());
}

TEST_CASE("weighted tokens dominate the ranking") {
    const std::vector<std::pair<std::string, std::uint64_t>> weighted = {{"aa", 100}, {"bb", 1}};
    const auto p = langid::LanguageProfile::train(weighted, "xx", 1, 2);
    CHECK(p.ngrams() == std::vector<std::string>{"a", "b"});
}

TEST_CASE("empty corpus refuses to train") {
    CHECK_THROWS_AS(langid::LanguageProfile::train(std::vector<std::string>{}, "xx", 3, 100), DataError);
    CHECK_THROWS_AS(langid::LanguageProfile::train(std::vector<std::string>{""}, "xx", 3, 100), DataError);
}

TEST_CASE("profile json round trip") {
    testsupport::TempDir tmp("profile");
    const std::vector<std::string> corpus = {"hallo", "welt"};
    const auto p = langid::LanguageProfile::train(corpus, "de", 3, 50);
    p.save(tmp / "de.json");
    const auto q = langid::LanguageProfile::load(tmp / "de.json");
    CHECK(q.language() == "de");
    CHECK(q.max_order() == 3);
    CHECK(q.max_rank() == 50);
    CHECK(q.ngrams() == p.ngrams());
}

TEST_CASE("out-of-place distance: identical grams score zero, misses pay max_rank") {
    const std::vector<std::string> corpus = {"ab", "ab"};
    std::vector<langid::LanguageProfile> profiles;
    profiles.push_back(langid::LanguageProfile::train(corpus, "aa", 2, 3));

    const std::vector<std::string> same = {"ab"};
    auto d = langid::detect_language(same, profiles, 0.8);
    REQUIRE(d.scores.size() == 1);
    CHECK(d.scores[0].distance == 0);
    CHECK(d.tag == "aa");

    // "ba" shares only the 1-gram "a": two misses at 3 each
    const std::vector<std::string> swapped = {"ba"};
    d = langid::detect_language(swapped, profiles, 0.8);
    CHECK(d.scores[0].distance == 6);
    CHECK(d.scores[0].relative == doctest::Approx(6.0 / 9.0));
    CHECK(d.tag == "aa"); // 0.667 within the 0.8 cutoff

    d = langid::detect_language(swapped, profiles, 0.5);
    CHECK(d.tag == "other"); // cutoff pushes it out
}

TEST_CASE("no tokens means no evidence: other") {
    const auto profiles = shipped_profiles();
    CHECK(langid::detect_language(std::vector<std::string>{}, profiles, 0.8).tag == "other");
}

TEST_CASE("shipped profiles separate german and english urls") {
    const auto profiles = shipped_profiles();
    const std::vector<std::string> german = {"wohnungen", "nachrichten"};
    const std::vector<std::string> english = {"shopping", "checkout", "cart"};

    const auto de = langid::detect_language(german, profiles, 0.8);
    CHECK(de.tag == "de");
    REQUIRE(de.scores.size() == 2);
    CHECK(de.scores[0].relative < de.scores[1].relative); // de strictly smaller

    const auto en = langid::detect_language(english, profiles, 0.8);
    CHECK(en.tag == "en");
}

TEST_CASE("decision is invariant under token reordering") {
    const auto profiles = shipped_profiles();
    std::mt19937_64 rng(3);
    const std::vector<std::string> pool = {"wetter",  "berlin", "shopping", "news",   "immobilien",
                                           "angebot", "cheap",  "flights",  "urlaub", "spiele"};
    for (int round = 0; round < 100; ++round) {
        std::vector<std::string> tokens;
        const auto n = 1 + rng() % 6;
        for (std::size_t i = 0; i < n; ++i)
            tokens.push_back(pool[rng() % pool.size()]);
        const auto before = langid::detect_language(tokens, profiles, 0.8).tag;
        std::shuffle(tokens.begin(), tokens.end(), rng);
        CHECK(langid::detect_language(tokens, profiles, 0.8).tag == before);
    }
}

TEST_CASE("distance is bounded by max_rank times the query gram count") {
    const auto profiles = shipped_profiles();
    std::mt19937_64 rng(17);
    for (int round = 0; round < 200; ++round) {
        std::vector<std::string> tokens;
        const auto n = rng() % 5;
        for (std::size_t i = 0; i < n; ++i) {
            std::string t;
            const auto len = 1 + rng() % 10;
            for (std::size_t k = 0; k < len; ++k)
                t.push_back(static_cast<char>('a' + rng() % 26));
            tokens.push_back(std::move(t));
        }
        const auto d = langid::detect_language(tokens, profiles, 0.8);
        for (const auto& score : d.scores) {
            CHECK(score.distance <= profiles[0].max_rank() * d.query_grams);
            if (d.query_grams > 0)
                CHECK(score.relative <= 1.0);
        }
    }
}

TEST_CASE("an unrelated third profile never flips fixture decisions") {
    auto profiles = shipped_profiles();
    const auto fixture = load_labeled_fixture();
    tokenize::StopList stop;

    std::vector<std::string> before;
    for (const auto& [url, gold] : fixture)
        before.push_back(langid::detect_language(tokenize::tokenize_url(url, stop), profiles, 0.8).tag);

    const std::vector<std::string> junk = {"qqxz", "zzqx", "xqzv", "vqqz", "zzvx"};
    profiles.push_back(langid::LanguageProfile::train(junk, "xx", 3, 1000));

    for (std::size_t i = 0; i < fixture.size(); ++i) {
        const auto after =
            langid::detect_language(tokenize::tokenize_url(fixture[i].first, stop), profiles, 0.8).tag;
        CHECK(after == before[i]);
    }
}

TEST_CASE("evaluation: all-other predictions on an all-other gold set") {
    const auto profiles = shipped_profiles();
    std::vector<std::pair<std::vector<std::string>, std::string>> labeled;
    for (int i = 0; i < 5; ++i)
        labeled.push_back({{}, "other"}); // no tokens -> predicted other
    const auto report = langid::evaluate_language_precision(labeled, profiles, 0.8);
    CHECK(report.accuracy() == doctest::Approx(1.0));
    CHECK(report.per_tag.at("other").predicted == 5);
    CHECK(report.per_tag.at("other").correct == 5);
    const auto csv = report.to_csv();
    CHECK(csv.find("tag,predicted,correct,precision") == 0);
    CHECK(csv.find("other,5,5,1.0000") != std::string::npos);
    CHECK(csv.find("overall,5,5,1.0000") != std::string::npos);
}

TEST_CASE("wordlist files: token with optional count") {
    testsupport::TempDir tmp("wordlist");
    io::write_file(tmp / "w.txt", "# comment\nhallo 10\nwelt\n");
    const auto tokens = langid::load_weighted_tokens(tmp / "w.txt");
    REQUIRE(tokens.size() == 2);
    CHECK(tokens[0] == std::pair<std::string, std::uint64_t>{"hallo", 10});
    CHECK(tokens[1] == std::pair<std::string, std::uint64_t>{"welt", 1});
    io::write_file(tmp / "bad.txt", "hallo zehn\n");
    CHECK_THROWS_AS(langid::load_weighted_tokens(tmp / "bad.txt"), DataError);
}
