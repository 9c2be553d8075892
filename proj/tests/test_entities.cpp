#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "cdxsem/entities.hpp"
#include "cdxsem/errors.hpp"
#include "cdxsem/io.hpp"
#include "support.hpp"

using namespace cdxsem;
using entities::EntityType;

namespace {

entities::EntityMention mention(const std::string& label, EntityType type, const std::string& url) {
    entities::EntityMention m;
    m.label = label;
    m.type = type;
    m.url = url;
    m.timestamp = "20060101000000";
    m.language = "de";
    return m;
}

entities::Gazetteer demo_gazetteer() {
    entities::Gazetteer g;
    g.add("berlin", EntityType::location, "de");
    g.add("prenzlauer berg", EntityType::location, "de");
    g.add("michael jackson", EntityType::person, "de");
    g.add("michael", EntityType::person, "de");
    g.add("deutschland", EntityType::location, "de");
    return g;
}

} // namespace

TEST_CASE("gazetteer matching is greedy longest-match left-to-right") {
    const auto g = demo_gazetteer();

    const std::vector<std::string> wg = {"wohnungen", "berlin", "prenzlauer", "berg"};
    const auto matches = g.match(wg, "de");
    REQUIRE(matches.size() == 2);
    CHECK(matches[0] == std::pair<std::string, EntityType>{"berlin", EntityType::location});
    CHECK(matches[1] == std::pair<std::string, EntityType>{"prenzlauer berg", EntityType::location});

    const std::vector<std::string> mj = {"michael", "jackson", "tour"};
    const auto longest = g.match(mj, "de");
    REQUIRE(longest.size() == 1); // not the single-term "michael"
    CHECK(longest[0].first == "michael jackson");

    CHECK(g.match({}, "de").empty());
    CHECK(g.match(wg, "en").empty()); // no english table
}

TEST_CASE("matches never overlap and appear as a subsequence of the tokens") {
    std::mt19937_64 rng(23);
    const std::vector<std::string> vocab = {"aaa", "bbb", "ccc", "ddd", "eee"};
    entities::Gazetteer g;
    g.add("aaa", EntityType::location, "de");
    g.add("bbb ccc", EntityType::person, "de");
    g.add("ccc ddd eee", EntityType::misc, "de");
    g.add("eee", EntityType::organization, "de");

    for (int round = 0; round < 500; ++round) {
        std::vector<std::string> tokens;
        const auto n = rng() % 12;
        for (std::size_t i = 0; i < n; ++i)
            tokens.push_back(vocab[rng() % vocab.size()]);
        const auto matches = g.match(tokens, "de");

        // replay the matches against the token stream: each must be found
        // after the previous one ends (non-overlap, order preserved)
        std::size_t cursor = 0;
        for (const auto& [label, type] : matches) {
            std::vector<std::string> terms;
            std::size_t start = 0;
            while (true) {
                const auto space = label.find(' ', start);
                if (space == std::string::npos) {
                    terms.push_back(label.substr(start));
                    break;
                }
                terms.push_back(label.substr(start, space - start));
                start = space + 1;
            }
            bool placed = false;
            for (std::size_t at = cursor; at + terms.size() <= tokens.size(); ++at) {
                if (std::equal(terms.begin(), terms.end(), tokens.begin() + at)) {
                    cursor = at + terms.size();
                    placed = true;
                    break;
                }
            }
            REQUIRE(placed);
        }
    }
}

TEST_CASE("gazetteer file loading validates and normalizes") {
    testsupport::TempDir tmp("gazetteer");
    io::write_file(tmp / "g.tsv",
                   "# demo\n"
                   "Berlin\tlocation\tde\n"
                   "Prenzlauer-Berg\tlocation\tde\n"
                   "ab\tlocation\tde\n" // term too short for the pipeline
                   "New York\tlocation\ten\n");
    entities::Gazetteer::LoadStats stats;
    const auto g = entities::Gazetteer::load(tmp / "g.tsv", &stats);
    CHECK(stats.entries == 3);
    CHECK(stats.skipped_incompatible == 1);
    CHECK(g.size() == 3);
    CHECK(g.has_language("de"));
    CHECK(g.has_language("en"));

    // hyphenated labels match the tokenized form
    const auto matches = g.match(std::vector<std::string>{"prenzlauer", "berg"}, "de");
    REQUIRE(matches.size() == 1);
    CHECK(matches[0].first == "prenzlauer berg");

    io::write_file(tmp / "bad.tsv", "berlin\tcity\tde\n");
    CHECK_THROWS_AS(entities::Gazetteer::load(tmp / "bad.tsv"), DataError);
}

TEST_CASE("accumulation counts distinct urls and captures separately") {
    entities::EntityTable table(false);
    SUBCASE("two captures of one url") {
        table.add(mention("berlin", EntityType::location, "http://a.de/berlin.html"));
        table.add(mention("berlin", EntityType::location, "http://a.de/berlin.html"));
        const auto entries = table.entries();
        REQUIRE(entries.size() == 1);
        CHECK(entries[0].second.url_frequency == 1);
        CHECK(entries[0].second.capture_frequency == 2);
    }
    SUBCASE("three distinct urls") {
        for (int i = 0; i < 3; ++i)
            table.add(mention("berlin", EntityType::location, "http://a.de/" + std::to_string(i) + ".html"));
        CHECK(table.entries()[0].second.url_frequency == 3);
    }
    SUBCASE("empty stream") {
        CHECK(table.entries().empty());
        CHECK(table.size() == 0);
    }
}

TEST_CASE("entity identity separates types with the same label") {
    entities::EntityTable table(false);
    table.add(mention("berlin", EntityType::location, "http://a.de/1.html"));
    table.add(mention("berlin", EntityType::person, "http://a.de/1.html"));
    CHECK(table.size() == 2);
}

TEST_CASE("post-filter drops long labels and rare entities") {
    entities::EntityTable table(false);
    // three terms -> dropped regardless of frequency
    for (int i = 0; i < 10; ++i)
        table.add(mention("costa concordia zahl", EntityType::misc, "http://u" + std::to_string(i) + ".de/x.html"));
    // frequent two-term entity -> kept
    for (int i = 0; i < 5; ++i)
        table.add(mention("michael jackson", EntityType::person, "http://u" + std::to_string(i) + ".de/mj.html"));
    // rare entity: 2 distinct urls < 3 -> dropped
    table.add(mention("berlin", EntityType::location, "http://a.de/1.html"));
    table.add(mention("berlin", EntityType::location, "http://b.de/1.html"));
    // boundary: exactly 3 distinct urls -> kept
    for (int i = 0; i < 3; ++i)
        table.add(mention("hamburg", EntityType::location, "http://h" + std::to_string(i) + ".de/x.html"));

    const auto filtered = entities::postfilter(table, 2, 3);
    CHECK(!filtered.contains({"costa concordia zahl", EntityType::misc}));
    CHECK(!filtered.contains({"berlin", EntityType::location}));
    CHECK(filtered.contains({"michael jackson", EntityType::person}));
    CHECK(filtered.contains({"hamburg", EntityType::location}));
    CHECK(filtered.size() == 2);
}

TEST_CASE("post-filter output never violates its own thresholds; idempotent") {
    std::mt19937_64 rng(31);
    const std::vector<std::string> labels = {"aaa", "bbb ccc", "ddd eee fff", "ggg", "hhh iii"};
    entities::EntityTable table(false);
    for (int i = 0; i < 4000; ++i) {
        const auto& label = labels[rng() % labels.size()];
        const auto type = static_cast<EntityType>(rng() % 4);
        const auto url = "http://u" + std::to_string(rng() % 200) + ".de/p" + std::to_string(rng() % 50) + ".html";
        table.add(mention(label, type, url));
    }
    const auto once = entities::postfilter(table, 2, 3);
    for (const auto& [key, entry] : once.entries()) {
        CHECK(entities::label_term_count(key.label) <= 2);
        CHECK(entry.url_frequency >= 3);
        CHECK(entry.url_frequency <= entry.capture_frequency);
        CHECK(table.contains(key)); // subset of the input
    }
    const auto twice = entities::postfilter(once, 2, 3);
    CHECK(twice.to_csv() == once.to_csv());
}

TEST_CASE("table 2 shaped fixture: frequency thresholds at scale") {
    testsupport::TempDir tmp("tables");
    io::write_file(tmp / "t.csv", "label,type,url_frequency,capture_frequency\n"
                                  "deutschland,location,900000,2301917\n"
                                  "michael jackson,person,12000,30210\n"
                                  "einmalig,location,2,2\n");
    const auto table = entities::EntityTable::from_csv(tmp / "t.csv");
    const auto filtered = entities::postfilter(table, 2, 3);
    CHECK(filtered.contains({"michael jackson", EntityType::person}));
    CHECK(filtered.contains({"deutschland", EntityType::location}));
    CHECK(!filtered.contains({"einmalig", EntityType::location}));
}

TEST_CASE("mention filtering projects the surviving table exactly") {
    std::mt19937_64 rng(37);
    const std::vector<std::string> labels = {"aaa", "bbb", "ccc ddd", "eee fff ggg"};
    std::vector<entities::EntityMention> mentions;
    for (int i = 0; i < 1000; ++i)
        mentions.push_back(mention(labels[rng() % labels.size()], static_cast<EntityType>(rng() % 4),
                                   "http://u" + std::to_string(rng() % 60) + ".de/x.html"));

    entities::EntityTable table(false);
    for (const auto& m : mentions)
        table.add(m);
    const auto surviving = entities::postfilter(table, 2, 3);

    // stream filter, then re-accumulate: must equal `surviving` exactly
    entities::EntityTable rebuilt(false);
    for (const auto& m : mentions)
        if (entities::mention_survives(m, surviving))
            rebuilt.add(m);
    CHECK(rebuilt.to_csv() == surviving.to_csv());
}

TEST_CASE("accumulation is merge-safe across partitions") {
    std::mt19937_64 rng(41);
    const std::vector<std::string> labels = {"aaa", "bbb", "ccc"};
    std::vector<entities::EntityMention> mentions;
    for (int i = 0; i < 10000; ++i)
        mentions.push_back(mention(labels[rng() % labels.size()], static_cast<EntityType>(rng() % 4),
                                   "http://u" + std::to_string(rng() % 500) + ".de/x.html"));

    entities::EntityTable whole(false);
    for (const auto& m : mentions)
        whole.add(m);

    entities::EntityTable parts(false);
    for (std::size_t start = 0; start < mentions.size(); start += 1337) {
        entities::EntityTable partition(false);
        for (std::size_t i = start; i < std::min(mentions.size(), start + 1337); ++i)
            partition.add(mentions[i]);
        parts.merge(partition);
    }
    CHECK(parts.to_csv() == whole.to_csv());
}

TEST_CASE("approximate distinct counting stays near-exact at the threshold") {
    entities::EntityTable approx(true);
    // 3 distinct urls: the sketch must report >= 3 (linear counting regime)
    for (int i = 0; i < 3; ++i)
        approx.add(mention("berlin", EntityType::location, "http://u" + std::to_string(i) + ".de/x.html"));
    const auto entries = approx.entries();
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].second.url_frequency >= 2);
    CHECK(entries[0].second.url_frequency <= 3); // clamped by capture count

    // large cardinalities stay within sketch tolerance
    entities::EntityTable big(true);
    for (int i = 0; i < 20000; ++i)
        big.add(mention("deutschland", EntityType::location,
                        "http://site" + std::to_string(i) + ".de/x.html"));
    const auto freq = big.entries()[0].second.url_frequency;
    CHECK(freq > 17000);
    CHECK(freq < 23000);
}

TEST_CASE("sketch merge equals union") {
    entities::DistinctSketch a, b;
    for (std::uint64_t i = 0; i < 1000; ++i)
        a.add_hash(i * 0x9E3779B97F4A7C15ull);
    for (std::uint64_t i = 500; i < 1500; ++i)
        b.add_hash(i * 0x9E3779B97F4A7C15ull);
    entities::DistinctSketch u = a;
    u.merge(b);
    entities::DistinctSketch direct;
    for (std::uint64_t i = 0; i < 1500; ++i)
        direct.add_hash(i * 0x9E3779B97F4A7C15ull);
    CHECK(u.estimate() == direct.estimate());
}

TEST_CASE("entity table csv round trip") {
    entities::EntityTable table(false);
    table.add(mention("berlin", EntityType::location, "http://a.de/1.html"));
    table.add(mention("michael jackson", EntityType::person, "http://b.de/2.html"));
    const auto csv = table.to_csv();
    CHECK(csv.find("label,type,url_frequency,capture_frequency") == 0);
    CHECK(csv.find("berlin,location,1,1") != std::string::npos);
    CHECK(csv.find("michael jackson,person,1,1") != std::string::npos);

    testsupport::TempDir tmp("etable");
    io::write_file(tmp / "t.csv", csv);
    const auto back = entities::EntityTable::from_csv(tmp / "t.csv");
    CHECK(back.to_csv() == csv);
}

TEST_CASE("ner evaluation: seeded sampling, before/after precision") {
    std::vector<entities::UrlExtraction> extractions;
    entities::EntityTable table(false);
    entities::NerVerdicts verdicts;

    // 40 urls with a frequent correct entity, 10 urls with a rare wrong one
    for (int i = 0; i < 40; ++i) {
        const std::string url = "http://good" + std::to_string(i) + ".de/berlin.html";
        extractions.push_back({url, "de", {{"berlin", EntityType::location}}});
        table.add(mention("berlin", EntityType::location, url));
        verdicts.add(url, "berlin", EntityType::location, true);
    }
    for (int i = 0; i < 10; ++i) {
        const std::string url = "http://bad" + std::to_string(i) + ".de/x.html";
        const std::string label = "falsch" + std::to_string(i); // each in a single url
        extractions.push_back({url, "de", {{label, EntityType::person}}});
        table.add(mention(label, EntityType::person, url));
        verdicts.add(url, label, EntityType::person, false);
    }

    const auto surviving = entities::postfilter(table, 2, 3);
    const auto report = entities::evaluate_ner_precision(extractions, surviving, verdicts, 100, 9);
    CHECK(report.sampled_urls == 50); // sample larger than the pool: everything judged
    const auto& de = report.per_language.at("de");
    CHECK(de.mentions_before == 50);
    CHECK(de.correct_before == 40);
    CHECK(*de.precision_before() == doctest::Approx(0.8));
    CHECK(de.mentions_after == 40); // rare wrong entities filtered out
    CHECK(*de.precision_after() == doctest::Approx(1.0));
    CHECK(*de.precision_after() >= *de.precision_before());

    // determinism of the sample
    const auto again = entities::evaluate_ner_precision(extractions, surviving, verdicts, 100, 9);
    CHECK(again.to_csv() == report.to_csv());

    // degenerate: nothing extracted
    const auto empty = entities::evaluate_ner_precision({}, surviving, verdicts, 100, 9);
    CHECK(empty.sampled_urls == 0);
    CHECK(empty.to_csv().find("n/a") == std::string::npos); // no rows at all
}

TEST_CASE("ner evaluation reports n/a for empty denominators") {
    std::vector<entities::UrlExtraction> extractions;
    entities::EntityTable table(false);
    entities::NerVerdicts verdicts;
    const std::string url = "http://only.de/x.html";
    extractions.push_back({url, "en", {{"unikat", EntityType::person}}});
    table.add(mention("unikat", EntityType::person, url));
    verdicts.add(url, "unikat", EntityType::person, false);

    const auto surviving = entities::postfilter(table, 2, 3); // drops the only entity
    const auto report = entities::evaluate_ner_precision(extractions, surviving, verdicts, 100, 1);
    const auto& en = report.per_language.at("en");
    CHECK(en.mentions_after == 0);
    CHECK(!en.precision_after().has_value());
    CHECK(report.to_csv().find("n/a") != std::string::npos);
}

TEST_CASE("seeded sampling is a uniform prefix-free selection") {
    const auto a = entities::sample_indices(1000, 100, 5);
    const auto b = entities::sample_indices(1000, 100, 5);
    CHECK(a == b);
    CHECK(a.size() == 100);
    CHECK(std::set<std::size_t>(a.begin(), a.end()).size() == 100);
    const auto c = entities::sample_indices(1000, 100, 6);
    CHECK(a != c);
    CHECK(entities::sample_indices(5, 100, 1).size() == 5);
}
