#include <doctest.h>

#include <random>

#include "cdxsem/errors.hpp"
#include "cdxsem/io.hpp"
#include "cdxsem/text.hpp"
#include "cdxsem/tokenize.hpp"
#include "support.hpp"

using namespace cdxsem;

TEST_CASE("path tokenization: host, port, query, numbers and extension go away") {
    CHECK(tokenize::extract_path_tokens(
              "http://www.wg-gesucht.de:80/wohnungen-in-Berlin-Prenzlauer-Berg.1529789.html") ==
          std::vector<std::string>{"wohnungen", "in", "berlin", "prenzlauer", "berg"});
    CHECK(tokenize::extract_path_tokens("http://a.de/index.html") == std::vector<std::string>{"index"});
    CHECK(tokenize::extract_path_tokens("http://a.de/?id=123").empty());
    CHECK(tokenize::extract_path_tokens("").empty());
    CHECK(tokenize::extract_path_tokens("http://a.de").empty()); // no path at all
}

TEST_CASE("only the final html/htm extension is discarded") {
    CHECK(tokenize::extract_path_tokens("http://a.de/report.HTM") == std::vector<std::string>{"report"});
    // a non-html tail is not an extension by the cleaning rules; its letters count
    CHECK(tokenize::extract_path_tokens("http://a.de/data.xml") == std::vector<std::string>{"data", "xml"});
}

TEST_CASE("query and fragment never contribute tokens") {
    CHECK(tokenize::extract_path_tokens("http://a.de/wetter.html?city=berlin#rain") ==
          std::vector<std::string>{"wetter"});
}

TEST_CASE("percent escapes decode before tokenization, umlauts survive") {
    CHECK(tokenize::extract_path_tokens("http://a.de/stra%C3%9Fe-m%C3%BCnchen.html") ==
          std::vector<std::string>{"stra\xC3\x9F"
                                   "e",
                                   "m\xC3\xBCnchen"});
    // latin-1 escapes are not valid utf-8; the bad byte splits the token
    CHECK(tokenize::extract_path_tokens("http://a.de/Au%DFenseiter.html") ==
          std::vector<std::string>{"au", "enseiter"});
}

TEST_CASE("cleaning drops short tokens then stop words, keeps order") {
    tokenize::StopList empty;
    CHECK(tokenize::clean_tokens({"wohnungen", "in", "berlin"}, empty) ==
          std::vector<std::string>{"wohnungen", "berlin"});

    tokenize::StopList stop;
    stop.add("index");
    stop.add("html");
    CHECK(tokenize::clean_tokens({"index", "html", "berlin"}, stop) == std::vector<std::string>{"berlin"});
    CHECK(tokenize::clean_tokens({}, stop).empty());

    // three-character tokens are kept ("less than three" is dropped)
    CHECK(tokenize::clean_tokens({"ab", "abc"}, empty) == std::vector<std::string>{"abc"});
    // length counts code points, not bytes
    CHECK(tokenize::clean_tokens({"\xC3\xA4\xC3\xB6"}, empty).empty()); // äö = 2 chars
}

TEST_CASE("cleaning is idempotent") {
    std::mt19937_64 rng(11);
    tokenize::StopList stop;
    stop.add("index");
    stop.add("seite");
    const std::vector<std::string> pool = {"a",  "ab",   "abc",  "index", "seite",
                                           "de", "haus", "berg", "wetter"};
    for (int round = 0; round < 200; ++round) {
        std::vector<std::string> tokens;
        const auto n = rng() % 12;
        for (std::size_t i = 0; i < n; ++i)
            tokens.push_back(pool[rng() % pool.size()]);
        const auto once = tokenize::clean_tokens(tokens, stop);
        CHECK(tokenize::clean_tokens(once, stop) == once);
    }
}

TEST_CASE("tokenizer output is lowercase alphabetic for any byte input") {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<int> len(0, 80);
    std::uniform_int_distribution<int> byte(1, 255);
    for (int round = 0; round < 2000; ++round) {
        std::string url = "http://x.de/";
        const int n = len(rng);
        for (int i = 0; i < n; ++i)
            url.push_back(static_cast<char>(byte(rng)));
        const auto tokens = tokenize::extract_path_tokens(url);
        const auto again = tokenize::extract_path_tokens(url);
        CHECK(tokens == again); // pure function
        for (const auto& token : tokens) {
            REQUIRE(!token.empty());
            std::size_t i = 0;
            while (i < token.size()) {
                const char32_t cp = text::decode_utf8(token, i);
                REQUIRE(text::is_alpha(cp));
                REQUIRE(cp == text::to_lower(cp));
            }
        }
    }
}

TEST_CASE("stop list file round trip, comments and metadata headers") {
    testsupport::TempDir tmp("stoplist");
    io::write_file(tmp / "stop.txt",
                   "#!sample_size=10000\n#!corpus=fixture\n# plain comment\nindex\nHTML\n\nSeite\n");
    const auto list = tokenize::StopList::load(tmp / "stop.txt");
    CHECK(list.size() == 3);
    CHECK(list.contains("index"));
    CHECK(list.contains("html")); // lowercased on load
    CHECK(list.contains("seite"));
    CHECK(!list.contains("berlin"));
    CHECK(list.provenance().at("sample_size") == "10000");
    CHECK(list.provenance().at("corpus") == "fixture");

    list.save(tmp / "roundtrip.txt");
    const auto again = tokenize::StopList::load(tmp / "roundtrip.txt");
    CHECK(again.size() == 3);
    CHECK(again.provenance() == list.provenance());
}

TEST_CASE("stop-word candidates: frequency ranking over the sample") {
    tokenize::StopCandidateBuilder builder(1000, 99);
    // "index" in 9 of 10 urls, city names once each
    static const char* cities[] = {"berlin",    "hamburg", "muenchen", "koeln",    "frankfurt",
                                   "stuttgart", "dresden", "leipzig",  "hannover", "bremen"};
    for (int i = 0; i < 10; ++i) {
        const std::string middle = i == 0 ? "start" : "index";
        builder.add_url("http://s" + std::to_string(i) + ".de/" + middle + "-" + cities[i] + ".html");
    }
    const auto report = builder.finish(1);
    REQUIRE(report.candidates.size() == 1);
    CHECK(report.candidates[0].token == "index");
    CHECK(report.candidates[0].count == 9);
    CHECK(report.sample_degraded); // only 10 distinct urls for a 1000 sample
    CHECK(report.sampled_urls == 10);
}

TEST_CASE("stop-word candidates: duplicate urls count once") {
    tokenize::StopCandidateBuilder builder(100, 5);
    for (int i = 0; i < 50; ++i)
        builder.add_url("http://a.de/index.html");
    builder.add_url("http://b.de/themen.html");
    const auto report = builder.finish(10);
    CHECK(report.distinct_urls == 2);
    REQUIRE(report.candidates.size() == 2);
    CHECK(report.candidates[0].count == 1);
}

TEST_CASE("stop-word candidate generation is deterministic per seed") {
    static const char* vocab[] = {"wetter",  "berlin", "urlaub",  "spiele", "immobilien", "rezepte",
                                  "politik", "musik",  "garten",  "hotel",  "bahn",       "kino",
                                  "messe"};
    auto run = [](std::uint64_t seed) {
        tokenize::StopCandidateBuilder builder(50, seed);
        for (int i = 0; i < 500; ++i)
            builder.add_url("http://h" + std::to_string(i % 113) + ".de/seite-nummer" + std::to_string(i) +
                            "-" + vocab[i % 13] + ".html");
        return builder.finish(20).to_csv();
    };
    CHECK(run(77) == run(77));
    CHECK(run(77) != run(78)); // different seeds sample differently
}

TEST_CASE("candidate csv shape") {
    tokenize::StopCandidateBuilder builder(10, 1);
    builder.add_url("http://a.de/haus-haus-garten.html");
    const auto csv = builder.finish(5).to_csv();
    CHECK(csv.substr(0, 17) == "token,count,share");
    CHECK(csv.find("haus,2,0.666667") != std::string::npos);
    CHECK(csv.find("garten,1,0.333333") != std::string::npos);
}
