#include <doctest.h>

#include "cdxsem/text.hpp"

using namespace cdxsem;

TEST_CASE("percent decoding happens exactly once and keeps bad escapes") {
    CHECK(text::percent_decode("a%20b") == "a b");
    CHECK(text::percent_decode("%C3%BCber") == "\xC3\xBC"
                                               "ber");
    CHECK(text::percent_decode("100%25") == "100%");
    CHECK(text::percent_decode("broken%2") == "broken%2");
    CHECK(text::percent_decode("%GG") == "%GG");
    // double-encoded input decodes one layer only
    CHECK(text::percent_decode("%2520") == "%20");
}

TEST_CASE("utf8 lowercase covers ascii, latin-1 and latin extended-a") {
    CHECK(text::lowercase_word("Berlin") == "berlin");
    CHECK(text::lowercase_word("M\xC3\x9CNCHEN") == "m\xC3\xBCnchen"); // MÜNCHEN
    CHECK(text::lowercase_word("stra\xC3\x9F""e") == "stra\xC3\x9F""e"); // ß stays
    CHECK(text::lowercase_word("\xC5\x81\xC3\x93"
                               "D\xC5\xB9") == "\xC5\x82\xC3\xB3"
                                               "d\xC5\xBA"); // ŁÓDŹ -> łódź
}

TEST_CASE("codepoint count is not byte count") {
    CHECK(text::codepoint_count("abc") == 3);
    CHECK(text::codepoint_count("\xC3\xA4\xC3\xB6") == 2); // äö
    CHECK(text::codepoint_count("") == 0);
}

TEST_CASE("alphabetic class excludes digits, punctuation and math signs") {
    CHECK(text::is_alpha(U'a'));
    CHECK(text::is_alpha(U'Z'));
    CHECK(text::is_alpha(0xE4));  // ä
    CHECK(text::is_alpha(0x17C)); // ż
    CHECK(!text::is_alpha(U'0'));
    CHECK(!text::is_alpha(U'-'));
    CHECK(!text::is_alpha(0xD7)); // ×
    CHECK(!text::is_alpha(0xF7)); // ÷
    CHECK(!text::is_alpha(0x4E2D)); // CJK treated as separator
}

TEST_CASE("invalid utf8 decodes as replacement and advances") {
    const std::string bad = "a\xFF\xFE b";
    std::size_t i = 0;
    CHECK(text::decode_utf8(bad, i) == U'a');
    CHECK(text::decode_utf8(bad, i) == 0xFFFD);
    CHECK(text::decode_utf8(bad, i) == 0xFFFD);
    CHECK(i == 3);
}

TEST_CASE("split and trim") {
    const auto fields = text::split_whitespace("  a\tbb  c ");
    REQUIRE(fields.size() == 3);
    CHECK(fields[0] == "a");
    CHECK(fields[1] == "bb");
    CHECK(fields[2] == "c");
    CHECK(text::trim("  x ") == "x");
    CHECK(text::trim("\t\r\n") == "");
}

TEST_CASE("case-insensitive suffix check") {
    CHECK(text::ends_with_ci("/page.HTML", ".html"));
    CHECK(text::ends_with_ci("/p.HtM", ".htm"));
    CHECK(!text::ends_with_ci("/p.txt", ".html"));
    CHECK(!text::ends_with_ci("htm", ".htm"));
}
