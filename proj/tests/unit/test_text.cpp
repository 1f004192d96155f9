#include <catch_amalgamated.hpp>

#include "satrag/text.hpp"

using namespace satrag;

TEST_CASE("labels canonicalize by case fold and whitespace collapse", "[text]") {
  CHECK(text::canonical_label("  Net   Income\t") == "net income");
  CHECK(text::canonical_label("NET income") == text::canonical_label("net  INCOME"));
  CHECK(text::collapse_whitespace(" a \n b  ") == "a b");
}

TEST_CASE("numbers parse through currency, separators and accounting negatives", "[text]") {
  CHECK(text::parse_number("$1,234.5") == 1234.5);
  CHECK(text::parse_number("(5.2)") == -5.2);
  CHECK(text::parse_number("12%") == 12.0);
  CHECK(text::parse_number("\xE2\x82\xAC 7") == 7.0);
  CHECK_FALSE(text::parse_number("Q1"));
  CHECK_FALSE(text::parse_number("1.2.3"));
  CHECK_FALSE(text::parse_number(""));
}

TEST_CASE("values normalize to a canonical textual form", "[text]") {
  CHECK(text::normalize_value("$1,234") == "1234");
  CHECK(text::normalize_value("(12.5)") == "-12.5");
  CHECK(text::normalize_value("4.5%") == "4.5");
  CHECK(text::normalize_value("  not   a number ") == "not a number");
}

TEST_CASE("tokenize lower-cases alphanumeric runs", "[text]") {
  CHECK(text::tokenize("Net income, 2019!") == std::vector<std::string>{"net", "income", "2019"});
  CHECK(text::tokenize("  ").empty());
}

TEST_CASE("utf8 truncation never splits a code point", "[text]") {
  const std::string s = "ab\xC3\xA9";  // "abé"
  CHECK(text::utf8_truncate(s, 3) == "ab");
  CHECK(text::utf8_truncate(s, 4) == s);
  CHECK(text::utf8_truncate(s, 10) == s);
}

TEST_CASE("split, join and replace are inverse-friendly", "[text]") {
  const auto parts = text::split("a|b||c", '|');
  CHECK(parts == std::vector<std::string>{"a", "b", "", "c"});
  CHECK(text::join(parts, "|") == "a|b||c");
  CHECK(text::replace_all("x.y.z", ".", "--") == "x--y--z");
}

TEST_CASE("fnv1a64 matches the published offset basis and test vector", "[text]") {
  CHECK(text::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(text::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(text::hex64(0xabcULL) == "0000000000000abc");
}
