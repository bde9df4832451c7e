#include <doctest.h>

#include "text.hpp"

using namespace scorelens::corpus;

TEST_CASE("single sentence with terminal punctuation") {
  const auto seg = segment("Hello world.");
  REQUIRE(seg.paragraphs.size() == 1);
  REQUIRE(seg.sentences.size() == 1);
  const auto& tokens = seg.sentences[0].tokens;
  REQUIRE(tokens.size() == 3);
  CHECK(tokens[0].surface == "Hello");
  CHECK(tokens[1].surface == "world");
  CHECK(tokens[2].surface == ".");
  CHECK(tokens[0].is_word);
  CHECK(tokens[1].is_word);
  CHECK_FALSE(tokens[2].is_word);
}

TEST_CASE("blank lines split paragraphs, single newlines do not") {
  const auto seg = segment("A b.\n\nC d.");
  REQUIRE(seg.paragraphs.size() == 2);
  CHECK(seg.paragraphs[0] == std::pair<std::size_t, std::size_t>{0, 1});
  CHECK(seg.paragraphs[1] == std::pair<std::size_t, std::size_t>{1, 2});

  const auto soft = segment("A b.\nC d.");
  CHECK(soft.paragraphs.size() == 1);
  CHECK(soft.sentences.size() == 2);
}

// Golden expectations written by hand before the splitter was implemented.
TEST_CASE("abbreviation guard list") {
  struct Case {
    const char* text;
    std::size_t sentences;
  };
  const Case cases[] = {
      {"Mr. Smith runs.", 1},
      {"Dr. Jones met Mrs. Lee.", 1},
      {"It costs 3.5 dollars.", 1},
      {"We left. He stayed.", 2},
      {"I saw J. Smith. He waved.", 2},
      {"It works, e.g. here.", 1},
      {"What? Really!", 2},
      {"No terminal punctuation", 1},
  };
  for (const auto& c : cases) {
    CAPTURE(c.text);
    CHECK(segment(c.text).sentences.size() == c.sentences);
  }
}

TEST_CASE("segmentation is total over non-whitespace bytes") {
  const std::string text = "Hi there!  (Well, \"hi\".)\n\nSecond\tpara: a-b, don't stop... end";
  const auto seg = segment(text);
  std::vector<bool> covered(text.size(), false);
  for (const auto& s : seg.sentences) {
    for (const auto& t : s.tokens) {
      REQUIRE(t.begin < t.end);
      REQUIRE(t.end <= text.size());
      CHECK(text.substr(t.begin, t.end - t.begin) == t.surface);
      for (std::size_t i = t.begin; i < t.end; ++i) {
        CHECK_FALSE(covered[i]);  // non-overlapping
        covered[i] = true;
      }
    }
  }
  for (std::size_t i = 0; i < text.size(); ++i) {
    const bool ws = text[i] == ' ' || text[i] == '\t' || text[i] == '\n';
    if (!ws) CHECK(covered[i]);
  }
}

TEST_CASE("punctuation-only candidates merge into a neighbour sentence") {
  const auto seg = segment("Hi. !!!");
  REQUIRE(seg.sentences.size() == 1);
  CHECK(seg.sentences[0].word_count() == 1);
}

TEST_CASE("empty and whitespace-only text") {
  CHECK(segment("").sentences.empty());
  CHECK(segment("  \n\n \t ").sentences.empty());
}

TEST_CASE("apostrophes and hyphens stay inside word tokens") {
  const auto seg = segment("don't well-known");
  REQUIRE(seg.sentences.size() == 1);
  REQUIRE(seg.sentences[0].tokens.size() == 2);
  CHECK(seg.sentences[0].tokens[0].surface == "don't");
  CHECK(seg.sentences[0].tokens[1].surface == "well-known");
}
