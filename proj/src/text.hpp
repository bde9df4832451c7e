#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace scorelens::corpus {

struct Token {
  std::string surface;
  std::size_t begin = 0;  // half-open byte span into the essay text
  std::size_t end = 0;
  bool is_word = true;  // false for punctuation tokens
  std::optional<std::string> lemma;
};

// Per-token head indices, 1-based; 0 marks the synthetic root's child.
struct DepTree {
  std::vector<int> heads;
  std::vector<std::string> labels;
};

struct Sentence {
  std::vector<Token> tokens;
  std::optional<DepTree> dep;

  std::size_t begin() const { return tokens.front().begin; }
  std::size_t end() const { return tokens.back().end; }
  std::size_t word_count() const;
  bool has_word() const { return word_count() > 0; }
};

struct Segmented {
  std::vector<std::pair<std::size_t, std::size_t>> paragraphs;  // sentence-index ranges
  std::vector<Sentence> sentences;
};

// Rule-based segmentation: paragraphs at blank-line runs (a single newline is
// a soft wrap), sentences at terminal ./!/? plus closing quotes with an
// abbreviation stop-list, tokens at whitespace boundaries with leading and
// trailing punctuation split off as non-word tokens. Sentence candidates that
// contain no word token are merged into a neighbouring sentence of the same
// paragraph so that every realistic sentence carries at least one word.
Segmented segment(std::string_view text);

// True if the byte sequence starting at i is one of the punctuation
// characters the tokenizer treats as splittable (ASCII punctuation plus a
// small set of typographic quotes/dashes). Returns its byte length, else 0.
std::size_t punct_char_len(std::string_view text, std::size_t i);

}  // namespace scorelens::corpus
