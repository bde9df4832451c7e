#include "text.hpp"

#include <array>
#include <cctype>
#include <unordered_set>

namespace scorelens::corpus {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

bool is_ascii_alnum(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

// Typographic punctuation the tokenizer strips like ASCII punctuation.
const std::array<std::string_view, 8> kMultibytePunct = {
    "‘", "’", "“", "”",  // curly quotes
    "–", "—",                      // en/em dash
    "…",                                // ellipsis
    "«",                                // guillemet (left); right below
};

bool is_ascii_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

// Words that end with '.' without terminating a sentence. Single letters
// (initials) are guarded separately.
const std::unordered_set<std::string>& abbreviations() {
  static const std::unordered_set<std::string> set = {
      "mr",  "mrs", "ms",  "dr",   "prof", "sr",   "jr",   "st",  "vs",
      "etc", "eg",  "ie",  "fig",  "figs", "no",   "nos",  "inc", "ltd",
      "co",  "dept", "univ", "approx", "est", "al", "cf", "resp",
  };
  return set;
}

}  // namespace

std::size_t punct_char_len(std::string_view text, std::size_t i) {
  const char c = text[i];
  if (static_cast<unsigned char>(c) < 0x80) return is_ascii_punct(c) ? 1 : 0;
  for (auto p : kMultibytePunct) {
    if (text.substr(i, p.size()) == p) return p.size();
  }
  if (text.substr(i, 2) == "»") return 2;
  return 0;
}

std::size_t Sentence::word_count() const {
  std::size_t n = 0;
  for (const auto& t : tokens)
    if (t.is_word) ++n;
  return n;
}

namespace {

// Sentence-terminal closers that may follow ./!/? before the break.
bool is_closer_at(std::string_view text, std::size_t i, std::size_t* len) {
  const char c = text[i];
  if (c == '"' || c == '\'' || c == ')' || c == ']' || c == '}') {
    *len = 1;
    return true;
  }
  if (text.substr(i, 3) == "’" || text.substr(i, 3) == "”") {
    *len = 3;
    return true;
  }
  return false;
}

// Letters immediately preceding position i (exclusive), lowercased.
std::string word_before(std::string_view text, std::size_t i) {
  std::size_t b = i;
  while (b > 0 && std::isalpha(static_cast<unsigned char>(text[b - 1]))) --b;
  std::string w(text.substr(b, i - b));
  for (auto& ch : w) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return w;
}

// Splits [begin, end) into sentence byte ranges.
std::vector<std::pair<std::size_t, std::size_t>> split_sentences(std::string_view text,
                                                                 std::size_t begin,
                                                                 std::size_t end) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t start = begin;
  std::size_t i = begin;
  auto flush = [&](std::size_t stop) {
    // trim whitespace on both sides
    std::size_t s = start, e = stop;
    while (s < e && is_space(text[s])) ++s;
    while (e > s && is_space(text[e - 1])) --e;
    if (s < e) out.emplace_back(s, e);
    start = stop;
  };
  while (i < end) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') {
      ++i;
      continue;
    }
    // consume the terminal run, then closers
    std::size_t j = i;
    while (j < end && (text[j] == '.' || text[j] == '!' || text[j] == '?')) ++j;
    const bool single_period = (j == i + 1) && text[i] == '.';
    std::size_t k = j;
    std::size_t closer_len = 0;
    while (k < end && is_closer_at(text, k, &closer_len)) k += closer_len;
    const bool at_break = (k >= end) || is_space(text[k]);
    if (!at_break) {
      // mid-token punctuation (decimals, e.g., URLs); keep scanning
      i = j;
      continue;
    }
    if (single_period) {
      // decimal like "3." is a break, but "Mr." / "e.g." / initials are not
      const std::string w = word_before(text, i);
      const bool initial = w.size() == 1;
      if (!w.empty() && (initial || abbreviations().count(w) > 0)) {
        i = k;
        continue;
      }
    }
    flush(k);
    i = k;
  }
  flush(end);
  return out;
}

std::vector<Token> tokenize_range(std::string_view text, std::size_t begin, std::size_t end) {
  std::vector<Token> tokens;
  std::size_t i = begin;
  while (i < end) {
    if (is_space(text[i])) {
      ++i;
      continue;
    }
    std::size_t run_end = i;
    while (run_end < end && !is_space(text[run_end])) ++run_end;

    // peel leading punctuation characters
    std::size_t core_begin = i;
    while (core_begin < run_end) {
      const std::size_t plen = punct_char_len(text, core_begin);
      if (plen == 0) break;
      tokens.push_back({std::string(text.substr(core_begin, plen)), core_begin,
                        core_begin + plen, false, std::nullopt});
      core_begin += plen;
    }
    // peel trailing punctuation characters (collected back-to-front)
    std::size_t core_end = run_end;
    std::vector<Token> tail;
    while (core_end > core_begin) {
      // find length of the punct char ending at core_end, if any
      std::size_t plen = 0;
      for (std::size_t l = 1; l <= 3 && l <= core_end - core_begin; ++l) {
        const std::size_t cand = punct_char_len(text, core_end - l);
        if (cand == l) {
          plen = l;
          break;
        }
      }
      if (plen == 0) break;
      tail.push_back({std::string(text.substr(core_end - plen, plen)), core_end - plen,
                      core_end, false, std::nullopt});
      core_end -= plen;
    }
    if (core_begin < core_end) {
      std::string surface(text.substr(core_begin, core_end - core_begin));
      bool word = false;
      for (std::size_t p = 0; p < surface.size(); ++p) {
        const unsigned char uc = static_cast<unsigned char>(surface[p]);
        if (uc >= 0x80 || is_ascii_alnum(surface[p])) {
          word = true;
          break;
        }
      }
      tokens.push_back({std::move(surface), core_begin, core_end, word, std::nullopt});
    }
    for (auto it = tail.rbegin(); it != tail.rend(); ++it) tokens.push_back(std::move(*it));
    i = run_end;
  }
  return tokens;
}

}  // namespace

Segmented segment(std::string_view text) {
  Segmented out;

  // paragraph byte ranges: maximal runs of non-blank lines
  std::vector<std::pair<std::size_t, std::size_t>> para_ranges;
  std::size_t pos = 0;
  std::size_t para_start = std::string::npos;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    bool blank = true;
    for (std::size_t p = pos; p < eol; ++p) {
      if (!is_space(text[p])) {
        blank = false;
        break;
      }
    }
    if (!blank && para_start == std::string::npos) para_start = pos;
    if (blank && para_start != std::string::npos) {
      para_ranges.emplace_back(para_start, pos);
      para_start = std::string::npos;
    }
    if (eol == text.size()) break;
    pos = eol + 1;
  }
  if (para_start != std::string::npos) para_ranges.emplace_back(para_start, text.size());

  for (const auto& [pb, pe] : para_ranges) {
    const std::size_t first_sentence = out.sentences.size();
    std::vector<Sentence> para_sentences;
    for (const auto& [sb, se] : split_sentences(text, pb, pe)) {
      Sentence s;
      s.tokens = tokenize_range(text, sb, se);
      if (!s.tokens.empty()) para_sentences.push_back(std::move(s));
    }
    // merge word-less candidates into a neighbour within the paragraph
    for (std::size_t si = 0; si < para_sentences.size();) {
      if (para_sentences[si].has_word() || para_sentences.size() == 1) {
        ++si;
        continue;
      }
      const std::size_t target = si > 0 ? si - 1 : si + 1;
      auto& dst = para_sentences[target];
      auto& src = para_sentences[si];
      if (target < si) {
        for (auto& t : src.tokens) dst.tokens.push_back(std::move(t));
      } else {
        std::vector<Token> merged = std::move(src.tokens);
        for (auto& t : dst.tokens) merged.push_back(std::move(t));
        dst.tokens = std::move(merged);
      }
      para_sentences.erase(para_sentences.begin() + static_cast<std::ptrdiff_t>(si));
      if (si > 0) si = si > 1 ? si - 1 : 0;
    }
    for (auto& s : para_sentences) out.sentences.push_back(std::move(s));
    if (out.sentences.size() > first_sentence)
      out.paragraphs.emplace_back(first_sentence, out.sentences.size());
  }
  return out;
}

}  // namespace scorelens::corpus
