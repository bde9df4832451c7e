#include "metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "error.hpp"

namespace scorelens::metrics {

const std::array<const char*, MetricVector::size>& MetricVector::names() {
  static const std::array<const char*, size> n = {
      "word_num", "sent_num", "mls", "addt", "lemma_ttr", "lex_soph", "error_density"};
  return n;
}

double MetricVector::operator[](std::size_t i) const {
  switch (i) {
    case 0: return word_num;
    case 1: return sent_num;
    case 2: return mls;
    case 3: return addt;
    case 4: return lemma_ttr;
    case 5: return lex_soph;
    case 6: return error_density;
    default: throw ValidationError("MetricVector index out of range");
  }
}

std::array<double, MetricVector::size> MetricVector::values() const {
  return {word_num, sent_num, mls, addt, lemma_ttr, lex_soph, error_density};
}

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

const std::unordered_map<std::string, std::string>& irregular_lemmas() {
  static const std::unordered_map<std::string, std::string> table = {
      {"am", "be"},       {"is", "be"},       {"are", "be"},      {"was", "be"},
      {"were", "be"},     {"been", "be"},     {"being", "be"},    {"has", "have"},
      {"had", "have"},    {"having", "have"}, {"does", "do"},     {"did", "do"},
      {"done", "do"},     {"goes", "go"},     {"went", "go"},     {"gone", "go"},
      {"ran", "run"},     {"runs", "run"},    {"running", "run"}, {"said", "say"},
      {"made", "make"},   {"got", "get"},     {"gotten", "get"},  {"men", "man"},
      {"women", "woman"}, {"children", "child"}, {"people", "person"}, {"feet", "foot"},
      {"teeth", "tooth"}, {"mice", "mouse"},  {"wrote", "write"}, {"written", "write"},
      {"took", "take"},   {"taken", "take"},  {"saw", "see"},     {"seen", "see"},
      {"came", "come"},   {"knew", "know"},   {"known", "know"},  {"thought", "think"},
      {"felt", "feel"},   {"found", "find"},  {"gave", "give"},   {"given", "give"},
      {"told", "tell"},   {"better", "good"}, {"best", "good"},   {"worse", "bad"},
      {"worst", "bad"},
  };
  return table;
}

}  // namespace

std::string lemmatize(std::string_view word) {
  std::string w = lowercase(word);
  const auto& irregular = irregular_lemmas();
  const auto it = irregular.find(w);
  if (it != irregular.end()) return it->second;
  if (ends_with(w, "'s")) w.resize(w.size() - 2);
  if (w.size() > 4 && ends_with(w, "ies")) return w.substr(0, w.size() - 3) + "y";
  if (w.size() > 4 && ends_with(w, "ied")) return w.substr(0, w.size() - 3) + "y";
  if (w.size() > 4 && (ends_with(w, "ches") || ends_with(w, "shes") || ends_with(w, "sses") ||
                       ends_with(w, "xes") || ends_with(w, "zes") || ends_with(w, "oes")))
    return w.substr(0, w.size() - 2);
  if (w.size() > 3 && ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us"))
    return w.substr(0, w.size() - 1);
  if (w.size() > 5 && ends_with(w, "ing")) return w.substr(0, w.size() - 3);
  if (w.size() > 4 && ends_with(w, "ed")) return w.substr(0, w.size() - 2);
  return w;
}

std::string token_lemma(const corpus::Token& token) {
  if (token.lemma) return lowercase(*token.lemma);
  return lemmatize(token.surface);
}

FrequencyLexicon FrequencyLexicon::load_tsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open frequency lexicon: " + path);
  std::unordered_map<std::string, double> counts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected lemma<TAB>count");
    double count;
    try {
      count = std::stod(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": count is not numeric");
    }
    if (count < 1.0)
      throw ValidationError(path + ":" + std::to_string(lineno) + ": counts must be >= 1");
    counts[lowercase(line.substr(0, tab))] = count;
  }
  FrequencyLexicon lex;
  lex.counts_ = std::move(counts);
  lex.source_ = path;
  return lex;
}

FrequencyLexicon FrequencyLexicon::from_counts(std::unordered_map<std::string, double> counts,
                                               std::string source) {
  FrequencyLexicon lex;
  for (auto& [k, v] : counts) {
    if (v < 1.0) throw ValidationError("lexicon counts must be >= 1");
    lex.counts_[lowercase(k)] = v;
  }
  lex.source_ = std::move(source);
  return lex;
}

std::optional<double> FrequencyLexicon::freq(std::string_view lemma) const {
  const auto it = counts_.find(lowercase(lemma));
  if (it == counts_.end()) return std::nullopt;
  return it->second;
}

Counts word_and_sentence_counts(const corpus::Essay& essay) {
  if (essay.sentences.empty()) throw ValidationError("essay '" + essay.id + "' has no sentences");
  Counts c;
  c.sent_num = essay.sentences.size();
  for (const auto& s : essay.sentences) c.word_num += s.word_count();
  c.mls = static_cast<double>(c.word_num) / static_cast<double>(c.sent_num);
  return c;
}

double avg_dep_depth(const corpus::Essay& essay) {
  if (essay.sentences.empty()) throw ValidationError("essay '" + essay.id + "' has no sentences");
  long long total = 0;
  for (std::size_t si = 0; si < essay.sentences.size(); ++si) {
    const auto& s = essay.sentences[si];
    if (!s.dep)
      throw ValidationError("essay '" + essay.id + "': sentence " + std::to_string(si) +
                            " has no dependency tree");
    const auto& heads = s.dep->heads;
    int max_depth = 0;
    for (std::size_t t = 0; t < heads.size(); ++t) {
      int depth = 0;
      std::size_t cur = t;
      while (heads[cur] != 0) {
        cur = static_cast<std::size_t>(heads[cur] - 1);
        if (++depth > static_cast<int>(heads.size()))
          throw ValidationError("essay '" + essay.id + "': sentence " + std::to_string(si) +
                                " has a cyclic dependency tree");
      }
      max_depth = std::max(max_depth, depth);
    }
    total += max_depth;
  }
  return static_cast<double>(total) / static_cast<double>(essay.sentences.size());
}

double lemma_ttr(const corpus::Essay& essay) {
  std::set<std::string> types;
  std::size_t words = 0;
  for (const auto& s : essay.sentences) {
    for (const auto& t : s.tokens) {
      if (!t.is_word) continue;
      ++words;
      types.insert(token_lemma(t));
    }
  }
  if (words == 0) throw ValidationError("essay '" + essay.id + "' has no word tokens");
  return static_cast<double>(types.size()) / static_cast<double>(words);
}

double lex_soph(const corpus::Essay& essay, const FrequencyLexicon& lexicon) {
  if (lexicon.empty()) throw ValidationError("lex_soph: empty frequency lexicon");
  // lemma -> occurrence count, in sorted order for permutation-stable sums
  std::map<std::string, std::size_t> occur;
  std::size_t words = 0;
  for (const auto& s : essay.sentences) {
    for (const auto& t : s.tokens) {
      if (!t.is_word) continue;
      ++words;
      ++occur[token_lemma(t)];
    }
  }
  if (words == 0) throw ValidationError("essay '" + essay.id + "' has no word tokens");
  double acc = 0.0;
  for (const auto& [lemma, count] : occur) {
    const double f = lexicon.freq(lemma).value_or(1.0);
    acc += static_cast<double>(count) / std::log(f + 1.0);
  }
  return acc / static_cast<double>(words);
}

double error_density(const corpus::Essay& essay, const ErrorReport& report) {
  if (report.essay_id != essay.id)
    throw ValidationError("error report for '" + report.essay_id + "' applied to essay '" +
                          essay.id + "'");
  const Counts c = word_and_sentence_counts(essay);
  if (c.word_num == 0) throw ValidationError("essay '" + essay.id + "' has no word tokens");
  return static_cast<double>(report.matches.size()) / static_cast<double>(c.word_num);
}

MetricVector compute_metrics(const corpus::Essay& essay, const FrequencyLexicon& lexicon,
                             const ErrorReport& report) {
  const Counts c = word_and_sentence_counts(essay);
  MetricVector v;
  v.word_num = static_cast<double>(c.word_num);
  v.sent_num = static_cast<double>(c.sent_num);
  v.mls = c.mls;
  v.addt = avg_dep_depth(essay);
  v.lemma_ttr = lemma_ttr(essay);
  v.lex_soph = lex_soph(essay, lexicon);
  v.error_density = error_density(essay, report);
  return v;
}

}  // namespace scorelens::metrics
