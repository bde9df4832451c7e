#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "corpus.hpp"

namespace scorelens::metrics {

// The seven indicators used to validate counterfactual quality.
struct MetricVector {
  double word_num = 0.0;
  double sent_num = 0.0;
  double mls = 0.0;           // words per sentence
  double addt = 0.0;          // mean dependency-tree depth
  double lemma_ttr = 0.0;     // distinct lemmas / words
  double lex_soph = 0.0;      // mean inverse log lemma frequency
  double error_density = 0.0; // checker matches / words

  static constexpr std::size_t size = 7;
  static const std::array<const char*, size>& names();
  double operator[](std::size_t i) const;
  std::array<double, size> values() const;
};

// lemma -> corpus count, case-insensitive lookup. Counts are positive reals
// (>= 1) so derived lexicons keep full precision.
class FrequencyLexicon {
 public:
  FrequencyLexicon() = default;
  // TSV rows: lemma<TAB>count. '#' lines are comments.
  static FrequencyLexicon load_tsv(const std::string& path);
  static FrequencyLexicon from_counts(std::unordered_map<std::string, double> counts,
                                      std::string source = "inline");

  // Count for a lemma, or nullopt when out of lexicon.
  std::optional<double> freq(std::string_view lemma) const;
  bool contains(std::string_view lemma) const { return freq(lemma).has_value(); }
  bool empty() const { return counts_.empty(); }
  const std::string& source() const { return source_; }

 private:
  std::unordered_map<std::string, double> counts_;
  std::string source_;
};

// Rule-based fallback lemmatizer (lowercase, small irregular table, plural and
// verbal suffix stripping). CoNLL-U lemmas on the token take precedence.
std::string lemmatize(std::string_view word);
// Lemma of a token: attached lemma if present (lowercased), else the rules.
std::string token_lemma(const corpus::Token& token);

struct Counts {
  std::size_t word_num = 0;
  std::size_t sent_num = 0;
  double mls = 0.0;
};
Counts word_and_sentence_counts(const corpus::Essay& essay);

// Mean over sentences of the max root-to-token edge count. Every sentence
// must carry a DepTree. Depths are accumulated as integers so the mean does
// not depend on sentence order.
double avg_dep_depth(const corpus::Essay& essay);

double lemma_ttr(const corpus::Essay& essay);

// |W|^-1 * sum over word tokens of 1/ln(Freq(lemma)+1); out-of-lexicon lemmas
// use Freq = 1. The sum is accumulated in sorted-lemma order so the value is
// invariant under token reordering.
double lex_soph(const corpus::Essay& essay, const FrequencyLexicon& lexicon);

struct GrammarMatch {
  std::size_t offset = 0;
  std::size_t length = 0;
  std::string rule_id;
  std::string message;
};

struct ErrorReport {
  std::string essay_id;
  std::vector<GrammarMatch> matches;
};

double error_density(const corpus::Essay& essay, const ErrorReport& report);

MetricVector compute_metrics(const corpus::Essay& essay, const FrequencyLexicon& lexicon,
                             const ErrorReport& report);

}  // namespace scorelens::metrics
