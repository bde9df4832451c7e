#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chat.hpp"
#include "corpus.hpp"

namespace scorelens::interventions {

enum class Kind {
  ErrorCorrection,
  SpellingErrors,
  SvaErrors,
  WordOrderSwap,
  Complexification,
  Simplification,
  IntraParaShuffle,
  InterTextShuffle,
};

const char* to_string(Kind kind);
Kind parse_kind(const std::string& name);
// All eight kinds in spec order.
const std::vector<Kind>& all_kinds();
bool is_rule_based(Kind kind);
bool is_rewrite(Kind kind);  // LLM-backed kinds

struct RuleParams {
  double sentence_fraction = 0.5;
  double word_fraction = 0.3;
  std::uint64_t seed = 0;
};

// Rate counts: round half up with a floor of 1 when the fraction is positive
// and the pool is non-empty.
std::size_t rate_count(double fraction, std::size_t pool);

struct DiffEntry {
  std::size_t sentence = 0;
  std::string change;              // "spelling" | "sva" | "swap" | "moved"
  std::vector<std::size_t> tokens; // indices within the sentence; empty for "moved"
};

struct CounterfactualRecord {
  std::string source_id;
  Kind kind = Kind::SpellingErrors;
  RuleParams params;                  // rule-based kinds
  std::string prompt_version;         // rewrite kinds
  corpus::Essay essay;                // the perturbed essay
  std::vector<DiffEntry> diff;        // empty iff essay text equals source text
  std::vector<std::string> skipped;   // per-sentence skip log ("3: no eligible verb")
};

// Keyboard adjacency for misspelling substitutions. Rows: key<TAB>neighbours.
class KeyboardAdjacency {
 public:
  static KeyboardAdjacency builtin_qwerty();
  static KeyboardAdjacency load_tsv(const std::string& path);
  // Neighbours of a lowercase key; empty when the key is unmapped.
  const std::string& neighbours(char key) const;

 private:
  std::map<char, std::string> table_;
};

// Verb number flips. Irregular rows: form<TAB>flipped; regular 3sg forms fall
// back to -s/-es stripping (or attachment, when the direction is known).
class SvaMorphology {
 public:
  static SvaMorphology builtin();
  static SvaMorphology load_tsv(const std::string& path);
  // Flipped surface, or nullopt when the form is not recognizably finite.
  // `allow_attach` permits base -> 3sg attachment (used when a dependency
  // tree identified the token as a verb).
  std::optional<std::string> flip(const std::string& surface, bool allow_attach) const;
  bool is_irregular_form(const std::string& lower) const;

 private:
  std::map<std::string, std::string> irregular_;
};

// Misspell rate_count(word_fraction * words) word tokens in
// rate_count(sentence_fraction * sentences) sentences. One character-level
// corruption per token: adjacent-key substitution, adjacent transposition,
// deletion or duplication, chosen uniformly with seeded fallback order when
// an op is infeasible for the surface. Punctuation tokens are never touched;
// sentence count and per-sentence token counts are preserved.
CounterfactualRecord introduce_spelling_errors(const corpus::Essay& essay, const RuleParams& params,
                                               const KeyboardAdjacency& keymap);

// Flip the number of one finite verb per selected sentence. With a DepTree
// the verb is the first token governing a subject relation; without one, a
// tag-free heuristic takes the first auxiliary or apparent 3sg form.
// Sentences with no eligible verb are skipped and logged.
CounterfactualRecord introduce_sva_errors(const corpus::Essay& essay, const RuleParams& params,
                                          const SvaMorphology& morph);

// Swap rate_count(word_fraction * words) seeded word positions with their
// immediate right word-token neighbour (the last position swaps left).
// Punctuation positions are fixed; per-sentence token multisets preserved.
CounterfactualRecord swap_word_order(const corpus::Essay& essay, const RuleParams& params);

// Permute sentences within each paragraph (resampled until non-identity for
// paragraphs of >= 2 sentences). Paragraph boundaries and sentence contents
// are unchanged.
CounterfactualRecord shuffle_intra_paragraph(const corpus::Essay& essay, std::uint64_t seed);

// Permute all sentences globally (non-identity when >= 2 sentences), keeping
// the original paragraph size profile.
CounterfactualRecord shuffle_inter_text(const corpus::Essay& essay, std::uint64_t seed);

// Version tag baked into rewrite records and cache keys.
extern const char* const kPromptVersion;

// Chat request for the three rewrite kinds (ErrorCorrection,
// Complexification, Simplification): tutor system role, the kind's template
// with the essay substituted, JSON mode, temperature 0, seed 42.
chat::ChatRequest build_rewrite_request(const corpus::Essay& essay, Kind kind);
chat::ChatRequest build_rewrite_request(const std::string& essay_text, Kind kind);

// Extracts "output_essay" from a rewrite response payload.
std::string parse_rewrite_response(const std::string& payload);

// One step of a rewrite plan. Complexity steps name the correction step whose
// output is their input.
struct PlanStep {
  std::string essay_id;
  Kind kind = Kind::ErrorCorrection;
  std::optional<std::string> input_from;  // essay id whose correction output feeds this step
};

// Orders rewrite requests so Complexification/Simplification consume each
// essay's ErrorCorrection output. `cached_corrections` lists essay ids whose
// correction output already exists; corrections are not re-planned for them.
std::vector<PlanStep> plan_complexity_chain(const corpus::Corpus& corpus,
                                            const std::vector<Kind>& kinds,
                                            const std::set<std::string>& cached_corrections = {});

// JSONL persistence: {"source_id", "kind", "params", "text", "diff"}.
void save_records(const std::vector<CounterfactualRecord>& records, const std::string& path);
struct LoadedRecord {
  std::string source_id;
  Kind kind;
  corpus::Essay essay;  // re-segmented from the stored text
};
std::vector<LoadedRecord> load_records(const std::string& path);

}  // namespace scorelens::interventions
