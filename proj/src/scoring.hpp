#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chat.hpp"
#include "corpus.hpp"
#include "metrics.hpp"
#include "scale.hpp"

namespace scorelens::scoring {

enum class DatasetKind { toefl_like, ellipse_like };
DatasetKind parse_dataset_kind(const std::string& name);
const char* to_string(DatasetKind kind);

enum class ScorerKind { llm_zero_shot, llm_few_shot, http, mock };
ScorerKind parse_scorer_kind(const std::string& name);
const char* to_string(ScorerKind kind);

struct Exemplar {
  Level level = Level::Medium;
  std::string essay_id;
  std::string text;
  std::optional<double> score;  // required for numeric few-shot prompts
};

struct MockConfig {
  std::string flavor;             // "word_count" | "error_penalty" | "constant"
  double constant_value = 3.0;
  double words_per_point = 40.0;  // word_count: raw = 1 + words / words_per_point
  double alpha = 8.0;             // error_penalty: raw = 5 - alpha * errors/words
  std::string lexicon_path;
  std::string word_classes_path;      // optional TSV: word<TAB>class
  std::string class_successors_path;  // optional TSV: class<TAB>next1,next2,...
};

struct ScorerSpec {
  std::string id;
  ScorerKind kind = ScorerKind::mock;
  std::string model;                // llm kinds
  std::string rubric;               // empty selects the dataset default
  std::vector<Exemplar> exemplars;  // few-shot: exactly three, one per level
  std::string endpoint;             // http kind
  MockConfig mock;

  // Few-shot TOEFL-style prompts ask for a level; everything else is numeric.
  bool level_scale(DatasetKind dataset) const {
    return kind == ScorerKind::llm_few_shot && dataset == DatasetKind::toefl_like;
  }
};

struct RawScore {
  std::optional<double> number;
  std::optional<Level> level;
};

struct ScoreRecord {
  std::string scorer_id;
  std::string essay_id;
  std::string variant;  // "original" or an intervention kind name
  RawScore raw;         // verbatim, for audit
  std::optional<double> normalized;      // grid value (numeric scale)
  std::optional<Level> normalized_level; // level scale
  // Numeric view of the normalized score; level records map to band midpoints.
  double numeric_value() const;
};

// Renders the scoring request for the dataset/scorer combination: the rater
// system role, the dataset's template with rubric, exemplars and essay
// substituted, JSON mode, temperature 0, seed 42.
chat::ChatRequest build_score_prompt(const corpus::Essay& essay,
                                     const std::optional<std::string>& prompt_text,
                                     const ScorerSpec& spec, DatasetKind dataset);

// Extracts the "score" number (accepted within [1, 5]) or the "score_level"
// string from a response payload. Throws ParseError with the offending
// payload attached.
RawScore parse_score_response(const std::string& payload, bool expect_level);

// A scorer produces a raw score for one essay.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual RawScore score(const corpus::Essay& essay,
                         const std::optional<std::string>& prompt_text) = 0;
  virtual bool level_scale() const { return false; }
};

// Prompt-building scorer over a chat transport. Unparsable responses trigger
// up to two re-requests with a "Respond with valid JSON only." reminder line
// appended to the user message (the retry is flagged in the gap notes).
std::unique_ptr<Scorer> make_llm_scorer(const ScorerSpec& spec, DatasetKind dataset,
                                        chat::Transport& transport);

// Generic HTTP adapter: POST {"text": str} -> {"score": number}.
std::unique_ptr<Scorer> make_http_scorer(const ScorerSpec& spec, int retries = 2,
                                         int timeout_seconds = 60);

// Deterministic offline scorers for tests and pipeline dry runs.
std::unique_ptr<Scorer> make_mock_scorer(const ScorerSpec& spec);

struct GapEntry {
  std::string essay_id;
  std::string message;
};

struct BatchResult {
  std::vector<ScoreRecord> records;  // in input order
  std::vector<GapEntry> gaps;        // failures after retries; never fabricated
};

// Scores a sequence of essays. Output order equals input order regardless of
// the worker count. prompt_of may be null when the dataset needs no prompt.
BatchResult score_batch(std::span<const corpus::Essay> essays, const std::string& variant,
                        const ScorerSpec& spec, Scorer& scorer,
                        const std::function<std::optional<std::string>(const corpus::Essay&)>&
                            prompt_of,
                        int parallelism = 1);

void save_score_records(const std::vector<ScoreRecord>& records, const std::string& path);
std::vector<ScoreRecord> load_score_records(const std::string& path);

}  // namespace scorelens::scoring
