#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scoring.hpp"

namespace scorelens::pipeline {

struct GrammarSection {
  std::string endpoint;
  int retries = 2;
  int parallelism = 1;
};

struct ChatSection {
  std::string endpoint;
  std::string model;
  std::string api_key_env = "OPENAI_API_KEY";
  int retries = 2;
};

struct InterventionSection {
  std::vector<std::string> kinds;
  double sentence_fraction = 0.5;
  double word_fraction = 0.3;
  std::string keyboard_table;  // optional TSV override
  std::string sva_table;       // optional TSV override
};

struct BootstrapSection {
  int iterations = 10000;
  double level = 0.95;
  int threads = 1;
};

struct FeedbackSection {
  std::string scorer;       // id of the llm scorer whose sessions are continued
  std::string annotations;  // CSV path for the tally subcommand
};

// The run configuration: one file, one master seed, everything else derived.
struct RunConfig {
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::string cache_dir = "cache";
  scoring::DatasetKind dataset_kind = scoring::DatasetKind::ellipse_like;

  std::string corpus_test;
  std::string corpus_train;   // optional
  std::string conllu;         // optional
  std::string prompts_path;   // optional JSON {prompt_id: text}
  std::string lexicon;        // optional except where a stage requires it

  GrammarSection grammar;
  ChatSection chat;
  InterventionSection interventions;
  std::vector<scoring::ScorerSpec> scorers;
  std::string exemplars_path;  // input for few-shot scorers / output of select-exemplars
  BootstrapSection bootstrap;
  FeedbackSection feedback;
  int parallelism = 1;
  bool emit_latex = false;

  // Validates invariants: seed present, referenced paths exist, scorer specs
  // well-formed. Called by load_config; re-run after overrides.
  void validate() const;
};

RunConfig load_config(const std::string& path);

// CLI-style overrides ("seed", "out", "cache").
void apply_override(RunConfig& config, const std::string& key, const std::string& value);

}  // namespace scorelens::pipeline
