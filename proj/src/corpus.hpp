#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "scale.hpp"
#include "text.hpp"

namespace scorelens::corpus {

struct GoldLabel {
  std::optional<double> numeric;  // raw score on [1, 5]
  std::optional<scoring::Level> level;
};

struct Essay {
  std::string id;
  std::optional<std::string> prompt_id;
  std::string text;
  std::vector<std::pair<std::size_t, std::size_t>> paragraphs;  // sentence-index ranges
  std::vector<Sentence> sentences;
  std::optional<GoldLabel> gold;

  std::size_t word_count() const;
  // Text of one sentence, as spanned by its tokens.
  std::string_view sentence_text(std::size_t sentence_index) const;
};

enum class Split { train, validation, test };

struct Corpus {
  std::string name;
  Split split = Split::test;
  std::vector<Essay> essays;

  const Essay* find(const std::string& id) const;
};

// Builds an Essay by segmenting raw text. Used by the JSONL loader and by the
// intervention writers when a perturbed text is re-ingested.
Essay make_essay(std::string id, std::string text, std::optional<std::string> prompt_id = {},
                 std::optional<GoldLabel> gold = {});

// Loads a corpus from JSONL records:
//   {"id": str, "prompt_id": str?, "text": str, "score": number?, "level": str?}
// Malformed lines raise ParseError naming the line; duplicate ids raise
// ValidationError. Deterministic for identical input bytes.
Corpus load_corpus(const std::string& path, std::string name = {}, Split split = Split::test);

// Serializes essays back to the JSONL record format above.
void save_corpus(const Corpus& corpus, const std::string& path);

struct ConlluAttachment {
  Corpus corpus;
  std::vector<std::string> unannotated;  // "essayId:sentenceIndex" coverage report
};

// Attaches dependency trees from a CoNLL-U file. Blocks either align 1:1 with
// the corpus sentences (by order and token count) or carry
// "# sent_id = essayId:sentenceIndex" comments. Trees are validated (heads in
// range, single root, acyclic); lemma columns populate token lemmas.
ConlluAttachment attach_conllu(const Corpus& corpus, const std::string& path);

// Deterministic stratified subset: per-stratum quotas by largest-remainder
// rounding of stratum prevalence, uniform within-stratum sampling, output in
// original corpus order.
Corpus stratified_subset(const Corpus& corpus, std::size_t n,
                         const std::function<std::string(const Essay&)>& strata_of,
                         std::uint64_t seed);

// Stratum label from gold info: the level if present, else the band of the
// normalized numeric score. Throws ValidationError when the essay has neither.
std::string gold_stratum(const Essay& essay);

}  // namespace scorelens::corpus
