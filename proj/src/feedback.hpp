#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "chat.hpp"
#include "interventions.hpp"

namespace scorelens::feedback {

struct FeedbackTriple {
  std::string organization;
  std::string language_use;
  std::string conventions;
};

// Continues a completed scoring exchange with the feedback instruction:
// [scoring request messages..., assistant score reply, feedback instruction].
chat::ChatRequest build_feedback_request(const chat::ChatRequest& scoring_request,
                                         const std::string& score_reply);

// Parses {"organization_feedback", "language_use_feedback",
// "conventions_feedback"}; all three keys must be present and non-empty.
FeedbackTriple parse_feedback_response(const std::string& payload);

struct FeedbackPair {
  std::string pair_id;
  interventions::Kind kind = interventions::Kind::SpellingErrors;
  FeedbackTriple original;
  FeedbackTriple counterfactual;
};

// Writes the annotator file ({"pair_id","feedback_a","feedback_b"}, slot
// assignment by seeded coin flip, no original/counterfactual labels) and the
// sealed key file ({"pair_id","counterfactual_slot","kind"}). Deterministic
// per seed.
void export_blinded_pairs(const std::vector<FeedbackPair>& pairs, std::uint64_t seed,
                          const std::string& annotator_path, const std::string& key_path);

enum class VoteLabel { correct, incorrect, indeterminate };
VoteLabel parse_vote_label(const std::string& s);
const char* to_string(VoteLabel label);

struct VoteOutcome {
  std::vector<VoteLabel> labels;  // exactly three, annotator order irrelevant
  VoteLabel final = VoteLabel::indeterminate;
};

// Majority rule: any label held by >= 2 annotators wins, otherwise
// indeterminate.
VoteLabel majority(const std::vector<VoteLabel>& labels);

struct DetectionRates {
  // per kind: integer percent correct/incorrect/indeterminate (half-up),
  // plus the raw counts
  struct Row {
    int correct_pct = 0;
    int incorrect_pct = 0;
    int indeterminate_pct = 0;
    std::size_t pairs = 0;
  };
  std::map<std::string, Row> by_kind;
};

struct Annotation {
  std::string pair_id;
  std::string annotator_id;
  std::string label;  // "a"/"b" slot guesses or literal correct/incorrect/indeterminate
  std::string kind;
};

// Annotations CSV: pair_id,annotator_id,label,kind (header optional). Slot
// guesses are resolved against the key file; exactly three annotations per
// pair are required.
std::vector<Annotation> load_annotations_csv(const std::string& path);
std::map<std::string, std::string> load_key_file(const std::string& key_path);  // pair -> slot

DetectionRates tabulate_votes(const std::vector<Annotation>& annotations,
                              const std::map<std::string, std::string>& key);

std::string rates_to_csv(const DetectionRates& rates);

}  // namespace scorelens::feedback
