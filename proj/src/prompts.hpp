#pragma once

#include <string>

namespace scorelens::interventions {
enum class Kind;
}

namespace scorelens::prompts {

// System roles.
extern const char* const kTutorSystem;
extern const char* const kToeflRaterSystem;
extern const char* const kEllipseRaterSystem;

// Default scoring rubrics, inserted into the rubric slot of the scoring
// templates unless a ScorerSpec overrides them.
extern const char* const kToeflRubrics;
extern const char* const kEllipseRubrics;

// Multi-line feedback instruction (third turn of a feedback conversation).
extern const char* const kFeedbackInstruction;

// User message for the three rewrite kinds, essay substituted into the slot.
std::string render_rewrite(interventions::Kind kind, const std::string& essay_text);

std::string render_score_zero_toefl(const std::string& prompt_text, const std::string& essay_text,
                                    const std::string& rubric);
std::string render_score_zero_ellipse(const std::string& essay_text, const std::string& rubric);

struct FewShotExample {
  std::string text;
  std::string label;  // "High"/"Medium"/"Low" for level prompts, "4.0" style for numeric
};

// Few-shot templates take exactly three examples ordered High, Medium, Low.
std::string render_score_few_toefl(const std::string& prompt_text, const FewShotExample& high,
                                   const FewShotExample& medium, const FewShotExample& low,
                                   const std::string& essay_text, const std::string& rubric);
std::string render_score_few_ellipse(const FewShotExample& high, const FewShotExample& medium,
                                     const FewShotExample& low, const std::string& essay_text,
                                     const std::string& rubric);

}  // namespace scorelens::prompts
