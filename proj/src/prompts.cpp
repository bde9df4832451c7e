#include "prompts.hpp"

#include "error.hpp"
#include "interventions.hpp"

namespace scorelens::prompts {

const char* const kTutorSystem = "You are an experienced writing tutor.";

const char* const kToeflRaterSystem =
    "You are a TOEFL rater specializing in the evaluation of the Independent Writing section.";

const char* const kEllipseRaterSystem =
    "You are an essay rater specializing in the evaluation of essays written by students from 8th "
    "to 12th grade who are learning English as a second language.";

const char* const kToeflRubrics =
    "- A 5-point essay effectively addresses all aspects of the topic and task. Well organized and "
    "developed with clearly appropriate explanations and details. Displays strong unity, "
    "progression and coherence. Shows consistent language facility with syntactic variety, "
    "appropriate word choice and idiomaticity. May have minor lexical or grammatical errors.\n"
    "\n"
    "- A 4-point essay addresses the topic and task well, though some points may not be fully "
    "elaborated. Generally well organized and developed with appropriate and sufficient "
    "explanations, exemplifications and details. Displays unity, progression and coherence, "
    "though may contain occasional redundancy, digression or unclear connections. Demonstrates "
    "syntactic variety and vocabulary range. May have occasional minor errors that do not "
    "interfere with meaning.\n"
    "\n"
    "- A 3-point essay addresses the topic and task with somewhat developed explanations, "
    "exemplifications and details. Displays unity, progression and coherence, though connection "
    "of ideas may be occasionally obscured. May demonstrate inconsistent language facility "
    "resulting in lack of clarity and obscured meaning. May display accurate but limited "
    "structures and vocabulary.\n"
    "\n"
    "- A 2-point essay shows limited development in response to the topic and task. Inadequate "
    "organization or connection of ideas. Insufficient or inappropriate exemplifications, "
    "explanations or details to support generalizations. Noticeable inappropriate word choices "
    "or word forms. An accumulation of errors in sentence structure and/or usage.\n"
    "\n"
    "- A 1-point essay is seriously flawed due to disorganization, underdevelopment, little or no "
    "supporting detail, and unresponsiveness to the task. Contains serious and frequent errors "
    "in sentence structure or usage.";

const char* const kEllipseRubrics =
    "- A 5-point essay demonstrates native-like facility in the use of language with syntactic "
    "variety, appropriate word choice and phrases; well-controlled text organization; precise "
    "use of grammar and conventions; rare language inaccuracies that do not impede "
    "communication.\n"
    "\n"
    "- A 4-point essay demonstrates facility in the use of language with syntactic variety and "
    "range of words and phrases; controlled organization; accuracy in grammar and conventions; "
    "occasional language inaccuracies that rarely impede communication.\n"
    "\n"
    "- A 3-point essay demonstrates facility limited to the use of common structures and generic "
    "vocabulary; organization generally controlled although connection sometimes absent or "
    "unsuccessful; errors in grammar and syntax and usage. Communication is impeded by language "
    "inaccuracies in some cases.\n"
    "\n"
    "- A 2-point essay demonstrates inconsistent facility in sentence formation, word choice, and "
    "mechanics; organization partially developed but may be missing or unsuccessful. "
    "Communication impeded in many instances by language inaccuracies.\n"
    "\n"
    "- A 1-point essay demonstrates a limited range of familiar words or phrases loosely strung "
    "together; frequent errors in grammar (including syntax) and usage. Communication impeded "
    "in most cases by language inaccuracies.";

const char* const kFeedbackInstruction =
    "Please provide balanced and constructive feedback on the following aspects of the essay you "
    "have just rated (not the example essay):\n"
    "\n"
    "1. Organization:\n"
    "\n"
    "- Evaluate how effectively ideas are communicated and organized. Identify any issues with "
    "the logical flow, transitions between ideas, and clarity in conveying concepts. Comment on "
    "the introduction's setup, idea development throughout the body, and the conclusiveness of "
    "the ending.\n"
    "\n"
    "2. Language Use:\n"
    "\n"
    "   - Morphology: Identify errors in word formation and structure, focusing on verb tenses, "
    "irregular verbs, plurals, possessives, affixes, agreement, and gerund/participle usage.\n"
    "\n"
    "   - Syntax: Comment on the arrangement of words and phrases to create well-formed "
    "sentences, coherence in sentence construction, and the complexity and variety of sentence "
    "types.\n"
    "\n"
    "   - Vocabulary: Assess the appropriateness of word choice, the diversity and sophistication "
    "of vocabulary employed, and note any imprecise use of words where more accurate or specific "
    "terms could be used.\n"
    "\n"
    "3. Conventions:\n"
    "\n"
    "   - Highlight any errors in spelling, capitalization, and punctuation.\n"
    "\n"
    "Your response should be a structured JSON object with the following keys:\n"
    "\n"
    "```json\n"
    "{\n"
    "    \"organization_feedback\": \"\",\n"
    "    \"language_use_feedback\": \"\",\n"
    "    \"conventions_feedback\": \"\"\n"
    "}\n"
    "```\n"
    "\n"
    "If possible, include direct citations from the essay to substantiate your feedback.";

namespace {

const char* const kJsonTail =
    "Please return the output essay in JSON format as below:\n"
    "\n"
    "```\n"
    "{\"output_essay\": \"...\"}\n"
    "```\n"
    "\n"
    "Output:";

const char* const kSeparator = "\n\n----------\n\n";

const char* const kScoreKeyTail =
    "Your response should be a JSON object containing only one key: 'score', which should be a "
    "numeric value representing the score you gave.";

}  // namespace

std::string render_rewrite(interventions::Kind kind, const std::string& essay_text) {
  std::string head;
  switch (kind) {
    case interventions::Kind::ErrorCorrection:
      head =
          "Please fix the spelling, punctuation and grammatical errors in the given essay. Ensure "
          "the main idea, the words used, the sentence structure, and the length of the text "
          "remain consistent with the original text.";
      break;
    case interventions::Kind::Complexification:
      head =
          "Modify the provided essay to enhance its lexical sophistication and syntactic variety "
          "following the instructions below:\n"
          "\n"
          "1. Expand lexical range: Vary word choice and replace common words with advanced "
          "vocabulary when suitable without compromising clarity or meaning. Avoid repeating the "
          "same words and capture subtle differences in meaning.\n"
          "\n"
          "2. Increase syntactic complexity: Incorporate a wider range of sentence structures "
          "including compound-complex sentences, varied clause types, subordination and "
          "coordination. Use advanced constructions such as non-finite clauses, adverbials, "
          "conditionals, inversion and passives where appropriate.\n"
          "\n"
          "3. Maintain meaning, length and clarity: The revised text should retain the original "
          "ideas and conform to the initial length while remaining clear and understandable.";
      break;
    case interventions::Kind::Simplification:
      head =
          "Modify the provided essay to simplify its vocabulary and sentence structure following "
          "the instructions below:\n"
          "\n"
          "1. Simplify vocabulary: Replace advanced words with common everyday equivalents for "
          "clear understanding. Limit synonyms to favor those most commonly used.\n"
          "\n"
          "2. Simplify sentence structure: Break down complex sentences and avoid clauses, "
          "conjunctions, and nesting where possible. Favor short, simple subject-verb-object "
          "sentences.\n"
          "\n"
          "3. Maintain meaning, length and clarity: The revised text should retain the original "
          "ideas and conform to the initial length while remaining clear and understandable.";
      break;
    default:
      throw ValidationError("render_rewrite: not a rewrite kind");
  }
  return head + "\n\nInput Essay:\n\"" + essay_text + "\"\n\n" + kJsonTail;
}

std::string render_score_zero_toefl(const std::string& prompt_text, const std::string& essay_text,
                                    const std::string& rubric) {
  return "Read and evaluate the essay written in response to the prompt: \"" + prompt_text +
         "\"\n\nEssay:\n\"" + essay_text +
         "\"\n\nPlease assign it a score from 1 to 5 (in increments of 0.5 points) based on "
         "rubric below:\n\n\"" +
         rubric + "\"\n\n" + kScoreKeyTail;
}

std::string render_score_zero_ellipse(const std::string& essay_text, const std::string& rubric) {
  return "Read and evaluate the essay:\n\"" + essay_text +
         "\"\n\nAssign it a score from 1 to 5, in increments of 0.5, based on this rubric:\n\n\"" +
         rubric + "\"\n\n" + kScoreKeyTail;
}

std::string render_score_few_toefl(const std::string& prompt_text, const FewShotExample& high,
                                   const FewShotExample& medium, const FewShotExample& low,
                                   const std::string& essay_text, const std::string& rubric) {
  std::string out = "Read and evaluate the essay written in response to the prompt: \"" +
                    prompt_text + "\"";
  out += kSeparator;
  out += "Example essay 1 of score level \"" + high.label + "\":\n\n\"" + high.text + "\"";
  out += kSeparator;
  out += "Example Essay 2 of score level \"" + medium.label + "\":\n\n\"" + medium.text + "\"";
  out += kSeparator;
  out += "Example Essay 3 of score level \"" + low.label + "\":\n\n\"" + low.text + "\"";
  out += kSeparator;
  out += "Essay to score:\n\n\"" + essay_text + "\"";
  out +=
      "\n\nPlease note:\n\n- Low corresponds to scores of 1.0 - 2.0\n\n- Medium corresponds to "
      "scores of 2.5 - 3.5\n\n- High corresponds to scores of 4.0 - 5.0\n\n";
  out += "Assign the essay a score level of Low, Medium or High based on the criteria in the "
         "rubric below:\n\n\"" +
         rubric + "\"\n\n";
  out += "Your response should be a JSON object with the key \"score_level\" set to either "
         "\"Low\", \"Medium\", or \"High\" representing the level you determined for this essay.";
  return out;
}

std::string render_score_few_ellipse(const FewShotExample& high, const FewShotExample& medium,
                                     const FewShotExample& low, const std::string& essay_text,
                                     const std::string& rubric) {
  std::string out = "Read and evaluate the essay:";
  out += kSeparator;
  out += "Example essay 1 of score \"" + high.label + "\":\n\"" + high.text + "\"";
  out += kSeparator;
  out += "Example Essay 2 of score \"" + medium.label + "\":\n\"" + medium.text + "\"";
  out += kSeparator;
  out += "Example Essay 3 of score \"" + low.label + "\":\n\"" + low.text + "\"";
  out += kSeparator;
  out += "Essay to score:\n\"" + essay_text + "\"";
  out += "\n\nAssign it a score from 1 to 5, in increments of 0.5, based on this rubric:\n\n\"" +
         rubric + "\"\n\n";
  out += kScoreKeyTail;
  return out;
}

}  // namespace scorelens::prompts
