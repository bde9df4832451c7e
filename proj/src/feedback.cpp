#include "feedback.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "prompts.hpp"
#include "rng.hpp"

namespace scorelens::feedback {

using nlohmann::json;

chat::ChatRequest build_feedback_request(const chat::ChatRequest& scoring_request,
                                         const std::string& score_reply) {
  if (scoring_request.messages.empty())
    throw ValidationError("build_feedback_request: no prior scoring session");
  if (score_reply.empty())
    throw ValidationError("build_feedback_request: the scoring session has no model reply");
  chat::ChatRequest req = scoring_request;
  req.messages.push_back({"assistant", score_reply});
  req.messages.push_back({"user", prompts::kFeedbackInstruction});
  return req;
}

FeedbackTriple parse_feedback_response(const std::string& payload) {
  json doc;
  try {
    doc = json::parse(payload);
  } catch (const json::exception& e) {
    throw ParseError(std::string("feedback response is not valid JSON: ") + e.what() +
                     "; payload: " + payload);
  }
  FeedbackTriple triple;
  const struct {
    const char* key;
    std::string* slot;
  } fields[] = {
      {"organization_feedback", &triple.organization},
      {"language_use_feedback", &triple.language_use},
      {"conventions_feedback", &triple.conventions},
  };
  for (const auto& f : fields) {
    if (!doc.contains(f.key) || !doc[f.key].is_string() || doc[f.key].get<std::string>().empty())
      throw ParseError(std::string("feedback response is missing non-empty key '") + f.key + "'");
    *f.slot = doc[f.key].get<std::string>();
  }
  return triple;
}

namespace {

json triple_to_json(const FeedbackTriple& t) {
  return {{"organization_feedback", t.organization},
          {"language_use_feedback", t.language_use},
          {"conventions_feedback", t.conventions}};
}

}  // namespace

void export_blinded_pairs(const std::vector<FeedbackPair>& pairs, std::uint64_t seed,
                          const std::string& annotator_path, const std::string& key_path) {
  std::ofstream ann(annotator_path, std::ios::binary);
  if (!ann) throw IoError("cannot write annotator file: " + annotator_path);
  std::ofstream key(key_path, std::ios::binary);
  if (!key) throw IoError("cannot write key file: " + key_path);
  for (const auto& pair : pairs) {
    Rng rng(derive_seed(seed, "blind", pair.pair_id));
    const bool cf_in_a = rng.below(2) == 1;
    json rec;
    rec["pair_id"] = pair.pair_id;
    rec["feedback_a"] = triple_to_json(cf_in_a ? pair.counterfactual : pair.original);
    rec["feedback_b"] = triple_to_json(cf_in_a ? pair.original : pair.counterfactual);
    ann << rec.dump() << '\n';
    json krec;
    krec["pair_id"] = pair.pair_id;
    krec["counterfactual_slot"] = cf_in_a ? "a" : "b";
    krec["kind"] = interventions::to_string(pair.kind);
    key << krec.dump() << '\n';
  }
}

VoteLabel parse_vote_label(const std::string& s) {
  if (s == "correct") return VoteLabel::correct;
  if (s == "incorrect") return VoteLabel::incorrect;
  if (s == "indeterminate") return VoteLabel::indeterminate;
  throw ParseError("unknown vote label '" + s + "'");
}

const char* to_string(VoteLabel label) {
  switch (label) {
    case VoteLabel::correct: return "correct";
    case VoteLabel::incorrect: return "incorrect";
    case VoteLabel::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

VoteLabel majority(const std::vector<VoteLabel>& labels) {
  int counts[3] = {0, 0, 0};
  for (const auto l : labels) ++counts[static_cast<int>(l)];
  for (int i = 0; i < 3; ++i)
    if (counts[i] >= 2) return static_cast<VoteLabel>(i);
  return VoteLabel::indeterminate;
}

std::vector<Annotation> load_annotations_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open annotations file: " + path);
  std::vector<Annotation> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      if (comma == std::string::npos) {
        cols.push_back(line.substr(start));
        break;
      }
      cols.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (lineno == 1 && cols.size() >= 1 && cols[0] == "pair_id") continue;  // header
    if (cols.size() != 4)
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": expected pair_id,annotator_id,label,kind");
    out.push_back({cols[0], cols[1], cols[2], cols[3]});
  }
  return out;
}

std::map<std::string, std::string> load_key_file(const std::string& key_path) {
  std::ifstream in(key_path, std::ios::binary);
  if (!in) throw IoError("cannot open key file: " + key_path);
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    out[j.at("pair_id").get<std::string>()] = j.at("counterfactual_slot").get<std::string>();
  }
  return out;
}

DetectionRates tabulate_votes(const std::vector<Annotation>& annotations,
                              const std::map<std::string, std::string>& key) {
  struct PairVotes {
    std::string kind;
    std::vector<VoteLabel> labels;
  };
  std::map<std::string, PairVotes> by_pair;
  for (const auto& a : annotations) {
    VoteLabel label;
    if (a.label == "a" || a.label == "b") {
      const auto it = key.find(a.pair_id);
      if (it == key.end())
        throw ValidationError("annotation for pair '" + a.pair_id + "' has no key entry");
      label = a.label == it->second ? VoteLabel::correct : VoteLabel::incorrect;
    } else {
      label = parse_vote_label(a.label);
    }
    auto& pv = by_pair[a.pair_id];
    if (pv.kind.empty()) {
      pv.kind = a.kind;
    } else if (pv.kind != a.kind) {
      throw ValidationError("pair '" + a.pair_id + "' carries conflicting kinds");
    }
    pv.labels.push_back(label);
  }

  std::map<std::string, std::array<std::size_t, 3>> counts;  // kind -> final label counts
  for (const auto& [pair_id, pv] : by_pair) {
    if (pv.labels.size() != 3)
      throw ValidationError("pair '" + pair_id + "' has " + std::to_string(pv.labels.size()) +
                            " annotations, expected exactly 3");
    ++counts[pv.kind][static_cast<std::size_t>(majority(pv.labels))];
  }

  DetectionRates rates;
  for (const auto& [kind, c] : counts) {
    const double total = static_cast<double>(c[0] + c[1] + c[2]);
    DetectionRates::Row row;
    row.pairs = c[0] + c[1] + c[2];
    // percent rounding half-up to integers
    row.correct_pct = static_cast<int>(std::floor(100.0 * static_cast<double>(c[0]) / total + 0.5));
    row.incorrect_pct =
        static_cast<int>(std::floor(100.0 * static_cast<double>(c[1]) / total + 0.5));
    row.indeterminate_pct =
        static_cast<int>(std::floor(100.0 * static_cast<double>(c[2]) / total + 0.5));
    rates.by_kind[kind] = row;
  }
  return rates;
}

std::string rates_to_csv(const DetectionRates& rates) {
  std::ostringstream out;
  out << "kind,pairs,correct_pct,incorrect_pct,indeterminate_pct\n";
  for (const auto& [kind, row] : rates.by_kind) {
    out << kind << ',' << row.pairs << ',' << row.correct_pct << ',' << row.incorrect_pct << ','
        << row.indeterminate_pct << '\n';
  }
  return out.str();
}

}  // namespace scorelens::feedback
