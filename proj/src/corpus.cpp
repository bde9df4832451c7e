#include "corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "rng.hpp"

namespace scorelens::corpus {

using nlohmann::json;

namespace scoring = scorelens::scoring;

std::size_t Essay::word_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.word_count();
  return n;
}

std::string_view Essay::sentence_text(std::size_t sentence_index) const {
  const Sentence& s = sentences.at(sentence_index);
  return std::string_view(text).substr(s.begin(), s.end() - s.begin());
}

const Essay* Corpus::find(const std::string& id) const {
  for (const auto& e : essays)
    if (e.id == id) return &e;
  return nullptr;
}

Essay make_essay(std::string id, std::string text, std::optional<std::string> prompt_id,
                 std::optional<GoldLabel> gold) {
  Essay e;
  e.id = std::move(id);
  e.text = std::move(text);
  e.prompt_id = std::move(prompt_id);
  e.gold = std::move(gold);
  Segmented seg = segment(e.text);
  e.paragraphs = std::move(seg.paragraphs);
  e.sentences = std::move(seg.sentences);
  return e;
}

namespace {

GoldLabel parse_gold(const json& rec, const std::string& id) {
  GoldLabel g;
  if (rec.contains("score") && !rec["score"].is_null()) {
    if (!rec["score"].is_number())
      throw ParseError("essay '" + id + "': score must be numeric");
    g.numeric = rec["score"].get<double>();
  }
  if (rec.contains("level") && !rec["level"].is_null()) {
    if (!rec["level"].is_string())
      throw ParseError("essay '" + id + "': level must be a string");
    g.level = scoring::parse_level(rec["level"].get<std::string>());
  }
  if (g.numeric && g.level) {
    const auto derived = scoring::level_of(scoring::normalize_score(*g.numeric));
    if (derived != *g.level)
      throw ValidationError("essay '" + id + "': level '" + scoring::to_string(*g.level) +
                            "' inconsistent with score " + std::to_string(*g.numeric));
  }
  return g;
}

}  // namespace

Corpus load_corpus(const std::string& path, std::string name, Split split) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file: " + path);
  Corpus corpus;
  corpus.name = name.empty() ? path : std::move(name);
  corpus.split = split;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": invalid JSON: " + e.what());
    }
    if (!rec.is_object() || !rec.contains("id") || !rec.contains("text") ||
        !rec["id"].is_string() || !rec["text"].is_string())
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": record must be an object with string 'id' and 'text'");
    std::string id = rec["id"].get<std::string>();
    if (!seen.insert(id).second)
      throw ValidationError(path + ":" + std::to_string(lineno) + ": duplicate essay id '" + id + "'");
    std::optional<std::string> prompt_id;
    if (rec.contains("prompt_id") && rec["prompt_id"].is_string())
      prompt_id = rec["prompt_id"].get<std::string>();
    GoldLabel gold = parse_gold(rec, id);
    std::optional<GoldLabel> gold_opt;
    if (gold.numeric || gold.level) gold_opt = gold;
    corpus.essays.push_back(
        make_essay(std::move(id), rec["text"].get<std::string>(), std::move(prompt_id), gold_opt));
  }
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write corpus file: " + path);
  for (const auto& e : corpus.essays) {
    json rec;
    rec["id"] = e.id;
    if (e.prompt_id) rec["prompt_id"] = *e.prompt_id;
    rec["text"] = e.text;
    if (e.gold) {
      if (e.gold->numeric) rec["score"] = *e.gold->numeric;
      if (e.gold->level) rec["level"] = scoring::to_string(*e.gold->level);
    }
    out << rec.dump() << '\n';
  }
}

std::string gold_stratum(const Essay& essay) {
  if (essay.gold) {
    if (essay.gold->level) return scoring::to_string(*essay.gold->level);
    if (essay.gold->numeric)
      return scoring::to_string(scoring::level_of(scoring::normalize_score(*essay.gold->numeric)));
  }
  throw ValidationError("essay '" + essay.id + "' has no gold label to stratify on");
}

Corpus stratified_subset(const Corpus& corpus, std::size_t n,
                         const std::function<std::string(const Essay&)>& strata_of,
                         std::uint64_t seed) {
  if (n > corpus.essays.size())
    throw ValidationError("subset size exceeds corpus size");

  // stable bucket per stratum, in first-seen order for reproducible tie-breaks
  std::vector<std::string> stratum_order;
  std::map<std::string, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < corpus.essays.size(); ++i) {
    const std::string label = strata_of(corpus.essays[i]);
    auto [it, inserted] = buckets.try_emplace(label);
    if (inserted) stratum_order.push_back(label);
    it->second.push_back(i);
  }
  std::sort(stratum_order.begin(), stratum_order.end());

  const double total = static_cast<double>(corpus.essays.size());
  struct Quota {
    std::string label;
    std::size_t base;
    double remainder;
  };
  std::vector<Quota> quotas;
  std::size_t assigned = 0;
  for (const auto& label : stratum_order) {
    const double exact = static_cast<double>(n) * static_cast<double>(buckets[label].size()) / total;
    const auto base = static_cast<std::size_t>(exact);
    quotas.push_back({label, base, exact - static_cast<double>(base)});
    assigned += base;
  }
  // largest remainder first; ties resolved by label order
  std::vector<std::size_t> order(quotas.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return quotas[a].remainder > quotas[b].remainder;
  });
  for (std::size_t i = 0; assigned < n; ++i) {
    auto& q = quotas[order[i % order.size()]];
    if (q.base < buckets[q.label].size()) {
      ++q.base;
      ++assigned;
    }
  }

  std::vector<std::size_t> chosen;
  for (const auto& q : quotas) {
    auto& pool = buckets[q.label];
    Rng rng(derive_seed(seed, "stratified_subset", q.label));
    const auto picks = rng.sample_indices(pool.size(), q.base);
    for (auto p : picks) chosen.push_back(pool[p]);
  }
  std::sort(chosen.begin(), chosen.end());

  Corpus out;
  out.name = corpus.name;
  out.split = corpus.split;
  out.essays.reserve(chosen.size());
  for (auto i : chosen) out.essays.push_back(corpus.essays[i]);
  return out;
}

}  // namespace scorelens::corpus
