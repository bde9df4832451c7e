#include "interventions.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "prompts.hpp"
#include "rng.hpp"

namespace scorelens::interventions {

using corpus::Essay;
using corpus::Sentence;
using corpus::Token;
using nlohmann::json;

const char* const kPromptVersion = "v1";

const char* to_string(Kind kind) {
  switch (kind) {
    case Kind::ErrorCorrection: return "ErrorCorrection";
    case Kind::SpellingErrors: return "SpellingErrors";
    case Kind::SvaErrors: return "SvaErrors";
    case Kind::WordOrderSwap: return "WordOrderSwap";
    case Kind::Complexification: return "Complexification";
    case Kind::Simplification: return "Simplification";
    case Kind::IntraParaShuffle: return "IntraParaShuffle";
    case Kind::InterTextShuffle: return "InterTextShuffle";
  }
  return "SpellingErrors";
}

Kind parse_kind(const std::string& name) {
  for (Kind k : all_kinds())
    if (name == to_string(k)) return k;
  throw ConfigError("unknown intervention kind '" + name + "'");
}

const std::vector<Kind>& all_kinds() {
  static const std::vector<Kind> kinds = {
      Kind::ErrorCorrection,  Kind::SpellingErrors,   Kind::SvaErrors,
      Kind::WordOrderSwap,    Kind::Complexification, Kind::Simplification,
      Kind::IntraParaShuffle, Kind::InterTextShuffle,
  };
  return kinds;
}

bool is_rewrite(Kind kind) {
  return kind == Kind::ErrorCorrection || kind == Kind::Complexification ||
         kind == Kind::Simplification;
}

bool is_rule_based(Kind kind) { return !is_rewrite(kind); }

std::size_t rate_count(double fraction, std::size_t pool) {
  if (pool == 0 || fraction <= 0.0) return 0;
  const auto rounded =
      static_cast<std::size_t>(std::floor(fraction * static_cast<double>(pool) + 0.5));
  return std::max<std::size_t>(1, rounded);
}

// ---------------------------------------------------------------------------
// rule tables

KeyboardAdjacency KeyboardAdjacency::builtin_qwerty() {
  KeyboardAdjacency k;
  static const std::pair<char, const char*> rows[] = {
      {'q', "wa"},    {'w', "qase"},   {'e', "wsdr"},  {'r', "edft"},  {'t', "rfgy"},
      {'y', "tghu"},  {'u', "yhji"},   {'i', "ujko"},  {'o', "iklp"},  {'p', "ol"},
      {'a', "qwsz"},  {'s', "awedxz"}, {'d', "serfcx"},{'f', "drtgvc"},{'g', "ftyhbv"},
      {'h', "gyujnb"},{'j', "huikmn"}, {'k', "jiolm"}, {'l', "kop"},   {'z', "asx"},
      {'x', "zsdc"},  {'c', "xdfv"},   {'v', "cfgb"},  {'b', "vghn"},  {'n', "bhjm"},
      {'m', "njk"},
  };
  for (const auto& [key, adj] : rows) k.table_[key] = adj;
  return k;
}

KeyboardAdjacency KeyboardAdjacency::load_tsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open keyboard table: " + path);
  KeyboardAdjacency k;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab != 1)
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected key<TAB>neighbours");
    k.table_[line[0]] = line.substr(tab + 1);
  }
  return k;
}

const std::string& KeyboardAdjacency::neighbours(char key) const {
  static const std::string empty;
  const auto it = table_.find(static_cast<char>(std::tolower(static_cast<unsigned char>(key))));
  return it == table_.end() ? empty : it->second;
}

SvaMorphology SvaMorphology::builtin() {
  SvaMorphology m;
  m.irregular_ = {
      {"is", "are"},   {"are", "is"},   {"was", "were"}, {"were", "was"},
      {"has", "have"}, {"have", "has"}, {"does", "do"},  {"do", "does"},
      {"am", "are"},
  };
  return m;
}

SvaMorphology SvaMorphology::load_tsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open SVA morphology table: " + path);
  SvaMorphology m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected form<TAB>flipped");
    m.irregular_[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return m;
}

bool SvaMorphology::is_irregular_form(const std::string& lower) const {
  return irregular_.count(lower) > 0;
}

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Restores the casing of `modeled` onto `value` (first-letter capitalization
// only; flipped verb forms are otherwise lowercase).
std::string match_case(const std::string& value, const std::string& modeled) {
  if (value.empty() || modeled.empty()) return value;
  std::string out = value;
  if (std::isupper(static_cast<unsigned char>(modeled[0])))
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

bool all_alpha(const std::string& s) {
  for (char c : s)
    if (!std::isalpha(static_cast<unsigned char>(c))) return false;
  return !s.empty();
}

// Looks like a 3rd-person-singular present form: ends in -s, not -ss/-us.
bool looks_3sg(const std::string& lower) {
  if (lower.size() < 3 || lower.back() != 's') return false;
  if (lower.size() >= 2 && (lower[lower.size() - 2] == 's' || lower[lower.size() - 2] == 'u'))
    return false;
  return all_alpha(lower);
}

std::string strip_3sg(const std::string& lower) {
  if (lower.size() > 3 && lower.compare(lower.size() - 3, 3, "ies") == 0)
    return lower.substr(0, lower.size() - 3) + "y";
  if (lower.size() > 2 && lower.compare(lower.size() - 2, 2, "es") == 0) {
    const std::string stem = lower.substr(0, lower.size() - 2);
    if (stem.size() >= 2) {
      const std::string tail2 = stem.substr(stem.size() - 2);
      if (tail2 == "ch" || tail2 == "sh") return stem;
    }
    if (!stem.empty()) {
      const char t = stem.back();
      if (t == 'x' || t == 'z' || t == 's' || t == 'o') return stem;
    }
  }
  return lower.substr(0, lower.size() - 1);
}

std::string attach_3sg(const std::string& lower) {
  if (lower.size() >= 2) {
    const char last = lower.back();
    const char prev = lower[lower.size() - 2];
    if (last == 'y' && !strchr("aeiou", prev)) return lower.substr(0, lower.size() - 1) + "ies";
    const std::string tail2 = lower.substr(lower.size() - 2);
    if (tail2 == "ch" || tail2 == "sh") return lower + "es";
    if (last == 'x' || last == 'z' || last == 's' || last == 'o') return lower + "es";
  }
  return lower + "s";
}

}  // namespace

std::optional<std::string> SvaMorphology::flip(const std::string& surface,
                                               bool allow_attach) const {
  const std::string lower = lowercase(surface);
  const auto it = irregular_.find(lower);
  if (it != irregular_.end()) return match_case(it->second, surface);
  if (looks_3sg(lower)) return match_case(strip_3sg(lower), surface);
  if (allow_attach && all_alpha(lower)) return match_case(attach_3sg(lower), surface);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// essay rebuilding

namespace {

// Rebuilds an essay after in-place token surface edits: identical structure,
// text spliced at the edited spans, all downstream offsets shifted. Edited
// tokens lose any stale lemma.
Essay rebuild_with_surfaces(const Essay& original,
                            const std::map<std::pair<std::size_t, std::size_t>, std::string>& edits) {
  Essay out = original;
  std::string text;
  text.reserve(original.text.size());
  std::size_t cursor = 0;
  for (std::size_t si = 0; si < out.sentences.size(); ++si) {
    for (std::size_t ti = 0; ti < out.sentences[si].tokens.size(); ++ti) {
      Token& tok = out.sentences[si].tokens[ti];
      text.append(original.text, cursor, tok.begin - cursor);
      cursor = tok.end;
      const auto it = edits.find({si, ti});
      if (it != edits.end() && it->second != tok.surface) {
        tok.surface = it->second;
        tok.lemma.reset();
      }
      tok.begin = text.size();
      text.append(tok.surface);
      tok.end = text.size();
    }
  }
  text.append(original.text, cursor, original.text.size() - cursor);
  out.text = std::move(text);
  return out;
}

// Rebuilds an essay with sentences permuted into slots: slot i receives
// sentence perm[i]. Inter-sentence gap text stays where it was; paragraph
// ranges are untouched (the permutation must respect the slot count).
Essay rebuild_with_permutation(const Essay& original, const std::vector<std::size_t>& perm) {
  Essay out = original;
  std::string text;
  text.reserve(original.text.size());
  std::size_t cursor = 0;
  for (std::size_t slot = 0; slot < perm.size(); ++slot) {
    const Sentence& old_here = original.sentences[slot];
    text.append(original.text, cursor, old_here.begin() - cursor);
    cursor = old_here.end();
    Sentence moved = original.sentences[perm[slot]];
    const std::size_t base = text.size();
    const std::size_t old_base = moved.begin();
    text.append(original.text, old_base, moved.end() - old_base);
    for (auto& tok : moved.tokens) {
      tok.begin = base + (tok.begin - old_base);
      tok.end = base + (tok.end - old_base);
    }
    out.sentences[slot] = std::move(moved);
  }
  text.append(original.text, cursor, original.text.size() - cursor);
  out.text = std::move(text);
  return out;
}

std::vector<std::size_t> word_token_indices(const Sentence& s) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < s.tokens.size(); ++i)
    if (s.tokens[i].is_word) idx.push_back(i);
  return idx;
}

// Sentences eligible for word-level perturbation, and the selection itself.
std::vector<std::size_t> select_sentences(const Essay& essay, double fraction, Rng& rng,
                                          std::size_t min_words,
                                          std::vector<std::string>* skipped) {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < essay.sentences.size(); ++i) {
    if (essay.sentences[i].word_count() >= min_words) {
      eligible.push_back(i);
    } else if (skipped) {
      skipped->push_back(std::to_string(i) + ": fewer than " + std::to_string(min_words) +
                         " word tokens");
    }
  }
  std::size_t want = rate_count(fraction, essay.sentences.size());
  if (want > eligible.size()) {
    if (skipped)
      skipped->push_back("selection clamped to " + std::to_string(eligible.size()) +
                         " eligible sentences");
    want = eligible.size();
  }
  const auto picks = rng.sample_indices(eligible.size(), want);
  std::vector<std::size_t> out;
  out.reserve(picks.size());
  for (auto p : picks) out.push_back(eligible[p]);
  return out;
}

enum class CorruptOp { substitute, transpose, erase, duplicate };

bool is_ascii_alnum(char c) {
  return static_cast<unsigned char>(c) < 0x80 && std::isalnum(static_cast<unsigned char>(c)) != 0;
}

// Corruption ops only touch ASCII alphanumerics so multi-byte sequences are
// never split.
std::vector<std::size_t> ascii_alnum_positions(const std::string& s) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (is_ascii_alnum(s[i])) out.push_back(i);
  return out;
}

std::vector<std::size_t> substitutable_positions(const std::string& s,
                                                 const KeyboardAdjacency& keymap) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (static_cast<unsigned char>(s[i]) < 0x80 && std::isalpha(static_cast<unsigned char>(s[i])) &&
        !keymap.neighbours(s[i]).empty())
      out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> transposable_positions(const std::string& s) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    if (is_ascii_alnum(s[i]) && is_ascii_alnum(s[i + 1]) && s[i] != s[i + 1]) out.push_back(i);
  return out;
}

bool op_feasible(CorruptOp op, const std::string& surface, const KeyboardAdjacency& keymap) {
  switch (op) {
    case CorruptOp::substitute:
      return !substitutable_positions(surface, keymap).empty();
    case CorruptOp::transpose:
      return !transposable_positions(surface).empty();
    case CorruptOp::erase:
      return surface.size() >= 2 && !ascii_alnum_positions(surface).empty();
    case CorruptOp::duplicate:
      return !ascii_alnum_positions(surface).empty();
  }
  return false;
}

// One character-level corruption. The op is drawn uniformly; infeasible draws
// fall forward through the fixed op order (duplication is always feasible).
std::string corrupt_surface(const std::string& surface, Rng& rng, const KeyboardAdjacency& keymap) {
  static const CorruptOp order[] = {CorruptOp::substitute, CorruptOp::transpose, CorruptOp::erase,
                                    CorruptOp::duplicate};
  std::size_t pick = static_cast<std::size_t>(rng.below(4));
  for (int tries = 0; tries < 4; ++tries, pick = (pick + 1) % 4) {
    const CorruptOp op = order[pick];
    if (!op_feasible(op, surface, keymap)) continue;
    switch (op) {
      case CorruptOp::substitute: {
        const auto spots = substitutable_positions(surface, keymap);
        const std::size_t at = spots[static_cast<std::size_t>(rng.below(spots.size()))];
        const std::string& adj = keymap.neighbours(surface[at]);
        char repl = adj[static_cast<std::size_t>(rng.below(adj.size()))];
        if (std::isupper(static_cast<unsigned char>(surface[at])))
          repl = static_cast<char>(std::toupper(static_cast<unsigned char>(repl)));
        std::string out = surface;
        out[at] = repl;
        return out;
      }
      case CorruptOp::transpose: {
        const auto spots = transposable_positions(surface);
        const std::size_t at = spots[static_cast<std::size_t>(rng.below(spots.size()))];
        std::string out = surface;
        std::swap(out[at], out[at + 1]);
        return out;
      }
      case CorruptOp::erase: {
        const auto spots = ascii_alnum_positions(surface);
        const std::size_t at = spots[static_cast<std::size_t>(rng.below(spots.size()))];
        std::string out = surface;
        out.erase(at, 1);
        return out;
      }
      case CorruptOp::duplicate: {
        const auto spots = ascii_alnum_positions(surface);
        const std::size_t at = spots[static_cast<std::size_t>(rng.below(spots.size()))];
        std::string out = surface;
        out.insert(at, 1, surface[at]);
        return out;
      }
    }
  }
  return surface;  // no ASCII material to corrupt; caller treats this as a skip
}

}  // namespace

CounterfactualRecord introduce_spelling_errors(const Essay& essay, const RuleParams& params,
                                               const KeyboardAdjacency& keymap) {
  if (essay.word_count() == 0)
    throw ValidationError("essay '" + essay.id + "' has no word tokens to misspell");
  CounterfactualRecord rec;
  rec.source_id = essay.id;
  rec.kind = Kind::SpellingErrors;
  rec.params = params;

  Rng rng(params.seed);
  const auto selected = select_sentences(essay, params.sentence_fraction, rng, 1, &rec.skipped);

  std::map<std::pair<std::size_t, std::size_t>, std::string> edits;
  for (const std::size_t si : selected) {
    const auto words = word_token_indices(essay.sentences[si]);
    // corruption needs ASCII material; the rate base stays the full word count
    std::vector<std::size_t> targetable;
    for (const auto wi : words)
      if (!ascii_alnum_positions(essay.sentences[si].tokens[wi].surface).empty())
        targetable.push_back(wi);
    std::size_t want = rate_count(params.word_fraction, words.size());
    if (want > targetable.size()) {
      rec.skipped.push_back(std::to_string(si) + ": corruption clamped to " +
                            std::to_string(targetable.size()) + " targetable tokens");
      want = targetable.size();
    }
    const auto picks = rng.sample_indices(targetable.size(), want);
    DiffEntry entry{si, "spelling", {}};
    for (const auto p : picks) {
      const std::size_t ti = targetable[p];
      const std::string& surface = essay.sentences[si].tokens[ti].surface;
      const std::string corrupted = corrupt_surface(surface, rng, keymap);
      if (corrupted == surface) continue;
      edits[{si, ti}] = corrupted;
      entry.tokens.push_back(ti);
    }
    if (!entry.tokens.empty()) rec.diff.push_back(std::move(entry));
  }
  rec.essay = rebuild_with_surfaces(essay, edits);
  if (rec.essay.text == essay.text) rec.diff.clear();
  return rec;
}

CounterfactualRecord introduce_sva_errors(const Essay& essay, const RuleParams& params,
                                          const SvaMorphology& morph) {
  CounterfactualRecord rec;
  rec.source_id = essay.id;
  rec.kind = Kind::SvaErrors;
  rec.params = params;

  Rng rng(params.seed);
  const auto selected = select_sentences(essay, params.sentence_fraction, rng, 0, &rec.skipped);

  std::map<std::pair<std::size_t, std::size_t>, std::string> edits;
  for (const std::size_t si : selected) {
    const Sentence& sent = essay.sentences[si];
    std::optional<std::size_t> verb;
    bool via_tree = false;
    if (sent.dep) {
      // first token that governs a subject relation
      const auto& heads = sent.dep->heads;
      const auto& labels = sent.dep->labels;
      for (std::size_t t = 0; t < sent.tokens.size() && !verb; ++t) {
        for (std::size_t d = 0; d < heads.size(); ++d) {
          if (heads[d] == static_cast<int>(t) + 1 &&
              (labels[d].rfind("nsubj", 0) == 0 || labels[d].rfind("csubj", 0) == 0)) {
            verb = t;
            via_tree = true;
            break;
          }
        }
      }
    }
    if (!verb) {
      // tag-free heuristic: first auxiliary, else first apparent 3sg form
      // (skipping the sentence-initial token, which is usually the subject)
      for (std::size_t t = 0; t < sent.tokens.size() && !verb; ++t) {
        if (!sent.tokens[t].is_word) continue;
        if (morph.is_irregular_form(lowercase(sent.tokens[t].surface))) verb = t;
      }
      if (!verb) {
        bool seen_word = false;
        for (std::size_t t = 0; t < sent.tokens.size() && !verb; ++t) {
          if (!sent.tokens[t].is_word) continue;
          if (!seen_word) {
            seen_word = true;
            continue;
          }
          if (looks_3sg(lowercase(sent.tokens[t].surface))) verb = t;
        }
      }
    }
    if (!verb) {
      rec.skipped.push_back(std::to_string(si) + ": no eligible verb");
      continue;
    }
    const auto flipped = morph.flip(sent.tokens[*verb].surface, via_tree);
    if (!flipped || *flipped == sent.tokens[*verb].surface) {
      rec.skipped.push_back(std::to_string(si) + ": verb form not flippable");
      continue;
    }
    edits[{si, *verb}] = *flipped;
    rec.diff.push_back({si, "sva", {*verb}});
  }
  rec.essay = rebuild_with_surfaces(essay, edits);
  if (rec.essay.text == essay.text) rec.diff.clear();
  return rec;
}

CounterfactualRecord swap_word_order(const Essay& essay, const RuleParams& params) {
  CounterfactualRecord rec;
  rec.source_id = essay.id;
  rec.kind = Kind::WordOrderSwap;
  rec.params = params;

  Rng rng(params.seed);
  const auto selected = select_sentences(essay, params.sentence_fraction, rng, 2, &rec.skipped);

  std::map<std::pair<std::size_t, std::size_t>, std::string> edits;
  for (const std::size_t si : selected) {
    const Sentence& sent = essay.sentences[si];
    const auto words = word_token_indices(sent);
    const std::size_t want = std::min(rate_count(params.word_fraction, words.size()), words.size());
    const auto picks = rng.sample_indices(words.size(), want);

    // current surface per word slot; swaps apply in ascending position order
    std::vector<std::string> surfaces;
    surfaces.reserve(words.size());
    for (const auto wi : words) surfaces.push_back(sent.tokens[wi].surface);
    // one diff entry per executed swap; swaps of identical surfaces are no-ops
    for (const auto p : picks) {
      const std::size_t q = (p + 1 < words.size()) ? p + 1 : p - 1;
      if (surfaces[p] != surfaces[q])
        rec.diff.push_back({si, "swap", {words[std::min(p, q)], words[std::max(p, q)]}});
      std::swap(surfaces[p], surfaces[q]);
    }
    for (std::size_t w = 0; w < words.size(); ++w) {
      if (surfaces[w] != sent.tokens[words[w]].surface) edits[{si, words[w]}] = surfaces[w];
    }
  }
  rec.essay = rebuild_with_surfaces(essay, edits);
  if (rec.essay.text == essay.text) rec.diff.clear();
  return rec;
}

namespace {

// Non-identity seeded permutation of [0, n); identity only possible at n < 2.
std::vector<std::size_t> nonidentity_permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  if (n < 2) return perm;
  const std::vector<std::size_t> identity = perm;
  do {
    rng.shuffle(perm);
  } while (perm == identity);
  return perm;
}

void add_move_entries(CounterfactualRecord& rec, const Essay& original,
                      const std::vector<std::size_t>& perm) {
  for (std::size_t slot = 0; slot < perm.size(); ++slot) {
    if (perm[slot] == slot) continue;
    // identical sentence text in the slot is not a visible change
    if (original.sentence_text(slot) == original.sentence_text(perm[slot])) continue;
    rec.diff.push_back({slot, "moved", {}});
  }
}

}  // namespace

CounterfactualRecord shuffle_intra_paragraph(const Essay& essay, std::uint64_t seed) {
  CounterfactualRecord rec;
  rec.source_id = essay.id;
  rec.kind = Kind::IntraParaShuffle;
  rec.params.seed = seed;

  std::vector<std::size_t> perm(essay.sentences.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  for (std::size_t pi = 0; pi < essay.paragraphs.size(); ++pi) {
    const auto [pb, pe] = essay.paragraphs[pi];
    const std::size_t n = pe - pb;
    if (n < 2) continue;
    Rng rng(derive_seed(seed, essay.id + "/para", static_cast<std::uint64_t>(pi)));
    const auto local = nonidentity_permutation(n, rng);
    for (std::size_t i = 0; i < n; ++i) perm[pb + i] = pb + local[i];
  }
  rec.essay = rebuild_with_permutation(essay, perm);
  add_move_entries(rec, essay, perm);
  if (rec.essay.text == essay.text) rec.diff.clear();
  return rec;
}

CounterfactualRecord shuffle_inter_text(const Essay& essay, std::uint64_t seed) {
  CounterfactualRecord rec;
  rec.source_id = essay.id;
  rec.kind = Kind::InterTextShuffle;
  rec.params.seed = seed;

  Rng rng(derive_seed(seed, essay.id + "/global"));
  const auto perm = nonidentity_permutation(essay.sentences.size(), rng);
  rec.essay = rebuild_with_permutation(essay, perm);
  add_move_entries(rec, essay, perm);
  if (rec.essay.text == essay.text) rec.diff.clear();
  return rec;
}

// ---------------------------------------------------------------------------
// rewrite requests

chat::ChatRequest build_rewrite_request(const Essay& essay, Kind kind) {
  return build_rewrite_request(essay.text, kind);
}

chat::ChatRequest build_rewrite_request(const std::string& essay_text, Kind kind) {
  if (essay_text.empty()) throw ValidationError("cannot build a rewrite request for empty text");
  if (!is_rewrite(kind))
    throw ValidationError(std::string("kind ") + to_string(kind) + " is not a rewrite kind");
  chat::ChatRequest req;
  req.messages.push_back({"system", prompts::kTutorSystem});
  req.messages.push_back({"user", prompts::render_rewrite(kind, essay_text)});
  return req;
}

std::string parse_rewrite_response(const std::string& payload) {
  json doc;
  try {
    doc = json::parse(payload);
  } catch (const json::exception& e) {
    throw ParseError(std::string("rewrite response is not valid JSON: ") + e.what() +
                     "; payload: " + payload);
  }
  if (!doc.is_object())
    throw ParseError("rewrite response is not a JSON object; payload: " + payload);
  if (!doc.contains("output_essay") || !doc["output_essay"].is_string())
    throw ParseError("rewrite response is missing string key 'output_essay'; payload: " + payload);
  return doc["output_essay"].get<std::string>();
}

std::vector<PlanStep> plan_complexity_chain(const corpus::Corpus& corpus,
                                            const std::vector<Kind>& kinds,
                                            const std::set<std::string>& cached_corrections) {
  bool wants_correction = false, wants_complexity = false;
  for (Kind k : kinds) {
    if (!is_rewrite(k))
      throw ValidationError(std::string("plan_complexity_chain: ") + to_string(k) +
                            " is not a rewrite kind");
    if (k == Kind::ErrorCorrection) wants_correction = true;
    if (k == Kind::Complexification || k == Kind::Simplification) wants_complexity = true;
  }
  std::vector<PlanStep> plan;
  if (wants_correction) {
    for (const auto& e : corpus.essays) {
      if (cached_corrections.count(e.id)) continue;
      plan.push_back({e.id, Kind::ErrorCorrection, std::nullopt});
    }
  }
  if (wants_complexity) {
    for (const auto& e : corpus.essays) {
      if (!wants_correction && !cached_corrections.count(e.id))
        throw ValidationError("essay '" + e.id +
                              "': complexity rewrite requested but no correction output is "
                              "available to feed it");
      for (Kind k : kinds) {
        if (k == Kind::Complexification || k == Kind::Simplification)
          plan.push_back({e.id, k, e.id});
      }
    }
  }
  return plan;
}

// ---------------------------------------------------------------------------
// persistence

void save_records(const std::vector<CounterfactualRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write records file: " + path);
  for (const auto& rec : records) {
    json j;
    j["source_id"] = rec.source_id;
    j["kind"] = to_string(rec.kind);
    if (is_rule_based(rec.kind)) {
      j["params"] = {{"sentence_fraction", rec.params.sentence_fraction},
                     {"word_fraction", rec.params.word_fraction},
                     {"seed", rec.params.seed}};
    } else {
      j["params"] = {{"prompt_version", rec.prompt_version.empty() ? kPromptVersion
                                                                   : rec.prompt_version}};
    }
    j["text"] = rec.essay.text;
    json diff = json::array();
    for (const auto& d : rec.diff)
      diff.push_back({{"sentence", d.sentence}, {"change", d.change}, {"tokens", d.tokens}});
    j["diff"] = std::move(diff);
    out << j.dump() << '\n';
  }
}

std::vector<LoadedRecord> load_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open records file: " + path);
  std::vector<LoadedRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": invalid JSON: " + e.what());
    }
    if (!j.contains("source_id") || !j.contains("kind") || !j.contains("text"))
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": record needs source_id, kind and text");
    LoadedRecord rec;
    rec.source_id = j["source_id"].get<std::string>();
    rec.kind = parse_kind(j["kind"].get<std::string>());
    rec.essay = corpus::make_essay(rec.source_id, j["text"].get<std::string>());
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace scorelens::interventions
