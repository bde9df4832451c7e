#include "scoring.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "error.hpp"
#include "prompts.hpp"

namespace scorelens::scoring {

using nlohmann::json;

DatasetKind parse_dataset_kind(const std::string& name) {
  if (name == "toefl_like") return DatasetKind::toefl_like;
  if (name == "ellipse_like") return DatasetKind::ellipse_like;
  throw ConfigError("unknown dataset kind '" + name + "'");
}

const char* to_string(DatasetKind kind) {
  return kind == DatasetKind::toefl_like ? "toefl_like" : "ellipse_like";
}

ScorerKind parse_scorer_kind(const std::string& name) {
  if (name == "llm_zero_shot") return ScorerKind::llm_zero_shot;
  if (name == "llm_few_shot") return ScorerKind::llm_few_shot;
  if (name == "http") return ScorerKind::http;
  if (name == "mock") return ScorerKind::mock;
  throw ConfigError("unknown scorer kind '" + name + "'");
}

const char* to_string(ScorerKind kind) {
  switch (kind) {
    case ScorerKind::llm_zero_shot: return "llm_zero_shot";
    case ScorerKind::llm_few_shot: return "llm_few_shot";
    case ScorerKind::http: return "http";
    case ScorerKind::mock: return "mock";
  }
  return "mock";
}

double ScoreRecord::numeric_value() const {
  if (normalized) return *normalized;
  if (normalized_level) return level_midpoint(*normalized_level);
  throw ValidationError("score record for '" + essay_id + "' has no normalized value");
}

namespace {

std::string format_score_label(double score) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.1f", score);
  return buf;
}

const Exemplar& exemplar_of(const ScorerSpec& spec, Level level) {
  for (const auto& e : spec.exemplars)
    if (e.level == level) return e;
  throw ValidationError("scorer '" + spec.id + "': missing exemplar for level " +
                        to_string(level));
}

}  // namespace

chat::ChatRequest build_score_prompt(const corpus::Essay& essay,
                                     const std::optional<std::string>& prompt_text,
                                     const ScorerSpec& spec, DatasetKind dataset) {
  const bool few_shot = spec.kind == ScorerKind::llm_few_shot;
  if (few_shot && spec.exemplars.size() != 3)
    throw ValidationError("scorer '" + spec.id + "': few-shot prompts need exactly 3 exemplars, " +
                          std::to_string(spec.exemplars.size()) + " given");
  if (dataset == DatasetKind::toefl_like && !prompt_text)
    throw ValidationError("essay '" + essay.id + "': TOEFL-style prompts need the essay prompt text");

  const std::string rubric =
      !spec.rubric.empty() ? spec.rubric
      : dataset == DatasetKind::toefl_like ? prompts::kToeflRubrics : prompts::kEllipseRubrics;

  chat::ChatRequest req;
  req.model = spec.model;
  req.messages.push_back({"system", dataset == DatasetKind::toefl_like
                                        ? prompts::kToeflRaterSystem
                                        : prompts::kEllipseRaterSystem});
  std::string user;
  if (dataset == DatasetKind::toefl_like) {
    if (few_shot) {
      const auto& high = exemplar_of(spec, Level::High);
      const auto& medium = exemplar_of(spec, Level::Medium);
      const auto& low = exemplar_of(spec, Level::Low);
      user = prompts::render_score_few_toefl(
          *prompt_text, {high.text, "High"}, {medium.text, "Medium"}, {low.text, "Low"},
          essay.text, rubric);
    } else {
      user = prompts::render_score_zero_toefl(*prompt_text, essay.text, rubric);
    }
  } else {
    if (few_shot) {
      const auto& high = exemplar_of(spec, Level::High);
      const auto& medium = exemplar_of(spec, Level::Medium);
      const auto& low = exemplar_of(spec, Level::Low);
      for (const auto* e : {&high, &medium, &low})
        if (!e->score)
          throw ValidationError("scorer '" + spec.id +
                                "': numeric few-shot exemplars need gold scores");
      user = prompts::render_score_few_ellipse({high.text, format_score_label(*high.score)},
                                               {medium.text, format_score_label(*medium.score)},
                                               {low.text, format_score_label(*low.score)},
                                               essay.text, rubric);
    } else {
      user = prompts::render_score_zero_ellipse(essay.text, rubric);
    }
  }
  req.messages.push_back({"user", std::move(user)});
  return req;
}

RawScore parse_score_response(const std::string& payload, bool expect_level) {
  json doc;
  try {
    doc = json::parse(payload);
  } catch (const json::exception& e) {
    throw ParseError(std::string("score response is not valid JSON: ") + e.what() +
                     "; payload: " + payload);
  }
  if (!doc.is_object()) throw ParseError("score response is not a JSON object; payload: " + payload);
  RawScore raw;
  if (expect_level) {
    if (!doc.contains("score_level") || !doc["score_level"].is_string())
      throw ParseError("score response is missing string key 'score_level'; payload: " + payload);
    raw.level = parse_level(doc["score_level"].get<std::string>());
    return raw;
  }
  if (!doc.contains("score"))
    throw ParseError("score response is missing key 'score'; payload: " + payload);
  double value;
  if (doc["score"].is_number()) {
    value = doc["score"].get<double>();
  } else {
    throw ParseError("score response key 'score' is not numeric; payload: " + payload);
  }
  if (!(value >= 1.0 && value <= 5.0))
    throw ParseError("score " + std::to_string(value) + " outside [1, 5]; payload: " + payload);
  raw.number = value;
  return raw;
}

// ---------------------------------------------------------------------------
// scorers

namespace {

class LlmScorer final : public Scorer {
 public:
  LlmScorer(ScorerSpec spec, DatasetKind dataset, chat::Transport& transport)
      : spec_(std::move(spec)), dataset_(dataset), transport_(transport) {}

  RawScore score(const corpus::Essay& essay,
                 const std::optional<std::string>& prompt_text) override {
    chat::ChatRequest req = build_score_prompt(essay, prompt_text, spec_, dataset_);
    std::string payload = transport_.complete(req);
    for (int attempt = 0;; ++attempt) {
      try {
        return parse_score_response(payload, level_scale());
      } catch (const ParseError& e) {
        if (attempt >= 2) throw;
        // reminder line sits outside the template; flagged via the request body
        req.messages.back().content += "\n\nRespond with valid JSON only.";
        payload = transport_.complete(req);
      }
    }
  }

  bool level_scale() const override { return spec_.level_scale(dataset_); }

 private:
  ScorerSpec spec_;
  DatasetKind dataset_;
  chat::Transport& transport_;
};

class HttpScorer final : public Scorer {
 public:
  HttpScorer(ScorerSpec spec, int retries, int timeout_seconds)
      : spec_(std::move(spec)), retries_(retries), timeout_(timeout_seconds) {
    if (spec_.endpoint.empty())
      throw ConfigError("scorer '" + spec_.id + "': http scorer needs an endpoint");
  }

  RawScore score(const corpus::Essay& essay, const std::optional<std::string>&) override {
    const std::string body = json{{"text", essay.text}}.dump();
    std::string last_error;
    for (int attempt = 0; attempt <= retries_; ++attempt) {
      httplib::Client client(spec_.endpoint);
      client.set_connection_timeout(timeout_);
      client.set_read_timeout(timeout_);
      auto res = client.Post("/", body, "application/json");
      if (!res) {
        last_error = "transport failure: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status < 200 || res->status >= 300) {
        last_error = "scorer endpoint returned status " + std::to_string(res->status);
        continue;
      }
      json doc;
      try {
        doc = json::parse(res->body);
      } catch (const json::exception& e) {
        throw ParseError(std::string("http scorer response is not JSON: ") + e.what());
      }
      if (!doc.contains("score") || !doc["score"].is_number())
        throw ParseError("http scorer response has no numeric 'score': " + res->body.substr(0, 200));
      RawScore raw;
      raw.number = doc["score"].get<double>();
      return raw;
    }
    throw TransportError(last_error + " (after " + std::to_string(retries_ + 1) + " attempts)");
  }

 private:
  ScorerSpec spec_;
  int retries_;
  int timeout_;
};

// Offline writing-error estimator behind the error_penalty mock: counts
// out-of-lexicon words, subject/auxiliary agreement violations and (when
// class tables are supplied) implausible word-class bigrams.
class PatternChecker {
 public:
  PatternChecker(const MockConfig& cfg) {
    if (!cfg.lexicon_path.empty())
      lexicon_ = metrics::FrequencyLexicon::load_tsv(cfg.lexicon_path);
    if (!cfg.word_classes_path.empty()) load_classes(cfg.word_classes_path);
    if (!cfg.class_successors_path.empty()) load_successors(cfg.class_successors_path);
  }

  std::size_t count_errors(const corpus::Essay& essay) const {
    std::size_t errors = 0;
    for (const auto& sent : essay.sentences) {
      std::vector<const corpus::Token*> words;
      for (const auto& t : sent.tokens)
        if (t.is_word) words.push_back(&t);
      for (std::size_t i = 0; i < words.size(); ++i) {
        const std::string w = lower(words[i]->surface);
        if (!lexicon_.empty() && !lexicon_.contains(metrics::lemmatize(w)) &&
            !lexicon_.contains(w))
          ++errors;
        if (i + 1 < words.size()) {
          const std::string next = lower(words[i + 1]->surface);
          if (agreement_violation(w, next)) ++errors;
          if (!classes_.empty() && !successors_.empty() && bigram_violation(w, next)) ++errors;
        }
      }
    }
    return errors;
  }

 private:
  static std::string lower(const std::string& s) {
    std::string out = s;
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  }

  static bool agreement_violation(const std::string& subject, const std::string& verb) {
    static const std::set<std::string> aux = {"is",   "are", "was", "were", "has",
                                              "have", "does", "do",  "am"};
    if (aux.count(verb) == 0) return false;
    static const std::set<std::string> third_sg = {"he", "she", "it"};
    static const std::set<std::string> plural = {"they", "we", "you"};
    if (third_sg.count(subject))
      return verb == "are" || verb == "were" || verb == "have" || verb == "do" || verb == "am";
    if (plural.count(subject))
      return verb == "is" || verb == "was" || verb == "has" || verb == "does" || verb == "am";
    if (subject == "i")
      return verb == "is" || verb == "has" || verb == "does" || verb == "are";
    return false;
  }

  bool bigram_violation(const std::string& a, const std::string& b) const {
    const auto ca = classes_.find(a);
    const auto cb = classes_.find(b);
    if (ca == classes_.end() || cb == classes_.end()) return false;
    const auto rule = successors_.find(ca->second);
    if (rule == successors_.end()) return false;
    return rule->second.count(cb->second) == 0;
  }

  void load_classes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open word-class table: " + path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos) throw ParseError(path + ": expected word<TAB>class");
      classes_[lower(line.substr(0, tab))] = line.substr(tab + 1);
    }
  }

  void load_successors(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open class-successor table: " + path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos) throw ParseError(path + ": expected class<TAB>successors");
      std::set<std::string> nexts;
      std::string rest = line.substr(tab + 1);
      std::size_t start = 0;
      while (start <= rest.size()) {
        const auto comma = rest.find(',', start);
        const std::string item = rest.substr(start, comma == std::string::npos ? std::string::npos
                                                                               : comma - start);
        if (!item.empty()) nexts.insert(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      successors_[line.substr(0, tab)] = std::move(nexts);
    }
  }

  metrics::FrequencyLexicon lexicon_;
  std::map<std::string, std::string> classes_;
  std::map<std::string, std::set<std::string>> successors_;
};

class MockScorer final : public Scorer {
 public:
  explicit MockScorer(ScorerSpec spec) : spec_(std::move(spec)) {
    const std::string& flavor = spec_.mock.flavor;
    if (flavor == "error_penalty") {
      checker_ = std::make_unique<PatternChecker>(spec_.mock);
    } else if (flavor != "word_count" && flavor != "constant") {
      throw ConfigError("scorer '" + spec_.id + "': unknown mock flavor '" + flavor + "'");
    }
  }

  RawScore score(const corpus::Essay& essay, const std::optional<std::string>&) override {
    RawScore raw;
    if (spec_.mock.flavor == "constant") {
      raw.number = spec_.mock.constant_value;
    } else if (spec_.mock.flavor == "word_count") {
      raw.number = std::min(
          5.0, 1.0 + static_cast<double>(essay.word_count()) / spec_.mock.words_per_point);
    } else {
      const double words = std::max<std::size_t>(1, essay.word_count());
      const double rate = static_cast<double>(checker_->count_errors(essay)) / words;
      raw.number = std::max(1.0, std::min(5.0, 5.0 - spec_.mock.alpha * rate));
    }
    return raw;
  }

 private:
  ScorerSpec spec_;
  std::unique_ptr<PatternChecker> checker_;
};

}  // namespace

std::unique_ptr<Scorer> make_llm_scorer(const ScorerSpec& spec, DatasetKind dataset,
                                        chat::Transport& transport) {
  return std::make_unique<LlmScorer>(spec, dataset, transport);
}

std::unique_ptr<Scorer> make_http_scorer(const ScorerSpec& spec, int retries, int timeout_seconds) {
  return std::make_unique<HttpScorer>(spec, retries, timeout_seconds);
}

std::unique_ptr<Scorer> make_mock_scorer(const ScorerSpec& spec) {
  return std::make_unique<MockScorer>(spec);
}

BatchResult score_batch(std::span<const corpus::Essay> essays, const std::string& variant,
                        const ScorerSpec& spec, Scorer& scorer,
                        const std::function<std::optional<std::string>(const corpus::Essay&)>&
                            prompt_of,
                        int parallelism) {
  struct Slot {
    std::optional<ScoreRecord> record;
    std::optional<std::string> error;
  };
  std::vector<Slot> slots(essays.size());
  std::atomic<std::size_t> cursor{0};

  auto work = [&] {
    while (true) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= essays.size()) break;
      const auto& essay = essays[i];
      try {
        const auto prompt = prompt_of ? prompt_of(essay) : std::nullopt;
        const RawScore raw = scorer.score(essay, prompt);
        ScoreRecord rec;
        rec.scorer_id = spec.id;
        rec.essay_id = essay.id;
        rec.variant = variant;
        rec.raw = raw;
        if (raw.level) {
          rec.normalized_level = raw.level;
        } else if (raw.number) {
          rec.normalized = normalize_score(*raw.number);
        } else {
          throw ValidationError("scorer returned neither a number nor a level");
        }
        slots[i].record = std::move(rec);
      } catch (const std::exception& e) {
        slots[i].error = e.what();
      }
    }
  };

  const int workers = std::max(1, parallelism);
  if (workers == 1 || essays.size() <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  BatchResult out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].record) {
      out.records.push_back(std::move(*slots[i].record));
    } else {
      out.gaps.push_back({essays[i].id, slots[i].error.value_or("unknown failure")});
    }
  }
  return out;
}

void save_score_records(const std::vector<ScoreRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write score records: " + path);
  for (const auto& r : records) {
    json j;
    j["scorer_id"] = r.scorer_id;
    j["essay_id"] = r.essay_id;
    j["variant"] = r.variant;
    if (r.raw.number) j["raw"] = *r.raw.number;
    if (r.raw.level) j["raw"] = to_string(*r.raw.level);
    if (r.normalized) j["normalized"] = *r.normalized;
    if (r.normalized_level) j["normalized"] = to_string(*r.normalized_level);
    out << j.dump() << '\n';
  }
}

std::vector<ScoreRecord> load_score_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open score records: " + path);
  std::vector<ScoreRecord> out;
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
    ScoreRecord r;
    r.scorer_id = j.at("scorer_id").get<std::string>();
    r.essay_id = j.at("essay_id").get<std::string>();
    r.variant = j.at("variant").get<std::string>();
    if (j.contains("raw")) {
      if (j["raw"].is_number()) r.raw.number = j["raw"].get<double>();
      if (j["raw"].is_string()) r.raw.level = parse_level(j["raw"].get<std::string>());
    }
    if (j.contains("normalized")) {
      if (j["normalized"].is_number()) r.normalized = j["normalized"].get<double>();
      if (j["normalized"].is_string())
        r.normalized_level = parse_level(j["normalized"].get<std::string>());
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace scorelens::scoring
