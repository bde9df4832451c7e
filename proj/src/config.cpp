#include "config.hpp"

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "interventions.hpp"

namespace scorelens::pipeline {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string opt_string(const json& j, const char* key, std::string fallback = {}) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  if (!j[key].is_string()) throw ConfigError(std::string("config key '") + key + "' must be a string");
  return j[key].get<std::string>();
}

scoring::ScorerSpec parse_scorer(const json& j) {
  scoring::ScorerSpec spec;
  spec.id = opt_string(j, "id");
  if (spec.id.empty()) throw ConfigError("scorer entries need an 'id'");
  spec.kind = scoring::parse_scorer_kind(opt_string(j, "kind", "mock"));
  spec.model = opt_string(j, "model");
  spec.rubric = opt_string(j, "rubric");
  spec.endpoint = opt_string(j, "endpoint");
  if (j.contains("mock") && j["mock"].is_object()) {
    const auto& m = j["mock"];
    spec.mock.flavor = opt_string(m, "flavor");
    spec.mock.constant_value = m.value("constant_value", spec.mock.constant_value);
    spec.mock.words_per_point = m.value("words_per_point", spec.mock.words_per_point);
    spec.mock.alpha = m.value("alpha", spec.mock.alpha);
    spec.mock.lexicon_path = opt_string(m, "lexicon");
    spec.mock.word_classes_path = opt_string(m, "word_classes");
    spec.mock.class_successors_path = opt_string(m, "class_successors");
  } else if (j.contains("mock") && j["mock"].is_string()) {
    spec.mock.flavor = j["mock"].get<std::string>();
  }
  if (spec.kind == scoring::ScorerKind::mock && spec.mock.flavor.empty())
    throw ConfigError("scorer '" + spec.id + "': mock scorers need a mock flavor");
  return spec;
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }

  RunConfig cfg;
  if (!j.contains("seed") || !j["seed"].is_number())
    throw ConfigError(path + ": a numeric master 'seed' is required");
  cfg.seed = j["seed"].get<std::uint64_t>();
  cfg.out_dir = opt_string(j, "out_dir", cfg.out_dir);
  cfg.cache_dir = opt_string(j, "cache_dir", cfg.cache_dir);
  cfg.dataset_kind = scoring::parse_dataset_kind(opt_string(j, "dataset_kind", "ellipse_like"));

  if (j.contains("corpus")) {
    const auto& c = j["corpus"];
    cfg.corpus_test = opt_string(c, "test");
    cfg.corpus_train = opt_string(c, "train");
    cfg.conllu = opt_string(c, "conllu");
    cfg.prompts_path = opt_string(c, "prompts");
  }
  cfg.lexicon = opt_string(j, "lexicon");

  if (j.contains("grammar")) {
    const auto& g = j["grammar"];
    cfg.grammar.endpoint = opt_string(g, "endpoint");
    cfg.grammar.retries = g.value("retries", cfg.grammar.retries);
    cfg.grammar.parallelism = g.value("parallelism", cfg.grammar.parallelism);
  }
  if (j.contains("chat")) {
    const auto& c = j["chat"];
    cfg.chat.endpoint = opt_string(c, "endpoint");
    cfg.chat.model = opt_string(c, "model");
    cfg.chat.api_key_env = opt_string(c, "api_key_env", cfg.chat.api_key_env);
    cfg.chat.retries = c.value("retries", cfg.chat.retries);
  }
  if (j.contains("interventions")) {
    const auto& iv = j["interventions"];
    if (iv.contains("kinds")) {
      for (const auto& k : iv["kinds"]) cfg.interventions.kinds.push_back(k.get<std::string>());
    }
    cfg.interventions.sentence_fraction =
        iv.value("sentence_fraction", cfg.interventions.sentence_fraction);
    cfg.interventions.word_fraction = iv.value("word_fraction", cfg.interventions.word_fraction);
    cfg.interventions.keyboard_table = opt_string(iv, "keyboard_table");
    cfg.interventions.sva_table = opt_string(iv, "sva_table");
  }
  if (j.contains("scorers")) {
    for (const auto& s : j["scorers"]) cfg.scorers.push_back(parse_scorer(s));
  }
  cfg.exemplars_path = opt_string(j, "exemplars");
  if (j.contains("bootstrap")) {
    const auto& b = j["bootstrap"];
    cfg.bootstrap.iterations = b.value("iterations", cfg.bootstrap.iterations);
    cfg.bootstrap.level = b.value("level", cfg.bootstrap.level);
    cfg.bootstrap.threads = b.value("threads", cfg.bootstrap.threads);
  }
  if (j.contains("feedback")) {
    const auto& f = j["feedback"];
    cfg.feedback.scorer = opt_string(f, "scorer");
    cfg.feedback.annotations = opt_string(f, "annotations");
  }
  cfg.parallelism = j.value("parallelism", cfg.parallelism);
  cfg.emit_latex = j.value("emit_latex", cfg.emit_latex);

  cfg.validate();
  return cfg;
}

void RunConfig::validate() const {
  auto must_exist = [](const std::string& p, const char* what) {
    if (!p.empty() && !fs::exists(p))
      throw ConfigError(std::string(what) + " path does not exist: " + p);
  };
  must_exist(corpus_test, "corpus.test");
  must_exist(corpus_train, "corpus.train");
  must_exist(conllu, "corpus.conllu");
  must_exist(prompts_path, "corpus.prompts");
  must_exist(lexicon, "lexicon");
  must_exist(interventions.keyboard_table, "interventions.keyboard_table");
  must_exist(interventions.sva_table, "interventions.sva_table");
  for (const auto& name : interventions.kinds)
    interventions::parse_kind(name);  // throws on unknown names
  for (const auto& spec : scorers) {
    if ((spec.kind == scoring::ScorerKind::llm_zero_shot ||
         spec.kind == scoring::ScorerKind::llm_few_shot)) {
      // endpoint checked at stage time so offline stages still run
      if (spec.id.empty()) throw ConfigError("llm scorer without id");
    }
    must_exist(spec.mock.lexicon_path, "mock.lexicon");
    must_exist(spec.mock.word_classes_path, "mock.word_classes");
    must_exist(spec.mock.class_successors_path, "mock.class_successors");
  }
  if (bootstrap.iterations < 1) throw ConfigError("bootstrap.iterations must be >= 1");
  if (!(bootstrap.level > 0.0 && bootstrap.level < 1.0))
    throw ConfigError("bootstrap.level must be in (0, 1)");
}

void apply_override(RunConfig& config, const std::string& key, const std::string& value) {
  if (key == "seed") {
    try {
      config.seed = std::stoull(value);
    } catch (const std::exception&) {
      throw ConfigError("override seed '" + value + "' is not an integer");
    }
  } else if (key == "out") {
    config.out_dir = value;
  } else if (key == "cache") {
    config.cache_dir = value;
  } else {
    throw ConfigError("unknown override '" + key + "' (expected seed, out or cache)");
  }
}

}  // namespace scorelens::pipeline
