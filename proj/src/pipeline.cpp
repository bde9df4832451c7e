#include "pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "analysis.hpp"
#include "error.hpp"
#include "feedback.hpp"
#include "fewshot.hpp"
#include "grammar_client.hpp"
#include "interventions.hpp"
#include "metrics.hpp"
#include "rng.hpp"
#include "validity.hpp"

namespace scorelens::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;
namespace iv = scorelens::interventions;

namespace {

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
}

corpus::Corpus load_test_corpus(const RunConfig& config) {
  if (config.corpus_test.empty()) throw ConfigError("corpus.test is not configured");
  corpus::Corpus c = corpus::load_corpus(config.corpus_test);
  if (!config.conllu.empty()) {
    auto attached = corpus::attach_conllu(c, config.conllu);
    c = std::move(attached.corpus);
  }
  return c;
}

std::map<std::string, std::string> load_prompt_texts(const RunConfig& config) {
  std::map<std::string, std::string> prompts;
  if (config.prompts_path.empty()) return prompts;
  std::ifstream in(config.prompts_path, std::ios::binary);
  if (!in) throw IoError("cannot open prompts file: " + config.prompts_path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(config.prompts_path + ": invalid JSON: " + e.what());
  }
  for (const auto& [key, value] : j.items()) prompts[key] = value.get<std::string>();
  return prompts;
}

fs::path cf_path(const RunConfig& config, iv::Kind kind) {
  return fs::path(config.out_dir) / (std::string("cf_") + iv::to_string(kind) + ".jsonl");
}

fs::path scores_path(const RunConfig& config, const std::string& scorer_id,
                     const std::string& variant) {
  return fs::path(config.out_dir) / ("scores_" + scorer_id + "_" + variant + ".jsonl");
}

std::vector<iv::Kind> configured_kinds(const RunConfig& config) {
  std::vector<iv::Kind> kinds;
  for (const auto& name : config.interventions.kinds) kinds.push_back(iv::parse_kind(name));
  if (kinds.empty()) kinds = iv::all_kinds();
  return kinds;
}

// Rewrite execution shared by cmd_perturb. Returns output text per essay id.
std::map<std::string, std::string> run_rewrites(const corpus::Corpus& corpus,
                                                const std::vector<iv::Kind>& kinds,
                                                const RunConfig& config, const Env& env,
                                                std::map<std::string, std::string>& corrections) {
  std::unique_ptr<chat::Transport> http;
  chat::Transport* base = env.chat_transport;
  if (base == nullptr) {
    if (config.chat.endpoint.empty())
      throw ConfigError("rewrite interventions need chat.endpoint (or an injected transport)");
    chat::HttpChatConfig hc;
    hc.endpoint = config.chat.endpoint;
    hc.api_key_env = config.chat.api_key_env;
    hc.retries = config.chat.retries;
    http = std::make_unique<chat::HttpChatTransport>(hc);
    base = http.get();
  }
  chat::CachingTransport transport(*base, config.cache_dir, "rewrite");

  std::set<std::string> cached_corrections;
  for (const auto& essay : corpus.essays) {
    auto req = iv::build_rewrite_request(essay, iv::Kind::ErrorCorrection);
    req.model = config.chat.model;
    if (auto hit = transport.cached(req)) {
      corrections[essay.id] = iv::parse_rewrite_response(*hit);
      cached_corrections.insert(essay.id);
    }
  }

  const auto plan = iv::plan_complexity_chain(corpus, kinds, cached_corrections);
  std::map<std::string, std::string> outputs;  // "<kind>/<essay id>" -> text
  for (const auto& step : plan) {
    const corpus::Essay* essay = corpus.find(step.essay_id);
    if (essay == nullptr) throw ValidationError("plan references unknown essay " + step.essay_id);
    std::string input_text;
    if (step.input_from) {
      const auto it = corrections.find(*step.input_from);
      if (it == corrections.end())
        throw ValidationError("essay '" + step.essay_id +
                              "': correction output missing for complexity rewrite");
      input_text = it->second;
    } else {
      input_text = essay->text;
    }
    auto req = iv::build_rewrite_request(input_text, step.kind);
    req.model = config.chat.model;
    const std::string output = iv::parse_rewrite_response(transport.complete(req));
    if (step.kind == iv::Kind::ErrorCorrection) corrections[step.essay_id] = output;
    outputs[std::string(iv::to_string(step.kind)) + "/" + step.essay_id] = output;
  }
  // corrections already cached still count as outputs
  if (std::find(kinds.begin(), kinds.end(), iv::Kind::ErrorCorrection) != kinds.end()) {
    for (const auto& [id, text] : corrections)
      outputs.try_emplace(std::string("ErrorCorrection/") + id, text);
  }
  return outputs;
}

metrics::FrequencyLexicon require_lexicon(const RunConfig& config) {
  if (config.lexicon.empty()) throw ConfigError("this stage needs a 'lexicon' path in the config");
  return metrics::FrequencyLexicon::load_tsv(config.lexicon);
}

}  // namespace

std::string cmd_perturb(const RunConfig& config, const Env& env) {
  const corpus::Corpus corpus = load_test_corpus(config);
  const auto kinds = configured_kinds(config);

  const iv::KeyboardAdjacency keymap =
      config.interventions.keyboard_table.empty()
          ? iv::KeyboardAdjacency::builtin_qwerty()
          : iv::KeyboardAdjacency::load_tsv(config.interventions.keyboard_table);
  const iv::SvaMorphology morph = config.interventions.sva_table.empty()
                                      ? iv::SvaMorphology::builtin()
                                      : iv::SvaMorphology::load_tsv(config.interventions.sva_table);

  std::vector<iv::Kind> rewrite_kinds;
  for (const auto k : kinds)
    if (iv::is_rewrite(k)) rewrite_kinds.push_back(k);
  std::map<std::string, std::string> corrections;
  std::map<std::string, std::string> rewrite_outputs;
  if (!rewrite_kinds.empty())
    rewrite_outputs = run_rewrites(corpus, rewrite_kinds, config, env, corrections);

  std::ostringstream summary;
  for (const auto kind : kinds) {
    std::vector<iv::CounterfactualRecord> records;
    records.reserve(corpus.essays.size());
    for (const auto& essay : corpus.essays) {
      if (iv::is_rule_based(kind)) {
        iv::RuleParams params;
        params.sentence_fraction = config.interventions.sentence_fraction;
        params.word_fraction = config.interventions.word_fraction;
        params.seed = derive_seed(config.seed, essay.id, iv::to_string(kind));
        switch (kind) {
          case iv::Kind::SpellingErrors:
            records.push_back(iv::introduce_spelling_errors(essay, params, keymap));
            break;
          case iv::Kind::SvaErrors:
            records.push_back(iv::introduce_sva_errors(essay, params, morph));
            break;
          case iv::Kind::WordOrderSwap:
            records.push_back(iv::swap_word_order(essay, params));
            break;
          case iv::Kind::IntraParaShuffle:
            records.push_back(iv::shuffle_intra_paragraph(essay, params.seed));
            break;
          case iv::Kind::InterTextShuffle:
            records.push_back(iv::shuffle_inter_text(essay, params.seed));
            break;
          default:
            break;
        }
      } else {
        const auto it = rewrite_outputs.find(std::string(iv::to_string(kind)) + "/" + essay.id);
        if (it == rewrite_outputs.end())
          throw ValidationError("no rewrite output for essay '" + essay.id + "' kind " +
                                iv::to_string(kind));
        iv::CounterfactualRecord rec;
        rec.source_id = essay.id;
        rec.kind = kind;
        rec.prompt_version = iv::kPromptVersion;
        rec.essay = corpus::make_essay(essay.id, it->second);
        if (rec.essay.text != essay.text) rec.diff.push_back({0, "rewrite", {}});
        records.push_back(std::move(rec));
      }
    }
    const fs::path path = cf_path(config, kind);
    fs::create_directories(path.parent_path());
    iv::save_records(records, path.string());
    summary << iv::to_string(kind) << ": " << records.size() << " records -> " << path.string()
            << "\n";
  }
  return summary.str();
}

namespace {

// Metric source for pipeline stages: addt and error_density fall back to 0
// (and are reported) when trees or a grammar endpoint are unavailable.
struct MetricSource {
  const metrics::FrequencyLexicon* lexicon = nullptr;
  std::unique_ptr<metrics::GrammarClient> grammar;
  bool trees = false;
  std::vector<std::string> notes;

  metrics::MetricVector compute(const corpus::Essay& essay) {
    metrics::MetricVector v;
    const auto counts = metrics::word_and_sentence_counts(essay);
    v.word_num = static_cast<double>(counts.word_num);
    v.sent_num = static_cast<double>(counts.sent_num);
    v.mls = counts.mls;
    bool all_trees = true;
    for (const auto& s : essay.sentences)
      if (!s.dep) all_trees = false;
    v.addt = (trees && all_trees) ? metrics::avg_dep_depth(essay) : 0.0;
    v.lemma_ttr = metrics::lemma_ttr(essay);
    v.lex_soph = metrics::lex_soph(essay, *lexicon);
    if (grammar) {
      const auto report = grammar->check(essay.id, essay.text);
      v.error_density = metrics::error_density(essay, report);
    }
    return v;
  }
};

MetricSource make_metric_source(const RunConfig& config,
                                const metrics::FrequencyLexicon& lexicon, bool trees) {
  MetricSource src;
  src.lexicon = &lexicon;
  src.trees = trees;
  if (!config.grammar.endpoint.empty()) {
    metrics::GrammarCheckConfig gc;
    gc.endpoint = config.grammar.endpoint;
    gc.retries = config.grammar.retries;
    gc.cache_dir = config.cache_dir;
    src.grammar = std::make_unique<metrics::GrammarClient>(gc);
  } else {
    src.notes.push_back("error_density fixed at 0: no grammar endpoint configured");
  }
  if (!trees) src.notes.push_back("addt fixed at 0: no dependency trees configured");
  return src;
}

}  // namespace

std::string cmd_validate(const RunConfig& config, const Env&) {
  const corpus::Corpus originals = load_test_corpus(config);
  const metrics::FrequencyLexicon lexicon = require_lexicon(config);
  MetricSource source = make_metric_source(config, lexicon, !config.conllu.empty());

  std::ostringstream summary;
  for (const auto& note : source.notes) summary << "note: " << note << "\n";
  for (const auto kind : configured_kinds(config)) {
    const fs::path path = cf_path(config, kind);
    if (!fs::exists(path)) {
      summary << iv::to_string(kind) << ": skipped (no " << path.string() << ")\n";
      continue;
    }
    std::map<std::string, corpus::Essay> cf;
    for (auto& rec : iv::load_records(path.string())) cf.emplace(rec.source_id, std::move(rec.essay));
    const auto report = validity::effect_size_report(
        originals, cf, iv::to_string(kind),
        [&](const corpus::Essay& e) -> std::optional<metrics::MetricVector> {
          return source.compute(e);
        });
    write_file(fs::path(config.out_dir) / ("effect_sizes_" + std::string(iv::to_string(kind)) +
                                           ".csv"),
               validity::to_csv(report));
    write_file(fs::path(config.out_dir) / ("effect_sizes_" + std::string(iv::to_string(kind)) +
                                           ".json"),
               validity::to_json(report));
    summary << iv::to_string(kind) << ": " << report.rows.size() << " metric rows, "
            << report.dropped_pairs.size() << " dropped pairs\n";
  }
  return summary.str();
}

namespace {

std::vector<scoring::Exemplar> load_exemplars(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open exemplars file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path + ": invalid JSON: " + e.what());
  }
  std::vector<scoring::Exemplar> out;
  for (const auto& [level, entry] : j.at("exemplars").items()) {
    scoring::Exemplar ex;
    ex.level = scoring::parse_level(level);
    ex.essay_id = entry.value("essay_id", "");
    ex.text = entry.value("text", "");
    if (entry.contains("score")) ex.score = entry["score"].get<double>();
    out.push_back(std::move(ex));
  }
  return out;
}

struct ScorerBundle {
  std::unique_ptr<chat::Transport> http_transport;
  std::unique_ptr<chat::CachingTransport> caching;
  std::unique_ptr<scoring::Scorer> scorer;
};

ScorerBundle build_scorer(const RunConfig& config, scoring::ScorerSpec spec, const Env& env) {
  ScorerBundle bundle;
  switch (spec.kind) {
    case scoring::ScorerKind::mock:
      bundle.scorer = scoring::make_mock_scorer(spec);
      break;
    case scoring::ScorerKind::http:
      bundle.scorer = scoring::make_http_scorer(spec);
      break;
    case scoring::ScorerKind::llm_zero_shot:
    case scoring::ScorerKind::llm_few_shot: {
      if (spec.kind == scoring::ScorerKind::llm_few_shot && spec.exemplars.empty()) {
        if (config.exemplars_path.empty())
          throw ConfigError("scorer '" + spec.id +
                            "': few-shot scoring needs 'exemplars' in the config");
        spec.exemplars = load_exemplars(config.exemplars_path);
      }
      if (spec.model.empty()) spec.model = config.chat.model;
      chat::Transport* base = env.chat_transport;
      if (base == nullptr) {
        if (config.chat.endpoint.empty())
          throw ConfigError("scorer '" + spec.id + "' needs chat.endpoint");
        chat::HttpChatConfig hc;
        hc.endpoint = config.chat.endpoint;
        hc.api_key_env = config.chat.api_key_env;
        hc.retries = config.chat.retries;
        bundle.http_transport = std::make_unique<chat::HttpChatTransport>(hc);
        base = bundle.http_transport.get();
      }
      bundle.caching = std::make_unique<chat::CachingTransport>(*base, config.cache_dir, spec.id);
      bundle.scorer = scoring::make_llm_scorer(spec, config.dataset_kind, *bundle.caching);
      break;
    }
  }
  return bundle;
}

}  // namespace

std::string cmd_score(const RunConfig& config, const Env& env) {
  const corpus::Corpus originals = load_test_corpus(config);
  const auto prompt_texts = load_prompt_texts(config);
  if (config.scorers.empty()) throw ConfigError("no scorers configured");

  auto prompt_of = [&](const corpus::Essay& essay) -> std::optional<std::string> {
    const corpus::Essay* source = originals.find(essay.id);
    const auto& pid = source != nullptr ? source->prompt_id : essay.prompt_id;
    if (!pid) return std::nullopt;
    const auto it = prompt_texts.find(*pid);
    if (it == prompt_texts.end()) return std::nullopt;
    return it->second;
  };

  std::ostringstream summary;
  for (const auto& spec : config.scorers) {
    ScorerBundle bundle = build_scorer(config, spec, env);
    std::vector<scoring::GapEntry> all_gaps;

    auto run_variant = [&](const std::string& variant,
                           const std::vector<corpus::Essay>& essays) {
      const auto result = scoring::score_batch(essays, variant, spec, *bundle.scorer, prompt_of,
                                               config.parallelism);
      scoring::save_score_records(result.records, scores_path(config, spec.id, variant).string());
      for (const auto& gap : result.gaps)
        all_gaps.push_back({gap.essay_id, variant + ": " + gap.message});
      summary << spec.id << "/" << variant << ": " << result.records.size() << " scored, "
              << result.gaps.size() << " gaps\n";
    };

    fs::create_directories(config.out_dir);
    run_variant("original", originals.essays);
    for (const auto kind : configured_kinds(config)) {
      const fs::path path = cf_path(config, kind);
      if (!fs::exists(path)) continue;
      std::vector<corpus::Essay> essays;
      for (auto& rec : iv::load_records(path.string())) essays.push_back(std::move(rec.essay));
      run_variant(iv::to_string(kind), essays);
    }

    json gaps = json::array();
    for (const auto& gap : all_gaps) gaps.push_back({{"essay_id", gap.essay_id},
                                                     {"detail", gap.message}});
    write_file(fs::path(config.out_dir) / ("gaps_" + spec.id + ".json"), gaps.dump(2));
  }
  return summary.str();
}

std::string cmd_analyze(const RunConfig& config, const Env&) {
  const corpus::Corpus originals = load_test_corpus(config);
  if (config.scorers.empty()) throw ConfigError("no scorers configured");

  std::map<std::string, std::map<std::string, analysis::ShiftCell>> cells;
  std::vector<scoring::ScoreRecord> all_records;
  std::ostringstream agreement_csv;
  agreement_csv << "scorer,n,qwk,weighted_f1,rmse\n";

  std::ostringstream summary;
  for (const auto& spec : config.scorers) {
    const fs::path orig_path = scores_path(config, spec.id, "original");
    if (!fs::exists(orig_path))
      throw ConfigError("no original scores for scorer '" + spec.id + "'; run the score stage");
    const auto orig_records = scoring::load_score_records(orig_path.string());
    all_records.insert(all_records.end(), orig_records.begin(), orig_records.end());

    bool has_gold = false;
    for (const auto& e : originals.essays)
      if (e.gold) has_gold = true;
    if (has_gold) {
      const auto agreement = analysis::agreement_report(originals, orig_records,
                                                        config.dataset_kind);
      agreement_csv << spec.id << ',' << agreement.n << ',' << agreement.qwk << ','
                    << (agreement.weighted_f1 ? std::to_string(*agreement.weighted_f1) : "") << ','
                    << (agreement.rmse ? std::to_string(*agreement.rmse) : "") << '\n';
    }

    for (const auto kind : configured_kinds(config)) {
      const fs::path path = scores_path(config, spec.id, iv::to_string(kind));
      if (!fs::exists(path)) continue;
      const auto cf_records = scoring::load_score_records(path.string());
      all_records.insert(all_records.end(), cf_records.begin(), cf_records.end());
      const auto paired = analysis::pair_scores(orig_records, cf_records);
      if (paired.deltas.empty()) continue;
      const auto deltas = paired.delta_values();
      analysis::ShiftCell cell;
      cell.summary = stats::bootstrap_summary(
          deltas, config.bootstrap.iterations, config.bootstrap.level,
          derive_seed(config.seed, spec.id, iv::to_string(kind)), config.bootstrap.threads);
      cell.present = true;
      cells[spec.id][iv::to_string(kind)] = cell;
      summary << spec.id << "/" << iv::to_string(kind) << ": n=" << cell.summary.n
              << " mean=" << cell.summary.mean << " p=" << cell.summary.p << "\n";
    }
  }

  write_file(fs::path(config.out_dir) / "shift_table.txt", analysis::render_shift_table(cells));
  write_file(fs::path(config.out_dir) / "shift_table.csv", analysis::shift_table_csv(cells));
  if (config.emit_latex)
    write_file(fs::path(config.out_dir) / "shift_table.tex", analysis::shift_table_latex(cells));
  write_file(fs::path(config.out_dir) / "agreement.csv", agreement_csv.str());
  write_file(fs::path(config.out_dir) / "histogram.csv",
             analysis::score_histogram_csv(all_records));
  summary << "wrote shift_table.{txt,csv" << (config.emit_latex ? ",tex" : "")
          << "}, agreement.csv, histogram.csv\n";
  return summary.str();
}

std::string cmd_select_exemplars(const RunConfig& config, const Env&) {
  const std::string path = !config.corpus_train.empty() ? config.corpus_train : config.corpus_test;
  if (path.empty()) throw ConfigError("select-exemplars needs corpus.train or corpus.test");
  corpus::Corpus train = corpus::load_corpus(path);
  if (!config.conllu.empty() && path == config.corpus_test) {
    auto attached = corpus::attach_conllu(train, config.conllu);
    train = std::move(attached.corpus);
  }
  const metrics::FrequencyLexicon lexicon = require_lexicon(config);
  MetricSource source = make_metric_source(config, lexicon, false);

  const auto selection = fewshot::select_exemplars(
      train, [&](const corpus::Essay& e) { return source.compute(e); });
  const std::string out_path = config.exemplars_path.empty()
                                   ? (fs::path(config.out_dir) / "exemplars.json").string()
                                   : config.exemplars_path;
  write_file(out_path, fewshot::selection_to_json(selection, train));

  std::ostringstream summary;
  summary << "components: " << selection.model.k() << "; exemplars:";
  for (const auto& ex : selection.exemplars)
    summary << " " << scoring::to_string(ex.level) << "=" << ex.essay_id;
  summary << " -> " << out_path << "\n";
  return summary.str();
}

namespace {

const scoring::ScorerSpec& feedback_scorer(const RunConfig& config) {
  if (config.scorers.empty()) throw ConfigError("no scorers configured");
  if (config.feedback.scorer.empty()) {
    for (const auto& s : config.scorers)
      if (s.kind == scoring::ScorerKind::llm_zero_shot ||
          s.kind == scoring::ScorerKind::llm_few_shot)
        return s;
    throw ConfigError("feedback needs an llm scorer (feedback.scorer)");
  }
  for (const auto& s : config.scorers)
    if (s.id == config.feedback.scorer) return s;
  throw ConfigError("feedback.scorer '" + config.feedback.scorer + "' is not configured");
}

fs::path feedback_pairs_path(const RunConfig& config, iv::Kind kind) {
  return fs::path(config.out_dir) / (std::string("feedback_pairs_") + iv::to_string(kind) +
                                     ".jsonl");
}

std::string cmd_feedback_generate(const RunConfig& config, const Env& env) {
  const corpus::Corpus originals = load_test_corpus(config);
  const auto prompt_texts = load_prompt_texts(config);
  scoring::ScorerSpec spec = feedback_scorer(config);
  if (spec.kind != scoring::ScorerKind::llm_zero_shot &&
      spec.kind != scoring::ScorerKind::llm_few_shot)
    throw ConfigError("feedback generation needs an llm scorer");
  if (spec.kind == scoring::ScorerKind::llm_few_shot && spec.exemplars.empty()) {
    if (config.exemplars_path.empty())
      throw ConfigError("few-shot feedback needs 'exemplars' in the config");
    spec.exemplars = load_exemplars(config.exemplars_path);
  }
  if (spec.model.empty()) spec.model = config.chat.model;

  std::unique_ptr<chat::Transport> http;
  chat::Transport* base = env.chat_transport;
  if (base == nullptr) {
    if (config.chat.endpoint.empty()) throw ConfigError("feedback needs chat.endpoint");
    chat::HttpChatConfig hc;
    hc.endpoint = config.chat.endpoint;
    hc.api_key_env = config.chat.api_key_env;
    hc.retries = config.chat.retries;
    http = std::make_unique<chat::HttpChatTransport>(hc);
    base = http.get();
  }
  chat::CachingTransport score_cache(*base, config.cache_dir, spec.id);
  chat::CachingTransport feedback_cache(*base, config.cache_dir, spec.id + "-feedback");

  auto prompt_of = [&](const corpus::Essay& essay) -> std::optional<std::string> {
    const corpus::Essay* source = originals.find(essay.id);
    const auto& pid = source != nullptr ? source->prompt_id : essay.prompt_id;
    if (!pid) return std::nullopt;
    const auto it = prompt_texts.find(*pid);
    return it == prompt_texts.end() ? std::nullopt : std::optional<std::string>(it->second);
  };

  auto feedback_for = [&](const corpus::Essay& essay) -> feedback::FeedbackTriple {
    auto scoring_request = scoring::build_score_prompt(essay, prompt_of(essay), spec,
                                                       config.dataset_kind);
    scoring_request.model = spec.model;
    const auto reply = score_cache.cached(scoring_request);
    if (!reply)
      throw ValidationError("essay '" + essay.id +
                            "': no prior scoring exchange in the cache; run the score stage first");
    const auto request = feedback::build_feedback_request(scoring_request, *reply);
    return feedback::parse_feedback_response(feedback_cache.complete(request));
  };

  std::ostringstream summary;
  for (const auto kind : configured_kinds(config)) {
    const fs::path path = cf_path(config, kind);
    if (!fs::exists(path)) continue;
    std::ofstream out(feedback_pairs_path(config, kind), std::ios::binary);
    if (!out) throw IoError("cannot write feedback pairs file");
    std::size_t n = 0;
    for (auto& rec : iv::load_records(path.string())) {
      const corpus::Essay* original = originals.find(rec.source_id);
      if (original == nullptr) continue;
      const auto triple_or = feedback_for(*original);
      const auto triple_cf = feedback_for(rec.essay);
      json j;
      j["pair_id"] = rec.source_id + "/" + iv::to_string(kind);
      j["kind"] = iv::to_string(kind);
      j["original"] = {{"organization_feedback", triple_or.organization},
                       {"language_use_feedback", triple_or.language_use},
                       {"conventions_feedback", triple_or.conventions}};
      j["counterfactual"] = {{"organization_feedback", triple_cf.organization},
                             {"language_use_feedback", triple_cf.language_use},
                             {"conventions_feedback", triple_cf.conventions}};
      out << j.dump() << '\n';
      ++n;
    }
    summary << iv::to_string(kind) << ": " << n << " feedback pairs\n";
  }
  return summary.str();
}

std::string cmd_feedback_export(const RunConfig& config) {
  std::vector<feedback::FeedbackPair> pairs;
  for (const auto kind : configured_kinds(config)) {
    const fs::path path = feedback_pairs_path(config, kind);
    if (!fs::exists(path)) continue;
    std::ifstream in(path, std::ios::binary);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json j = json::parse(line);
      feedback::FeedbackPair pair;
      pair.pair_id = j.at("pair_id").get<std::string>();
      pair.kind = iv::parse_kind(j.at("kind").get<std::string>());
      auto triple = [](const json& t) {
        return feedback::FeedbackTriple{t.at("organization_feedback").get<std::string>(),
                                        t.at("language_use_feedback").get<std::string>(),
                                        t.at("conventions_feedback").get<std::string>()};
      };
      pair.original = triple(j.at("original"));
      pair.counterfactual = triple(j.at("counterfactual"));
      pairs.push_back(std::move(pair));
    }
  }
  if (pairs.empty()) throw ConfigError("no feedback pairs to export; run feedback generate");
  const auto ann = (fs::path(config.out_dir) / "annotator.jsonl").string();
  const auto key = (fs::path(config.out_dir) / "annotation_key.jsonl").string();
  fs::create_directories(config.out_dir);
  feedback::export_blinded_pairs(pairs, derive_seed(config.seed, "blinded-export"), ann, key);
  return std::to_string(pairs.size()) + " pairs -> " + ann + " (key: " + key + ")\n";
}

std::string cmd_feedback_tally(const RunConfig& config) {
  if (config.feedback.annotations.empty())
    throw ConfigError("feedback tally needs feedback.annotations (CSV path)");
  const auto annotations = feedback::load_annotations_csv(config.feedback.annotations);
  const auto key =
      feedback::load_key_file((fs::path(config.out_dir) / "annotation_key.jsonl").string());
  const auto rates = feedback::tabulate_votes(annotations, key);
  const auto csv = feedback::rates_to_csv(rates);
  write_file(fs::path(config.out_dir) / "detection_rates.csv", csv);
  return csv;
}

}  // namespace

std::string cmd_feedback(const RunConfig& config, const std::string& subcommand, const Env& env) {
  if (subcommand == "generate") return cmd_feedback_generate(config, env);
  if (subcommand == "export") return cmd_feedback_export(config);
  if (subcommand == "tally") return cmd_feedback_tally(config);
  throw ConfigError("unknown feedback subcommand '" + subcommand +
                    "' (expected generate, export or tally)");
}

}  // namespace scorelens::pipeline
