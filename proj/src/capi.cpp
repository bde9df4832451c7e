// extern-C surface over the C++ core. Exceptions are mapped to status codes;
// the offending message is kept in thread-local storage.

#include "scorelens.h"

#include <cstring>
#include <string>

#include "analysis.hpp"
#include "config.hpp"
#include "corpus.hpp"
#include "error.hpp"
#include "metrics.hpp"
#include "pipeline.hpp"
#include "scale.hpp"
#include "stats.hpp"

namespace {

thread_local std::string t_last_error;

sl_status status_of(const scorelens::Error& e) {
  switch (e.code()) {
    case scorelens::ErrorCode::io: return SL_ERR_IO;
    case scorelens::ErrorCode::parse: return SL_ERR_PARSE;
    case scorelens::ErrorCode::validation: return SL_ERR_VALIDATION;
    case scorelens::ErrorCode::config: return SL_ERR_CONFIG;
    case scorelens::ErrorCode::transport: return SL_ERR_TRANSPORT;
    case scorelens::ErrorCode::internal: return SL_ERR_INTERNAL;
  }
  return SL_ERR_INTERNAL;
}

template <typename Fn>
sl_status guarded(Fn&& fn) {
  try {
    fn();
    return SL_OK;
  } catch (const scorelens::Error& e) {
    t_last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return SL_ERR_INTERNAL;
  } catch (...) {
    t_last_error = "unknown error";
    return SL_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

struct sl_corpus {
  scorelens::corpus::Corpus corpus;
};

struct sl_config {
  scorelens::pipeline::RunConfig config;
};

namespace {

template <typename Fn>
sl_status run_stage(const sl_config* config, char** out_summary, Fn&& stage) {
  if (config == nullptr) {
    t_last_error = "null config handle";
    return SL_ERR_VALIDATION;
  }
  return guarded([&] {
    const std::string summary = stage(config->config);
    if (out_summary != nullptr) *out_summary = dup_string(summary);
  });
}

}  // namespace

extern "C" {

const char* sl_version(void) { return "0.1.0"; }

const char* sl_last_error(void) { return t_last_error.c_str(); }

void sl_string_free(char* s) { delete[] s; }

sl_status sl_corpus_load(const char* jsonl_path, sl_corpus** out) {
  if (jsonl_path == nullptr || out == nullptr) {
    t_last_error = "sl_corpus_load: null argument";
    return SL_ERR_VALIDATION;
  }
  return guarded([&] { *out = new sl_corpus{scorelens::corpus::load_corpus(jsonl_path)}; });
}

sl_status sl_corpus_attach_conllu(sl_corpus* corpus, const char* conllu_path) {
  if (corpus == nullptr || conllu_path == nullptr) {
    t_last_error = "sl_corpus_attach_conllu: null argument";
    return SL_ERR_VALIDATION;
  }
  return guarded([&] {
    auto attached = scorelens::corpus::attach_conllu(corpus->corpus, conllu_path);
    corpus->corpus = std::move(attached.corpus);
  });
}

size_t sl_corpus_essay_count(const sl_corpus* corpus) {
  return corpus == nullptr ? 0 : corpus->corpus.essays.size();
}

const char* sl_corpus_essay_id(const sl_corpus* corpus, size_t index) {
  if (corpus == nullptr || index >= corpus->corpus.essays.size()) return nullptr;
  return corpus->corpus.essays[index].id.c_str();
}

void sl_corpus_free(sl_corpus* corpus) { delete corpus; }

sl_status sl_corpus_metrics(const sl_corpus* corpus, size_t index, const char* lexicon_tsv_path,
                            double out_values[7]) {
  if (corpus == nullptr || lexicon_tsv_path == nullptr || out_values == nullptr) {
    t_last_error = "sl_corpus_metrics: null argument";
    return SL_ERR_VALIDATION;
  }
  return guarded([&] {
    namespace m = scorelens::metrics;
    if (index >= corpus->corpus.essays.size())
      throw scorelens::ValidationError("essay index out of range");
    const auto& essay = corpus->corpus.essays[index];
    const auto lexicon = m::FrequencyLexicon::load_tsv(lexicon_tsv_path);
    const auto counts = m::word_and_sentence_counts(essay);
    out_values[0] = static_cast<double>(counts.word_num);
    out_values[1] = static_cast<double>(counts.sent_num);
    out_values[2] = counts.mls;
    bool trees = true;
    for (const auto& s : essay.sentences)
      if (!s.dep) trees = false;
    out_values[3] = trees ? m::avg_dep_depth(essay) : 0.0;
    out_values[4] = m::lemma_ttr(essay);
    out_values[5] = m::lex_soph(essay, lexicon);
    out_values[6] = 0.0;
  });
}

sl_status sl_cohens_d(const double* or_values, size_t n_or, const double* cf_values, size_t n_cf,
                      double* out) {
  if (or_values == nullptr || cf_values == nullptr || out == nullptr) {
    t_last_error = "sl_cohens_d: null argument";
    return SL_ERR_VALIDATION;
  }
  return guarded([&] {
    *out = scorelens::stats::cohens_d({or_values, n_or}, {cf_values, n_cf});
  });
}

sl_status sl_qwk(const int* gold, const int* pred, size_t n, size_t n_categories, double* out) {
  if (gold == nullptr || pred == nullptr || out == nullptr) {
    t_last_error = "sl_qwk: null argument";
    return SL_ERR_VALIDATION;
  }
  return guarded([&] {
    *out = scorelens::stats::qwk({gold, n}, {pred, n}, static_cast<int>(n_categories));
  });
}

sl_status sl_weighted_f1(const int* gold, const int* pred, size_t n, size_t n_classes,
                         double* out) {
  if (gold == nullptr || pred == nullptr || out == nullptr) {
    t_last_error = "sl_weighted_f1: null argument";
    return SL_ERR_VALIDATION;
  }
  return guarded([&] {
    *out = scorelens::stats::weighted_f1({gold, n}, {pred, n}, static_cast<int>(n_classes));
  });
}

sl_status sl_rmse(const double* gold, const double* pred, size_t n, double* out) {
  if (gold == nullptr || pred == nullptr || out == nullptr) {
    t_last_error = "sl_rmse: null argument";
    return SL_ERR_VALIDATION;
  }
  return guarded([&] { *out = scorelens::stats::rmse({gold, n}, {pred, n}); });
}

sl_status sl_bootstrap_mean(const double* deltas, size_t n, int iterations, double level,
                            uint64_t seed, double* out_mean, double* out_ci_low,
                            double* out_ci_high, double* out_p) {
  if (deltas == nullptr) {
    t_last_error = "sl_bootstrap_mean: null argument";
    return SL_ERR_VALIDATION;
  }
  return guarded([&] {
    const auto s = scorelens::stats::bootstrap_summary({deltas, n}, iterations, level, seed);
    if (out_mean != nullptr) *out_mean = s.mean;
    if (out_ci_low != nullptr) *out_ci_low = s.ci_low;
    if (out_ci_high != nullptr) *out_ci_high = s.ci_high;
    if (out_p != nullptr) *out_p = s.p;
  });
}

sl_status sl_normalize_score(double raw, double* out) {
  if (out == nullptr) {
    t_last_error = "sl_normalize_score: null argument";
    return SL_ERR_VALIDATION;
  }
  return guarded([&] { *out = scorelens::scoring::normalize_score(raw); });
}

int sl_level_of(double grid_score) {
  return static_cast<int>(scorelens::scoring::level_of(grid_score));
}

sl_status sl_config_load(const char* path, sl_config** out) {
  if (path == nullptr || out == nullptr) {
    t_last_error = "sl_config_load: null argument";
    return SL_ERR_VALIDATION;
  }
  return guarded([&] { *out = new sl_config{scorelens::pipeline::load_config(path)}; });
}

sl_status sl_config_override(sl_config* config, const char* key, const char* value) {
  if (config == nullptr || key == nullptr || value == nullptr) {
    t_last_error = "sl_config_override: null argument";
    return SL_ERR_VALIDATION;
  }
  return guarded([&] { scorelens::pipeline::apply_override(config->config, key, value); });
}

void sl_config_free(sl_config* config) { delete config; }

sl_status sl_run_perturb(const sl_config* config, char** out_summary) {
  return run_stage(config, out_summary,
                   [](const auto& c) { return scorelens::pipeline::cmd_perturb(c); });
}

sl_status sl_run_validate(const sl_config* config, char** out_summary) {
  return run_stage(config, out_summary,
                   [](const auto& c) { return scorelens::pipeline::cmd_validate(c); });
}

sl_status sl_run_score(const sl_config* config, char** out_summary) {
  return run_stage(config, out_summary,
                   [](const auto& c) { return scorelens::pipeline::cmd_score(c); });
}

sl_status sl_run_analyze(const sl_config* config, char** out_summary) {
  return run_stage(config, out_summary,
                   [](const auto& c) { return scorelens::pipeline::cmd_analyze(c); });
}

sl_status sl_run_select_exemplars(const sl_config* config, char** out_summary) {
  return run_stage(config, out_summary,
                   [](const auto& c) { return scorelens::pipeline::cmd_select_exemplars(c); });
}

sl_status sl_run_feedback(const sl_config* config, const char* subcommand, char** out_summary) {
  if (subcommand == nullptr) {
    t_last_error = "sl_run_feedback: null subcommand";
    return SL_ERR_VALIDATION;
  }
  const std::string sub = subcommand;
  return run_stage(config, out_summary, [&sub](const auto& c) {
    return scorelens::pipeline::cmd_feedback(c, sub);
  });
}

}  // extern "C"
