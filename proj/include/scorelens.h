/* scorelens — counterfactual diagnostics for automated essay scorers.
 *
 * C API over the C++ core: opaque handles, integer status codes, and a
 * thread-local error message. Every function returning sl_status sets the
 * message retrievable via sl_last_error() on failure. Handles are freed with
 * their matching *_free function; strings returned through out-parameters are
 * freed with sl_string_free.
 */
#ifndef SCORELENS_H
#define SCORELENS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined _WIN32
#define SCORELENS_API __declspec(dllexport)
#else
#define SCORELENS_API __attribute__((visibility("default")))
#endif

typedef enum sl_status {
  SL_OK = 0,
  SL_ERR_IO = 1,
  SL_ERR_PARSE = 2,
  SL_ERR_VALIDATION = 3,
  SL_ERR_CONFIG = 4,
  SL_ERR_TRANSPORT = 5,
  SL_ERR_INTERNAL = 6
} sl_status;

typedef struct sl_corpus sl_corpus;
typedef struct sl_config sl_config;

SCORELENS_API const char* sl_version(void);
/* Message for the most recent failure on this thread; never NULL. */
SCORELENS_API const char* sl_last_error(void);
SCORELENS_API void sl_string_free(char* s);

/* ---- corpus ---------------------------------------------------------- */

/* Loads a JSONL corpus ({"id","text",...} records) with segmentation. */
SCORELENS_API sl_status sl_corpus_load(const char* jsonl_path, sl_corpus** out);
/* Attaches CoNLL-U dependency trees (in place behind the handle). */
SCORELENS_API sl_status sl_corpus_attach_conllu(sl_corpus* corpus, const char* conllu_path);
SCORELENS_API size_t sl_corpus_essay_count(const sl_corpus* corpus);
/* Borrowed pointer, valid while the corpus handle lives. NULL if out of range. */
SCORELENS_API const char* sl_corpus_essay_id(const sl_corpus* corpus, size_t index);
SCORELENS_API void sl_corpus_free(sl_corpus* corpus);

/* Metric vector of one essay: word_num, sent_num, mls, addt, lemma_ttr,
 * lex_soph, error_density. addt/error_density are 0 unless trees are attached
 * / matches counted by other means. Requires a frequency lexicon TSV. */
SCORELENS_API sl_status sl_corpus_metrics(const sl_corpus* corpus, size_t index,
                                          const char* lexicon_tsv_path, double out_values[7]);

/* ---- statistics ------------------------------------------------------ */

SCORELENS_API sl_status sl_cohens_d(const double* or_values, size_t n_or, const double* cf_values,
                                    size_t n_cf, double* out);
SCORELENS_API sl_status sl_qwk(const int* gold, const int* pred, size_t n, size_t n_categories,
                               double* out);
SCORELENS_API sl_status sl_weighted_f1(const int* gold, const int* pred, size_t n,
                                       size_t n_classes, double* out);
SCORELENS_API sl_status sl_rmse(const double* gold, const double* pred, size_t n, double* out);
/* Percentile bootstrap of the mean; p is the two-sided sign-crossing value. */
SCORELENS_API sl_status sl_bootstrap_mean(const double* deltas, size_t n, int iterations,
                                          double level, uint64_t seed, double* out_mean,
                                          double* out_ci_low, double* out_ci_high, double* out_p);

/* ---- score scale ----------------------------------------------------- */

/* Clamp to [1,5], round to the nearest 0.5, ties up. */
SCORELENS_API sl_status sl_normalize_score(double raw, double* out);
/* Band of a grid score: 0 Low (<=2.0), 1 Medium (2.5..3.5), 2 High (>=4.0). */
SCORELENS_API int sl_level_of(double grid_score);

/* ---- pipeline -------------------------------------------------------- */

SCORELENS_API sl_status sl_config_load(const char* path, sl_config** out);
/* Overrides: "seed", "out", "cache". */
SCORELENS_API sl_status sl_config_override(sl_config* config, const char* key, const char* value);
SCORELENS_API void sl_config_free(sl_config* config);

/* Pipeline stages. *out_summary (optional) receives a short report. */
SCORELENS_API sl_status sl_run_perturb(const sl_config* config, char** out_summary);
SCORELENS_API sl_status sl_run_validate(const sl_config* config, char** out_summary);
SCORELENS_API sl_status sl_run_score(const sl_config* config, char** out_summary);
SCORELENS_API sl_status sl_run_analyze(const sl_config* config, char** out_summary);
SCORELENS_API sl_status sl_run_select_exemplars(const sl_config* config, char** out_summary);
/* subcommand: "generate", "export" or "tally". */
SCORELENS_API sl_status sl_run_feedback(const sl_config* config, const char* subcommand,
                                        char** out_summary);

#ifdef __cplusplus
}
#endif

#endif /* SCORELENS_H */
