// scorelens CLI: thin argument layer over the shared-library C API.

#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "scorelens.h"

namespace {

struct ConfigHandle {
  sl_config* ptr = nullptr;
  ~ConfigHandle() { sl_config_free(ptr); }
};

int fail(const char* stage) {
  std::fprintf(stderr, "scorelens %s: %s\n", stage, sl_last_error());
  return 1;
}

int run_stage(const std::string& stage, const std::string& config_path, const std::string& seed,
              const std::string& out, const std::string& cache, const std::string& feedback_sub) {
  ConfigHandle config;
  if (sl_config_load(config_path.c_str(), &config.ptr) != SL_OK) return fail("config");
  if (!seed.empty() && sl_config_override(config.ptr, "seed", seed.c_str()) != SL_OK)
    return fail("config");
  if (!out.empty() && sl_config_override(config.ptr, "out", out.c_str()) != SL_OK)
    return fail("config");
  if (!cache.empty() && sl_config_override(config.ptr, "cache", cache.c_str()) != SL_OK)
    return fail("config");

  char* summary = nullptr;
  sl_status status;
  if (stage == "perturb") {
    status = sl_run_perturb(config.ptr, &summary);
  } else if (stage == "validate") {
    status = sl_run_validate(config.ptr, &summary);
  } else if (stage == "score") {
    status = sl_run_score(config.ptr, &summary);
  } else if (stage == "analyze") {
    status = sl_run_analyze(config.ptr, &summary);
  } else if (stage == "select-exemplars") {
    status = sl_run_select_exemplars(config.ptr, &summary);
  } else if (stage == "feedback") {
    status = sl_run_feedback(config.ptr, feedback_sub.c_str(), &summary);
  } else {
    std::fprintf(stderr, "unknown stage %s\n", stage.c_str());
    return 1;
  }
  if (status != SL_OK) return fail(stage.c_str());
  if (summary != nullptr) {
    std::fputs(summary, stdout);
    sl_string_free(summary);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Counterfactual rubric-alignment diagnostics for essay scorers"};
  app.require_subcommand(1);

  std::string config_path, seed, out, cache;
  app.add_option("-c,--config", config_path, "run configuration (JSON)")->required();
  app.add_option("--seed", seed, "override the master seed");
  app.add_option("--out", out, "override the output directory");
  app.add_option("--cache", cache, "override the cache directory");

  auto* perturb = app.add_subcommand("perturb", "generate counterfactual essays per intervention");
  auto* validate = app.add_subcommand("validate", "effect sizes of interventions on the metrics");
  auto* score = app.add_subcommand("score", "score originals and counterfactuals");
  auto* analyze = app.add_subcommand("analyze", "score shifts, agreement and histograms");
  auto* select = app.add_subcommand("select-exemplars", "pick few-shot exemplars (PCA medoids)");
  auto* feedback = app.add_subcommand("feedback", "feedback generation, blinded export, tally");
  std::string feedback_sub;
  feedback->add_option("action", feedback_sub, "generate | export | tally")->required();

  CLI11_PARSE(app, argc, argv);

  std::string stage;
  if (perturb->parsed()) stage = "perturb";
  if (validate->parsed()) stage = "validate";
  if (score->parsed()) stage = "score";
  if (analyze->parsed()) stage = "analyze";
  if (select->parsed()) stage = "select-exemplars";
  if (feedback->parsed()) stage = "feedback";

  return run_stage(stage, config_path, seed, out, cache, feedback_sub);
}
