#pragma once

#include <string>

#include "chat.hpp"
#include "config.hpp"

namespace scorelens::pipeline {

// Stage dependencies that tests can stub out. Production runs leave the
// transport null and the pipeline builds HTTP clients from the config.
struct Env {
  chat::Transport* chat_transport = nullptr;
};

// Each command reads its inputs from the config, writes its outputs under
// out_dir and returns a short human-readable summary. Commands are
// deterministic given (inputs, caches, seed) and communicate only via files.
std::string cmd_perturb(const RunConfig& config, const Env& env = {});
std::string cmd_validate(const RunConfig& config, const Env& env = {});
std::string cmd_score(const RunConfig& config, const Env& env = {});
std::string cmd_analyze(const RunConfig& config, const Env& env = {});
std::string cmd_select_exemplars(const RunConfig& config, const Env& env = {});
std::string cmd_feedback(const RunConfig& config, const std::string& subcommand,
                         const Env& env = {});

}  // namespace scorelens::pipeline
