#include "grammar_client.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "error.hpp"
#include "rng.hpp"

namespace scorelens::metrics {

using nlohmann::json;
namespace fs = std::filesystem;

GrammarClient::GrammarClient(GrammarCheckConfig config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) throw ConfigError("grammar endpoint is not configured");
  if (!config_.cache_dir.empty()) fs::create_directories(config_.cache_dir);
}

ErrorReport GrammarClient::parse_response(const std::string& essay_id, const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    throw ParseError(std::string("grammar response is not JSON: ") + e.what());
  }
  if (!doc.contains("matches") || !doc["matches"].is_array())
    throw ParseError("grammar response has no 'matches' array");
  ErrorReport report;
  report.essay_id = essay_id;
  for (const auto& m : doc["matches"]) {
    GrammarMatch gm;
    gm.offset = m.value("offset", std::size_t{0});
    gm.length = m.value("length", std::size_t{0});
    if (m.contains("rule") && m["rule"].is_object()) gm.rule_id = m["rule"].value("id", "");
    gm.message = m.value("message", "");
    report.matches.push_back(std::move(gm));
  }
  return report;
}

std::string GrammarClient::fetch(const std::string& text) {
  std::string last_error;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    httplib::Client client(config_.endpoint);
    client.set_connection_timeout(config_.timeout_seconds);
    client.set_read_timeout(config_.timeout_seconds);
    httplib::Params params{{"text", text}, {"language", config_.language}};
    auto res = client.Post(config_.path, params);
    if (!res) {
      last_error = "transport failure: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      last_error = "grammar endpoint returned status " + std::to_string(res->status) + ": " +
                   res->body.substr(0, 200);
      continue;
    }
    return res->body;
  }
  throw TransportError(last_error + " (after " + std::to_string(config_.retries + 1) +
                       " attempts)");
}

ErrorReport GrammarClient::check(const std::string& essay_id, const std::string& text) {
  if (text.empty()) return ErrorReport{essay_id, {}};
  std::string body;
  if (!config_.cache_dir.empty()) {
    char key[34];
    std::snprintf(key, sizeof key, "%016llx%016llx",
                  static_cast<unsigned long long>(fnv1a64(text)),
                  static_cast<unsigned long long>(fnv1a64(config_.language, fnv1a64(text))));
    const fs::path file = fs::path(config_.cache_dir) / (std::string("lt-") + key + ".json");
    if (fs::exists(file)) {
      std::ifstream in(file, std::ios::binary);
      std::ostringstream buf;
      buf << in.rdbuf();
      body = buf.str();
    } else {
      body = fetch(text);
      const fs::path tmp = file.string() + ".tmp" + std::to_string(::getpid());
      {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot write cache file: " + tmp.string());
        out << body;
      }
      fs::rename(tmp, file);
    }
  } else {
    body = fetch(text);
  }
  return parse_response(essay_id, body);
}

}  // namespace scorelens::metrics
