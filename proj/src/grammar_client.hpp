#pragma once

#include <string>

#include "metrics.hpp"

namespace scorelens::metrics {

struct GrammarCheckConfig {
  std::string endpoint;        // LanguageTool-compatible server, e.g. "http://localhost:8081"
  std::string path = "/v2/check";
  std::string language = "en-US";
  int retries = 2;
  int timeout_seconds = 60;
  std::string cache_dir;       // empty disables caching
};

// Client for the public LanguageTool HTTP protocol: form-encoded POST of
// (text, language), JSON response with a "matches" array. Responses are
// cached by content hash when a cache directory is configured.
class GrammarClient {
 public:
  explicit GrammarClient(GrammarCheckConfig config);

  ErrorReport check(const std::string& essay_id, const std::string& text);

  // Parses a LanguageTool response body into a report (exposed for fixtures).
  static ErrorReport parse_response(const std::string& essay_id, const std::string& body);

 private:
  std::string fetch(const std::string& text);
  GrammarCheckConfig config_;
};

}  // namespace scorelens::metrics
