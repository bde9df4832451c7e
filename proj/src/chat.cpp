#include "chat.hpp"

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "error.hpp"
#include "rng.hpp"

namespace scorelens::chat {

using nlohmann::json;
namespace fs = std::filesystem;

std::string ChatRequest::body_json() const {
  json body;
  if (!model.empty()) body["model"] = model;
  json msgs = json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  body["messages"] = std::move(msgs);
  body["temperature"] = temperature;
  body["seed"] = seed;
  if (json_mode) body["response_format"] = {{"type", "json_object"}};
  return body.dump();
}

std::string ChatRequest::content_hash() const {
  const std::string body = body_json();
  // two FNV passes with distinct offsets for a 128-bit key
  const std::uint64_t a = fnv1a64(body);
  const std::uint64_t b = fnv1a64(body, 0x6c62272e07bb0142ull);
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(a),
                static_cast<unsigned long long>(b));
  return buf;
}

HttpChatTransport::HttpChatTransport(HttpChatConfig config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) throw ConfigError("chat endpoint is not configured");
}

std::string HttpChatTransport::complete(const ChatRequest& request) {
  const char* key = std::getenv(config_.api_key_env.c_str());
  httplib::Headers headers;
  if (key != nullptr && *key != '\0') headers.emplace("Authorization", std::string("Bearer ") + key);

  std::string last_error;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    httplib::Client client(config_.endpoint);
    client.set_connection_timeout(config_.timeout_seconds);
    client.set_read_timeout(config_.timeout_seconds);
    auto res = client.Post(config_.path, headers, request.body_json(), "application/json");
    if (!res) {
      last_error = "transport failure: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      last_error = "chat endpoint returned status " + std::to_string(res->status) + ": " +
                   res->body.substr(0, 200);
      continue;
    }
    json doc;
    try {
      doc = json::parse(res->body);
    } catch (const json::exception& e) {
      throw TransportError(std::string("chat response is not JSON: ") + e.what());
    }
    try {
      return doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
      throw TransportError("chat response has no choices[0].message.content: " +
                           res->body.substr(0, 200));
    }
  }
  throw TransportError(last_error + " (after " + std::to_string(config_.retries + 1) +
                       " attempts)");
}

CachingTransport::CachingTransport(Transport& inner, std::string cache_dir, std::string spec_id)
    : inner_(inner), dir_(std::move(cache_dir)), spec_id_(std::move(spec_id)) {
  if (dir_.empty()) throw ConfigError("cache directory is not configured");
  fs::create_directories(dir_);
}

std::optional<std::string> CachingTransport::cached(const ChatRequest& request) const {
  const fs::path file = fs::path(dir_) / (spec_id_ + "-" + request.content_hash() + ".json");
  if (!fs::exists(file)) return std::nullopt;
  std::ifstream in(file, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string CachingTransport::complete(const ChatRequest& request) {
  const fs::path file = fs::path(dir_) / (spec_id_ + "-" + request.content_hash() + ".json");
  if (fs::exists(file)) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }
  const std::string response = inner_.complete(request);
  ++misses_;
  // write-then-rename keeps concurrent readers away from partial files
  const fs::path tmp = file.string() + ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write cache file: " + tmp.string());
    out << response;
  }
  fs::rename(tmp, file);
  return response;
}

}  // namespace scorelens::chat
