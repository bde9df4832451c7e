#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace scorelens::chat {

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

// An OpenAI-compatible chat-completions request. Deterministic settings
// (temperature 0, fixed seed, JSON response mode) are the defaults everywhere
// in this project.
struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int seed = 42;
  bool json_mode = true;

  // Request body as a JSON string (messages, temperature, seed,
  // response_format). Stable field order; usable as a cache key input.
  std::string body_json() const;
  // FNV-1a hash of the body, hex-encoded; content-addressed cache key.
  std::string content_hash() const;
};

// Transport returns the assistant message content for a request.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

// Adapter for tests and offline runs.
class FnTransport : public Transport {
 public:
  explicit FnTransport(std::function<std::string(const ChatRequest&)> fn) : fn_(std::move(fn)) {}
  std::string complete(const ChatRequest& request) override { return fn_(request); }

 private:
  std::function<std::string(const ChatRequest&)> fn_;
};

struct HttpChatConfig {
  std::string endpoint;              // e.g. "https://api.openai.com" or "http://host:port"
  std::string path = "/v1/chat/completions";
  std::string api_key_env = "OPENAI_API_KEY";
  int retries = 2;                   // additional attempts after the first
  int timeout_seconds = 120;
};

// POSTs the request to an OpenAI-compatible endpoint and extracts
// choices[0].message.content. Transport failures are retried up to the
// configured limit, then raised as TransportError.
class HttpChatTransport : public Transport {
 public:
  explicit HttpChatTransport(HttpChatConfig config);
  std::string complete(const ChatRequest& request) override;

 private:
  HttpChatConfig config_;
};

// Wraps a transport with a content-addressed response cache keyed by
// (spec id, request hash). Warm reruns never touch the inner transport.
class CachingTransport : public Transport {
 public:
  CachingTransport(Transport& inner, std::string cache_dir, std::string spec_id);
  std::string complete(const ChatRequest& request) override;
  // Cached response without touching the inner transport, if present.
  std::optional<std::string> cached(const ChatRequest& request) const;
  std::uint64_t misses() const { return misses_; }

 private:
  Transport& inner_;
  std::string dir_;
  std::string spec_id_;
  std::uint64_t misses_ = 0;
};

}  // namespace scorelens::chat
