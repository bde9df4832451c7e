#pragma once

#include <stdexcept>
#include <string>

namespace scorelens {

// Error taxonomy shared by the C++ core and mirrored by the C API status codes.
enum class ErrorCode {
  io = 1,
  parse = 2,
  validation = 3,
  config = 4,
  transport = 5,
  internal = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorCode::io, what) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& what) : Error(ErrorCode::parse, what) {}
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& what) : Error(ErrorCode::validation, what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorCode::config, what) {}
};

struct TransportError : Error {
  explicit TransportError(const std::string& what) : Error(ErrorCode::transport, what) {}
};

}  // namespace scorelens
