#include "scale.hpp"

namespace scorelens::scoring {

const char* to_string(Level level) {
  switch (level) {
    case Level::Low: return "Low";
    case Level::Medium: return "Medium";
    case Level::High: return "High";
  }
  return "Medium";
}

Level parse_level(const std::string& s) {
  if (s == "Low") return Level::Low;
  if (s == "Medium") return Level::Medium;
  if (s == "High") return Level::High;
  throw ParseError("unknown level '" + s + "' (expected Low, Medium or High)");
}

}  // namespace scorelens::scoring
