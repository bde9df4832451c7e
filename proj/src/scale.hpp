#pragma once

#include <cmath>
#include <string>

#include "error.hpp"

namespace scorelens::scoring {

enum class Level { Low, Medium, High };

const char* to_string(Level level);
Level parse_level(const std::string& s);

// The score grids scorers can emit: the numeric 1.0..5.0 half-point grid
// (nine admissible values) or the three-level band scale.
struct ScoreScale {
  enum class Kind { numeric, level };
  Kind kind = Kind::numeric;

  static ScoreScale numeric() { return {Kind::numeric}; }
  static ScoreScale level() { return {Kind::level}; }
};

// Clamp to [1, 5] and round to the nearest 0.5; exact ties round up.
// Idempotent on grid values and monotone in raw.
inline double normalize_score(double raw) {
  if (!std::isfinite(raw)) throw ValidationError("normalize_score: non-finite raw score");
  const double clamped = raw < 1.0 ? 1.0 : (raw > 5.0 ? 5.0 : raw);
  return std::floor(clamped * 2.0 + 0.5) / 2.0;
}

// Band mapping for grid scores: <=2.0 Low, 2.5..3.5 Medium, >=4.0 High.
inline Level level_of(double grid_score) {
  if (grid_score <= 2.0) return Level::Low;
  if (grid_score >= 4.0) return Level::High;
  return Level::Medium;
}

// Representative numeric value per band, used when score shifts must be
// computed from level-scale records (band midpoints).
inline double level_midpoint(Level level) {
  switch (level) {
    case Level::Low: return 1.5;
    case Level::Medium: return 3.0;
    case Level::High: return 4.5;
  }
  return 3.0;
}

}  // namespace scorelens::scoring
