#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "metrics.hpp"
#include "stats.hpp"

namespace scorelens::validity {

// Re-exported so callers can take the whole validity surface from one header.
using stats::cohens_d;

struct EffectSizeRow {
  std::string metric;
  double mean_or = 0.0;
  double mean_cf = 0.0;
  double pooled_sd = 0.0;
  double d = 0.0;
  std::size_t n_or = 0;
  std::size_t n_cf = 0;
};

struct EffectSizeReport {
  std::string kind;
  std::array<EffectSizeRow, metrics::MetricVector::size> rows;
  std::vector<std::string> dropped_pairs;  // essays excluded for a missing side
};

// Per-metric effect sizes of one intervention over a corpus. `metrics_of`
// returns the metric vector for an essay (original or counterfactual);
// returning nullopt drops the pair with a log entry. Counterfactuals are
// keyed by source essay id.
EffectSizeReport effect_size_report(
    const corpus::Corpus& originals,
    const std::map<std::string, corpus::Essay>& counterfactuals, const std::string& kind,
    const std::function<std::optional<metrics::MetricVector>(const corpus::Essay&)>& metrics_of);

std::string to_csv(const EffectSizeReport& report);
std::string to_json(const EffectSizeReport& report);

}  // namespace scorelens::validity
