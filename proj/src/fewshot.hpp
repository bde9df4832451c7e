#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "metrics.hpp"

namespace scorelens::fewshot {

struct PcaModel {
  std::vector<std::string> metric_names;  // retained input metrics, in order
  std::vector<std::string> dropped;       // zero-variance metrics, logged
  std::vector<double> means;              // per retained metric
  std::vector<double> sds;                // per retained metric (n-1 convention)
  std::vector<std::vector<double>> components;  // k orthonormal rows
  std::vector<double> explained;                // non-increasing ratios, sum <= 1

  std::size_t dim() const { return metric_names.size(); }
  std::size_t k() const { return components.size(); }
};

// Z-score standardization, eigendecomposition of the covariance matrix, and
// retention of the smallest k whose cumulative explained variance reaches
// `threshold`, capped at `cap`. Metrics with zero variance are dropped and
// logged. Eigenvector signs follow the largest-magnitude-entry-positive
// convention.
PcaModel fit_pca(const std::vector<std::array<double, metrics::MetricVector::size>>& vectors,
                 double threshold = 0.95, std::size_t cap = 5);

std::vector<double> project(const PcaModel& model,
                            const std::array<double, metrics::MetricVector::size>& vector);

// Index minimizing the summed Euclidean distance to all points; ties break to
// the lowest index.
std::size_t medoid(const std::vector<std::vector<double>>& points);

struct ExemplarChoice {
  scoring::Level level;
  std::string essay_id;
  std::vector<double> coordinates;
};

struct ExemplarSelection {
  PcaModel model;
  std::vector<ExemplarChoice> exemplars;  // High, Medium, Low order
};

// Per-level medoids in the fitted PCA space. Levels come from gold labels
// (direct, or banded from the numeric score); an empty level group is an
// error naming the level.
ExemplarSelection select_exemplars(
    const corpus::Corpus& corpus,
    const std::function<metrics::MetricVector(const corpus::Essay&)>& metrics_of);

// JSON persistence (level -> essay id + coordinates + text/score for
// reproducible prompt construction).
std::string selection_to_json(const ExemplarSelection& selection, const corpus::Corpus& corpus);

}  // namespace scorelens::fewshot
