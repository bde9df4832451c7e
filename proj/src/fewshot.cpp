#include "fewshot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "error.hpp"

namespace scorelens::fewshot {

using metrics::MetricVector;

namespace {

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
// eigenvalues and the matrix whose COLUMNS are the eigenvectors. Plenty for
// the 7x7 problems this module sees.
void jacobi_eigen(std::vector<std::vector<double>> a, std::vector<double>& eigenvalues,
                  std::vector<std::vector<double>>& eigenvectors) {
  const std::size_t n = a.size();
  eigenvectors.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) eigenvectors[i][i] = 1.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-24) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double aip = a[i][p], aiq = a[i][q];
          a[i][p] = c * aip - s * aiq;
          a[i][q] = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double api = a[p][i], aqi = a[q][i];
          a[p][i] = c * api - s * aqi;
          a[q][i] = s * api + c * aqi;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = eigenvectors[i][p], viq = eigenvectors[i][q];
          eigenvectors[i][p] = c * vip - s * viq;
          eigenvectors[i][q] = s * vip + c * viq;
        }
      }
    }
  }
  eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) eigenvalues[i] = a[i][i];
}

}  // namespace

PcaModel fit_pca(const std::vector<std::array<double, MetricVector::size>>& vectors,
                 double threshold, std::size_t cap) {
  if (vectors.size() < 2) throw ValidationError("fit_pca needs at least 2 vectors");
  const double n = static_cast<double>(vectors.size());

  std::array<double, MetricVector::size> mean{}, var{};
  for (const auto& v : vectors)
    for (std::size_t m = 0; m < MetricVector::size; ++m) mean[m] += v[m];
  for (auto& x : mean) x /= n;
  for (const auto& v : vectors)
    for (std::size_t m = 0; m < MetricVector::size; ++m)
      var[m] += (v[m] - mean[m]) * (v[m] - mean[m]);
  for (auto& x : var) x /= (n - 1.0);

  PcaModel model;
  std::vector<std::size_t> keep;
  for (std::size_t m = 0; m < MetricVector::size; ++m) {
    if (var[m] > 0.0) {
      keep.push_back(m);
      model.metric_names.push_back(MetricVector::names()[m]);
      model.means.push_back(mean[m]);
      model.sds.push_back(std::sqrt(var[m]));
    } else {
      model.dropped.push_back(MetricVector::names()[m]);
    }
  }
  const std::size_t d = keep.size();
  if (d == 0) throw ValidationError("fit_pca: all metrics have zero variance");

  // covariance of the z-scored data (= correlation of the raw data)
  std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
  for (const auto& v : vectors) {
    std::vector<double> z(d);
    for (std::size_t i = 0; i < d; ++i) z[i] = (v[keep[i]] - model.means[i]) / model.sds[i];
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) cov[i][j] += z[i] * z[j];
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      cov[i][j] /= (n - 1.0);
      cov[j][i] = cov[i][j];
    }

  std::vector<double> eigenvalues;
  std::vector<std::vector<double>> eigenvectors;
  jacobi_eigen(cov, eigenvalues, eigenvectors);

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return eigenvalues[a] > eigenvalues[b]; });

  double total = 0.0;
  for (double ev : eigenvalues) total += std::max(0.0, ev);
  if (total <= 0.0) throw ValidationError("fit_pca: degenerate covariance spectrum");

  const std::size_t max_k = std::min(cap, d);
  double cumulative = 0.0;
  for (std::size_t r = 0; r < d && model.components.size() < max_k; ++r) {
    const std::size_t col = order[r];
    std::vector<double> row(d);
    for (std::size_t i = 0; i < d; ++i) row[i] = eigenvectors[i][col];
    // sign convention: largest-magnitude entry positive
    std::size_t arg = 0;
    for (std::size_t i = 1; i < d; ++i)
      if (std::abs(row[i]) > std::abs(row[arg])) arg = i;
    if (row[arg] < 0.0)
      for (auto& x : row) x = -x;
    const double ratio = std::max(0.0, eigenvalues[col]) / total;
    model.components.push_back(std::move(row));
    model.explained.push_back(ratio);
    cumulative += ratio;
    if (cumulative >= threshold) break;
  }
  return model;
}

std::vector<double> project(const PcaModel& model,
                            const std::array<double, MetricVector::size>& vector) {
  // map retained metric names back to their fixed positions
  std::vector<double> z(model.dim());
  std::size_t zi = 0;
  for (std::size_t m = 0; m < MetricVector::size && zi < model.dim(); ++m) {
    if (model.metric_names[zi] == MetricVector::names()[m]) {
      z[zi] = (vector[m] - model.means[zi]) / model.sds[zi];
      ++zi;
    }
  }
  std::vector<double> out(model.k(), 0.0);
  for (std::size_t r = 0; r < model.k(); ++r)
    for (std::size_t i = 0; i < model.dim(); ++i) out[r] += model.components[r][i] * z[i];
  return out;
}

std::size_t medoid(const std::vector<std::vector<double>>& points) {
  if (points.empty()) throw ValidationError("medoid of an empty point set");
  std::size_t best = 0;
  double best_sum = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < points.size(); ++j) {
      double sq = 0.0;
      for (std::size_t k = 0; k < points[i].size(); ++k) {
        const double diff = points[i][k] - points[j][k];
        sq += diff * diff;
      }
      sum += std::sqrt(sq);
    }
    if (sum < best_sum) {
      best_sum = sum;
      best = i;
    }
  }
  return best;
}

ExemplarSelection select_exemplars(
    const corpus::Corpus& corpus,
    const std::function<metrics::MetricVector(const corpus::Essay&)>& metrics_of) {
  if (corpus.essays.empty()) throw ValidationError("select_exemplars: empty corpus");

  std::vector<std::array<double, MetricVector::size>> vectors;
  vectors.reserve(corpus.essays.size());
  for (const auto& e : corpus.essays) vectors.push_back(metrics_of(e).values());

  ExemplarSelection sel;
  sel.model = fit_pca(vectors);

  std::map<scoring::Level, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < corpus.essays.size(); ++i) {
    const std::string label = corpus::gold_stratum(corpus.essays[i]);
    groups[scoring::parse_level(label)].push_back(i);
  }
  for (const auto level : {scoring::Level::High, scoring::Level::Medium, scoring::Level::Low}) {
    const auto it = groups.find(level);
    if (it == groups.end() || it->second.empty())
      throw ValidationError(std::string("select_exemplars: no essays at level ") +
                            scoring::to_string(level));
    std::vector<std::vector<double>> points;
    points.reserve(it->second.size());
    for (const auto idx : it->second) points.push_back(project(sel.model, vectors[idx]));
    const std::size_t m = medoid(points);
    sel.exemplars.push_back({level, corpus.essays[it->second[m]].id, points[m]});
  }
  return sel;
}

std::string selection_to_json(const ExemplarSelection& selection, const corpus::Corpus& corpus) {
  nlohmann::json j;
  j["components"] = selection.model.k();
  j["explained_variance"] = selection.model.explained;
  j["dropped_metrics"] = selection.model.dropped;
  nlohmann::json by_level = nlohmann::json::object();
  for (const auto& ex : selection.exemplars) {
    const corpus::Essay* essay = corpus.find(ex.essay_id);
    nlohmann::json entry;
    entry["essay_id"] = ex.essay_id;
    entry["coordinates"] = ex.coordinates;
    if (essay != nullptr) {
      entry["text"] = essay->text;
      if (essay->gold && essay->gold->numeric) entry["score"] = *essay->gold->numeric;
    }
    by_level[scoring::to_string(ex.level)] = std::move(entry);
  }
  j["exemplars"] = std::move(by_level);
  return j.dump(2);
}

}  // namespace scorelens::fewshot
