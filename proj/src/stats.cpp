#include "stats.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "error.hpp"
#include "rng.hpp"

namespace scorelens::stats {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw ValidationError("mean of empty sample");
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw ValidationError("sample variance needs n >= 2");
  const double m = mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return acc / static_cast<double>(xs.size() - 1);
}

double cohens_d(std::span<const double> or_values, std::span<const double> cf_values) {
  if (or_values.size() < 2 || cf_values.size() < 2)
    throw ValidationError("cohens_d needs n >= 2 per group");
  const double n_or = static_cast<double>(or_values.size());
  const double n_cf = static_cast<double>(cf_values.size());
  const double mean_or = mean(or_values);
  const double mean_cf = mean(cf_values);
  const double var_or = sample_variance(or_values);
  const double var_cf = sample_variance(cf_values);
  const double pooled =
      std::sqrt(((n_or - 1.0) * var_or + (n_cf - 1.0) * var_cf) / (n_or + n_cf - 2.0));
  if (pooled == 0.0) {
    if (mean_or == mean_cf) return 0.0;
    throw ValidationError("cohens_d: zero pooled spread with unequal means");
  }
  return (mean_cf - mean_or) / pooled;
}

double qwk(std::span<const int> gold, std::span<const int> pred, int n_categories) {
  if (gold.size() != pred.size() || gold.empty())
    throw ValidationError("qwk needs equal-length non-empty label vectors");
  if (n_categories < 1) throw ValidationError("qwk needs at least one category");
  const std::size_t k = static_cast<std::size_t>(n_categories);
  std::vector<double> observed(k * k, 0.0);
  std::vector<double> marg_gold(k, 0.0), marg_pred(k, 0.0);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] < 0 || gold[i] >= n_categories || pred[i] < 0 || pred[i] >= n_categories)
      throw ValidationError("qwk: label outside the category set");
    observed[static_cast<std::size_t>(gold[i]) * k + static_cast<std::size_t>(pred[i])] += 1.0;
    marg_gold[static_cast<std::size_t>(gold[i])] += 1.0;
    marg_pred[static_cast<std::size_t>(pred[i])] += 1.0;
  }
  const double n = static_cast<double>(gold.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double w = k == 1 ? 0.0
                              : (static_cast<double>(i) - static_cast<double>(j)) *
                                    (static_cast<double>(i) - static_cast<double>(j)) /
                                    (static_cast<double>(k - 1) * static_cast<double>(k - 1));
      num += w * observed[i * k + j];
      den += w * marg_gold[i] * marg_pred[j] / n;
    }
  }
  if (den == 0.0) return 1.0;  // zero expected disagreement: single category on both sides
  return 1.0 - num / den;
}

double weighted_f1(std::span<const int> gold, std::span<const int> pred, int n_classes) {
  if (gold.size() != pred.size() || gold.empty())
    throw ValidationError("weighted_f1 needs equal-length non-empty label vectors");
  const std::size_t k = static_cast<std::size_t>(n_classes);
  std::vector<double> tp(k, 0.0), fp(k, 0.0), fn(k, 0.0), support(k, 0.0);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] < 0 || gold[i] >= n_classes || pred[i] < 0 || pred[i] >= n_classes)
      throw ValidationError("weighted_f1: label outside the class set");
    const auto g = static_cast<std::size_t>(gold[i]);
    const auto p = static_cast<std::size_t>(pred[i]);
    support[g] += 1.0;
    if (g == p) {
      tp[g] += 1.0;
    } else {
      fn[g] += 1.0;
      fp[p] += 1.0;
    }
  }
  double acc = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    if (support[c] == 0.0) continue;
    const double denom = 2.0 * tp[c] + fp[c] + fn[c];
    const double f1 = denom == 0.0 ? 0.0 : 2.0 * tp[c] / denom;
    acc += f1 * support[c];
  }
  return acc / static_cast<double>(gold.size());
}

double rmse(std::span<const double> gold, std::span<const double> pred) {
  if (gold.size() != pred.size() || gold.empty())
    throw ValidationError("rmse needs equal-length non-empty vectors");
  double acc = 0.0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const double d = gold[i] - pred[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(gold.size()));
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw ValidationError("quantile of empty sample");
  if (sorted.size() == 1) return sorted[0];
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

BootstrapSummary bootstrap_summary(std::span<const double> deltas, int iterations, double level,
                                   std::uint64_t seed, int threads) {
  if (deltas.empty()) throw ValidationError("bootstrap_summary: empty sample");
  if (iterations < 1) throw ValidationError("bootstrap_summary: iterations must be >= 1");
  const std::size_t n = deltas.size();
  std::vector<double> means(static_cast<std::size_t>(iterations), 0.0);

  auto run_range = [&](int begin, int end) {
    for (int it = begin; it < end; ++it) {
      Rng rng(derive_seed(seed, "bootstrap", static_cast<std::uint64_t>(it)));
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += deltas[static_cast<std::size_t>(rng.below(n))];
      means[static_cast<std::size_t>(it)] = acc / static_cast<double>(n);
    }
  };

  const int nthreads = std::max(1, threads);
  if (nthreads == 1) {
    run_range(0, iterations);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (iterations + nthreads - 1) / nthreads;
    for (int t = 0; t < nthreads; ++t) {
      const int b = t * chunk;
      const int e = std::min(iterations, b + chunk);
      if (b >= e) break;
      pool.emplace_back(run_range, b, e);
    }
    for (auto& th : pool) th.join();
  }

  int le = 0, ge = 0;
  for (double m : means) {
    if (m <= 0.0) ++le;
    if (m >= 0.0) ++ge;
  }
  std::sort(means.begin(), means.end());

  BootstrapSummary s;
  s.n = static_cast<int>(n);
  s.iterations = iterations;
  s.mean = mean(deltas);
  const double alpha = (1.0 - level) / 2.0;
  s.ci_low = quantile_sorted(means, alpha);
  s.ci_high = quantile_sorted(means, 1.0 - alpha);
  const double fl = static_cast<double>(le) / static_cast<double>(iterations);
  const double fg = static_cast<double>(ge) / static_cast<double>(iterations);
  s.p = std::clamp(2.0 * std::min(fl, fg), 2.0 / static_cast<double>(iterations), 1.0);
  s.significant = s.p <= 0.01;
  return s;
}

}  // namespace scorelens::stats
