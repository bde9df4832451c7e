#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace scorelens::stats {

double mean(std::span<const double> xs);
// Sample variance with n-1 denominator.
double sample_variance(std::span<const double> xs);

// Standardized mean difference (cf - or) / pooled sd, variances pooled with
// n-1 weights. Zero spread with equal means yields 0; zero spread with
// unequal means is a degenerate-spread ValidationError.
double cohens_d(std::span<const double> or_values, std::span<const double> cf_values);

// Quadratic weighted kappa over ordinal categories 0..k-1. Both label vectors
// must contain values in range. All-agreement with zero expected disagreement
// is defined as 1.0.
double qwk(std::span<const int> gold, std::span<const int> pred, int n_categories);

// Support-weighted mean of per-class F1 scores; classes absent from gold get
// weight 0, undefined per-class F1 counts as 0.
double weighted_f1(std::span<const int> gold, std::span<const int> pred, int n_classes);

double rmse(std::span<const double> gold, std::span<const double> pred);

struct BootstrapSummary {
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double p = 1.0;
  bool significant = false;  // p <= 0.01
  int n = 0;
  int iterations = 0;
};

// Percentile bootstrap over resampled means. Each iteration draws its RNG
// stream from (seed, iteration index), so the summary is bit-identical for
// any thread count. p is the two-sided sign-crossing value
// 2*min(frac<=0, frac>=0), clipped to [2/iterations, 1].
BootstrapSummary bootstrap_summary(std::span<const double> deltas, int iterations,
                                   double level, std::uint64_t seed, int threads = 1);

// Linear-interpolation quantile of a sorted vector (same convention as the
// default in most numeric packages).
double quantile_sorted(const std::vector<double>& sorted, double q);

}  // namespace scorelens::stats
