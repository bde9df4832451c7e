#include <doctest.h>

#include <cmath>
#include <vector>

#include "error.hpp"
#include "rng.hpp"
#include "stats.hpp"

using namespace scorelens;
using namespace scorelens::stats;

// ---------------------------------------------------------------------------
// Independent oracles, written against the formulas directly. They share no
// code with the implementation beyond the standard library.

namespace oracle {

double mean(const std::vector<double>& xs) {
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double cohens_d(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean(a), mb = mean(b);
  double va = 0, vb = 0;
  for (double x : a) va += (x - ma) * (x - ma);
  for (double x : b) vb += (x - mb) * (x - mb);
  va /= static_cast<double>(a.size() - 1);
  vb /= static_cast<double>(b.size() - 1);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double pooled = std::sqrt(((na - 1) * va + (nb - 1) * vb) / (na + nb - 2));
  return (mb - ma) / pooled;
}

// Contingency-table QWK straight from the definition.
double qwk(const std::vector<int>& gold, const std::vector<int>& pred, int k) {
  std::vector<std::vector<double>> O(k, std::vector<double>(k, 0));
  std::vector<double> rg(k, 0), rp(k, 0);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    O[gold[i]][pred[i]] += 1;
    rg[gold[i]] += 1;
    rp[pred[i]] += 1;
  }
  const double n = static_cast<double>(gold.size());
  double num = 0, den = 0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const double w = static_cast<double>((i - j) * (i - j)) / ((k - 1) * (k - 1));
      num += w * O[i][j];
      den += w * rg[i] * rp[j] / n;
    }
  }
  return den == 0 ? 1.0 : 1.0 - num / den;
}

// Confusion-matrix weighted F1.
double weighted_f1(const std::vector<int>& gold, const std::vector<int>& pred, int k) {
  double acc = 0;
  for (int c = 0; c < k; ++c) {
    double tp = 0, fp = 0, fn = 0, support = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if (gold[i] == c) ++support;
      if (gold[i] == c && pred[i] == c) ++tp;
      if (gold[i] != c && pred[i] == c) ++fp;
      if (gold[i] == c && pred[i] != c) ++fn;
    }
    const double prec = tp + fp == 0 ? 0 : tp / (tp + fp);
    const double rec = tp + fn == 0 ? 0 : tp / (tp + fn);
    const double f1 = prec + rec == 0 ? 0 : 2 * prec * rec / (prec + rec);
    acc += f1 * support;
  }
  return acc / static_cast<double>(gold.size());
}

double rmse(const std::vector<double>& g, const std::vector<double>& p) {
  double s = 0;
  for (std::size_t i = 0; i < g.size(); ++i) s += (g[i] - p[i]) * (g[i] - p[i]);
  return std::sqrt(s / static_cast<double>(g.size()));
}

}  // namespace oracle

TEST_CASE("cohens_d fixed fixture") {
  const std::vector<double> a{1, 2, 3}, b{2, 3, 4};
  CHECK(cohens_d(a, b) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("cohens_d identical samples") {
  const std::vector<double> a{1, 2, 3};
  CHECK(cohens_d(a, a) == 0.0);
}

TEST_CASE("cohens_d degenerate spread") {
  const std::vector<double> a{2, 2, 2}, b{3, 3, 3};
  CHECK_THROWS_AS(cohens_d(a, b), ValidationError);
  const std::vector<double> c{2, 2, 2};
  CHECK(cohens_d(a, c) == 0.0);
}

TEST_CASE("cohens_d antisymmetry and scale equivariance") {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> a, b;
    const std::size_t na = 2 + rng.below(20), nb = 2 + rng.below(20);
    for (std::size_t i = 0; i < na; ++i) a.push_back(rng.unit() * 10);
    for (std::size_t i = 0; i < nb; ++i) b.push_back(rng.unit() * 10 + 1);
    const double d = cohens_d(a, b);
    CHECK(cohens_d(b, a) == doctest::Approx(-d).epsilon(1e-12));
    std::vector<double> a2 = a, b2 = b;
    for (auto& x : a2) x = 3.0 * x + 7.0;
    for (auto& x : b2) x = 3.0 * x + 7.0;
    CHECK(cohens_d(a2, b2) == doctest::Approx(d).epsilon(1e-9));
  }
}

TEST_CASE("cohens_d matches the direct-formula oracle on 200 random pairs") {
  Rng rng(42);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> a, b;
    const std::size_t na = 2 + rng.below(40), nb = 2 + rng.below(40);
    for (std::size_t i = 0; i < na; ++i) a.push_back(rng.normal() * 2.0 + 1.0);
    for (std::size_t i = 0; i < nb; ++i) b.push_back(rng.normal() * 1.5);
    CHECK(cohens_d(a, b) == doctest::Approx(oracle::cohens_d(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("qwk fixtures") {
  CHECK(qwk(std::vector<int>{0, 1, 2}, std::vector<int>{0, 1, 2}, 3) == 1.0);
  CHECK(qwk(std::vector<int>{0, 1, 2}, std::vector<int>{2, 1, 0}, 3) ==
        doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(qwk(std::vector<int>{1, 1}, std::vector<int>{1, 1}, 3) == 1.0);
}

TEST_CASE("qwk symmetry and relabeling invariance") {
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    const int k = 3 + static_cast<int>(rng.below(4));
    std::vector<int> g, p;
    const std::size_t n = 5 + rng.below(50);
    for (std::size_t i = 0; i < n; ++i) {
      g.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(k))));
      p.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(k))));
    }
    CHECK(qwk(g, p, k) == doctest::Approx(qwk(p, g, k)).epsilon(1e-12));
  }
}

TEST_CASE("qwk matches the contingency oracle on 100 random cases") {
  Rng rng(13);
  for (int t = 0; t < 100; ++t) {
    const int k = 2 + static_cast<int>(rng.below(8));
    std::vector<int> g, p;
    const std::size_t n = 2 + rng.below(80);
    for (std::size_t i = 0; i < n; ++i) {
      g.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(k))));
      p.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(k))));
    }
    CHECK(qwk(g, p, k) == doctest::Approx(oracle::qwk(g, p, k)).epsilon(1e-12));
  }
}

TEST_CASE("qwk rejects labels outside the category set") {
  CHECK_THROWS_AS(qwk(std::vector<int>{0, 3}, std::vector<int>{0, 1}, 3), ValidationError);
}

TEST_CASE("weighted_f1 fixtures") {
  CHECK(weighted_f1(std::vector<int>{0, 1, 2}, std::vector<int>{0, 1, 2}, 3) == 1.0);
  // gold AABB, pred AAAA: F1(A) = 2/3 on half the weight, F1(B) = 0
  CHECK(weighted_f1(std::vector<int>{0, 0, 1, 1}, std::vector<int>{0, 0, 0, 0}, 2) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("weighted_f1 matches the confusion-matrix oracle on 100 random cases") {
  Rng rng(29);
  for (int t = 0; t < 100; ++t) {
    const int k = 2 + static_cast<int>(rng.below(5));
    std::vector<int> g, p;
    const std::size_t n = 1 + rng.below(60);
    for (std::size_t i = 0; i < n; ++i) {
      g.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(k))));
      p.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(k))));
    }
    CHECK(weighted_f1(g, p, k) == doctest::Approx(oracle::weighted_f1(g, p, k)).epsilon(1e-12));
  }
}

TEST_CASE("rmse fixtures and properties") {
  CHECK(rmse(std::vector<double>{1, 2}, std::vector<double>{1, 2}) == 0.0);
  CHECK(rmse(std::vector<double>{3.5, 3.5}, std::vector<double>{3.0, 4.0}) ==
        doctest::Approx(0.5).epsilon(1e-15));
  Rng rng(31);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> g, p;
    const std::size_t n = 1 + rng.below(50);
    for (std::size_t i = 0; i < n; ++i) {
      g.push_back(rng.unit() * 4 + 1);
      p.push_back(rng.unit() * 4 + 1);
    }
    const double r = rmse(g, p);
    CHECK(r == doctest::Approx(oracle::rmse(g, p)).epsilon(1e-12));
    CHECK(rmse(p, g) == doctest::Approx(r).epsilon(1e-15));
    CHECK(r >= 0.0);
  }
}

TEST_CASE("bootstrap constant deltas give a point interval and significance") {
  const std::vector<double> deltas(50, 0.5);
  const auto s = bootstrap_summary(deltas, 1000, 0.95, 99);
  CHECK(s.mean == 0.5);
  CHECK(s.ci_low == 0.5);
  CHECK(s.ci_high == 0.5);
  CHECK(s.significant);
}

TEST_CASE("bootstrap all-zero deltas are not significant") {
  const std::vector<double> deltas(50, 0.0);
  const auto s = bootstrap_summary(deltas, 1000, 0.95, 99);
  CHECK(s.mean == 0.0);
  CHECK(s.p == 1.0);
  CHECK_FALSE(s.significant);
}

TEST_CASE("bootstrap is bit-reproducible across runs and thread counts") {
  Rng rng(5);
  std::vector<double> deltas;
  for (int i = 0; i < 200; ++i) deltas.push_back(rng.normal());
  const auto a = bootstrap_summary(deltas, 2000, 0.95, 7, 1);
  const auto b = bootstrap_summary(deltas, 2000, 0.95, 7, 1);
  const auto c = bootstrap_summary(deltas, 2000, 0.95, 7, 4);
  CHECK(a.ci_low == b.ci_low);
  CHECK(a.ci_high == b.ci_high);
  CHECK(a.p == b.p);
  CHECK(a.ci_low == c.ci_low);
  CHECK(a.ci_high == c.ci_high);
  CHECK(a.p == c.p);
}

TEST_CASE("bootstrap CI bounds bracket the sample mean") {
  Rng rng(17);
  for (int t = 0; t < 10; ++t) {
    std::vector<double> deltas;
    const std::size_t n = 10 + rng.below(200);
    for (std::size_t i = 0; i < n; ++i) deltas.push_back(rng.normal() * (1 + rng.unit()));
    const auto s = bootstrap_summary(deltas, 2000, 0.95, 1000 + t);
    CHECK(s.ci_low <= s.mean);
    CHECK(s.mean <= s.ci_high);
  }
}

TEST_CASE("bootstrap empty sample is an error") {
  CHECK_THROWS_AS(bootstrap_summary({}, 100, 0.95, 1), ValidationError);
}

// Coverage experiment: 95% CIs from n=100 normal samples with known mean must
// cover it about 95% of the time. Uses reduced iterations per trial to keep
// the unit suite fast; the acceptance suite runs the full-size version.
TEST_CASE("bootstrap coverage is near nominal") {
  const double mu = 0.3;
  int covered = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(123, "coverage-unit", static_cast<std::uint64_t>(t)));
    std::vector<double> sample;
    for (int i = 0; i < 100; ++i) sample.push_back(mu + rng.normal());
    const auto s = bootstrap_summary(sample, 1000, 0.95, derive_seed(7, "bs", t));
    if (s.ci_low <= mu && mu <= s.ci_high) ++covered;
  }
  const double rate = static_cast<double>(covered) / trials;
  CHECK(rate >= 0.90);
  CHECK(rate <= 0.99);
}
