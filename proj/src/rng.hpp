#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string_view>
#include <vector>

namespace scorelens {

// All randomized behaviour in the library goes through this wrapper.
// std::mt19937_64 output is fully specified by the standard, and the bounded
// draw below avoids std::uniform_int_distribution (whose mapping is
// implementation-defined), so identical seeds give identical results on every
// platform and build.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // Unbiased draw in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v;
    do {
      v = eng_();
    } while (v >= limit);
    return v % n;
  }

  // Uniform double in [0, 1) with 53 bits of precision.
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller (polar form avoided to keep the draw
  // count per variate fixed at two).
  double normal() {
    double u1 = unit();
    while (u1 <= 0.0) u1 = unit();
    const double u2 = unit();
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct indices from [0, n), returned in ascending order.
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    for (std::size_t i = 0; i < k && i + 1 < n; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(below(n - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(std::min(k, n));
    std::sort(pool.begin(), pool.end());
    return pool;
  }

 private:
  std::mt19937_64 eng_;
};

// FNV-1a over arbitrary bytes; stable across platforms.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Derives an independent per-item stream seed from a master seed and labels
// (essay id, intervention kind, iteration index, ...). Results are therefore
// independent of scheduling or processing order.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view a, std::string_view b = {}) {
  std::uint64_t h = fnv1a64(a);
  h = fnv1a64("\x1f", h);
  h = fnv1a64(b, h);
  for (int i = 0; i < 8; ++i) {
    h ^= (master >> (8 * i)) & 0xff;
    h *= 0x100000001b3ull;
  }
  // splitmix64 finalizer to spread low-entropy inputs
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ull;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebull;
  h ^= h >> 31;
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view a, std::uint64_t index) {
  char buf[21];
  int n = std::snprintf(buf, sizeof buf, "%llu", static_cast<unsigned long long>(index));
  return derive_seed(master, a, std::string_view(buf, static_cast<std::size_t>(n)));
}

}  // namespace scorelens
