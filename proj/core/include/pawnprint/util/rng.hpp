#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace pawnprint {

// SplitMix64. Small, fast, passes BigCrush, and trivially portable: the
// toolkit's reproducibility guarantees (same seed => same bytes on any
// machine) rule out std::mt19937 + std::*_distribution, whose outputs are
// implementation defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n) without modulo bias (rejection sampling).
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (the cached second value is dropped so
  // the stream position stays a simple function of call count).
  double next_gaussian() {
    double u1;
    do {
      u1 = next_double();
    } while (u1 <= 0.0);
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

// Mixes several seed components into one 64-bit stream seed. Used to build
// counter-based streams: derive_seed(seed, step, lane) gives every training
// step an independent generator, which makes sampling resumable and
// independent of thread count by construction.
inline std::uint64_t derive_seed(std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
  Rng mix(a ^ 0x6a09e667f3bcc909ULL);
  std::uint64_t s = mix.next_u64();
  s ^= b + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
  Rng mix2(s);
  s = mix2.next_u64();
  s ^= c + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
  Rng mix3(s);
  return mix3.next_u64();
}

// Weighted index draw by inverse CDF over an explicit cumulative sum.
// Weights must be nonnegative with a positive total.
class WeightedPicker {
 public:
  explicit WeightedPicker(std::span<const double> weights) {
    cumulative_.reserve(weights.size());
    double acc = 0.0;
    for (double w : weights) {
      acc += w;
      cumulative_.push_back(acc);
    }
    total_ = acc;
  }

  bool valid() const { return total_ > 0.0; }
  double total() const { return total_; }

  std::size_t pick(Rng& rng) const {
    const double u = rng.next_double() * total_;
    std::size_t lo = 0, hi = cumulative_.size();
    while (lo + 1 < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cumulative_[mid - 1] > u) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    return lo;
  }

 private:
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

}  // namespace pawnprint
