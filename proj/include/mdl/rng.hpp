#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

#include <Eigen/Dense>

namespace mdl {

namespace detail {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-based generator: the i-th output is a pure function of (key, i),
/// so any substream can be reproduced without replaying the others.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    ++counter_;
    return detail::mix64(key_ ^ detail::mix64(counter_ * 0xD1B54A32D192ED03ULL));
  }

  std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Derives the key for substream `path` (e.g. {trial, purpose}) of `seed`.
inline std::uint64_t substream_key(std::uint64_t seed,
                                   std::initializer_list<std::uint64_t> path) {
  std::uint64_t key = detail::mix64(seed ^ 0x6A09E667F3BCC909ULL);
  for (std::uint64_t id : path) key = detail::mix64(key ^ detail::mix64(id + 0x3C6EF372FE94F82BULL));
  return key;
}

inline CounterRng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  return CounterRng(substream_key(seed, path));
}

/// Standard normal draws. Uses Box-Muller directly on the engine so the
/// stream does not depend on the standard library's distribution internals.
class NormalSampler {
 public:
  explicit NormalSampler(CounterRng rng) noexcept : rng_(rng) {}

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // 53-bit uniforms in (0, 1].
    const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  Eigen::VectorXd vector(Eigen::Index size) {
    Eigen::VectorXd v(size);
    for (Eigen::Index i = 0; i < size; ++i) v[i] = (*this)();
    return v;
  }

  Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    // Row-major fill so row i of a design depends only on draws for rows < i.
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = (*this)();
    return m;
  }

 private:
  CounterRng rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mdl
