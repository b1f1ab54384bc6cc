#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace edgesim {

// splitmix64 finalizer
constexpr uint64_t mix64(uint64_t aValue) noexcept {
  aValue += 0x9e3779b97f4a7c15ULL;
  aValue = (aValue ^ (aValue >> 30)) * 0xbf58476d1ce4e5b9ULL;
  aValue = (aValue ^ (aValue >> 27)) * 0x94d049bb133111ebULL;
  return aValue ^ (aValue >> 31);
}

//! FNV-1a, stable across platforms (unlike std::hash).
constexpr uint64_t stableHash(std::string_view aText) noexcept {
  uint64_t ret = 0xcbf29ce484222325ULL;
  for (const auto c : aText) {
    ret ^= static_cast<unsigned char>(c);
    ret *= 0x100000001b3ULL;
  }
  return ret;
}

constexpr uint64_t combineKeys(const uint64_t aLhs, const uint64_t aRhs) noexcept {
  return mix64(aLhs ^ mix64(aRhs + 0x632be59bd9b4e019ULL));
}

/**
 * Counter-based random stream: the i-th draw is a pure function of (key, i),
 * so results do not depend on the standard library's distributions or on
 * the order in which streams are created.
 */
class CounterRng {
 public:
  explicit CounterRng(const uint64_t aKey) noexcept
      : theKey(aKey)
      , theCounter(0) {
  }

  uint64_t nextU64() noexcept {
    return mix64(theKey ^ mix64(theCounter++));
  }

  //! Uniform in [0, 1) with 53 bits of resolution.
  double uniform() noexcept {
    return static_cast<double>(nextU64() >> 11) * 0x1.0p-53;
  }

  //! Uniform integer in [0, aBound), aBound > 0.
  uint64_t below(const uint64_t aBound) noexcept {
    // Lemire's multiply-shift; bias is below 2^-64 * aBound
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(nextU64()) * aBound) >> 64);
  }

  //! Exponential variate with the given mean, by inverse transform.
  double exponential(const double aMean) noexcept {
    return -aMean * std::log1p(-uniform());
  }

  uint64_t draws() const noexcept {
    return theCounter;
  }
  uint64_t key() const noexcept {
    return theKey;
  }

 private:
  uint64_t theKey;
  uint64_t theCounter;
};

} // namespace edgesim
