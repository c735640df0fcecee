#pragma once

#include <cstdint>

namespace treedpp {

// PCG32 (XSH-RR 64/32). Distinct stream ids give independent sequences for
// the same seed; replicas use their index as the stream.
class Pcg32 {
 public:
  using result_type = std::uint32_t;

  Pcg32(std::uint64_t seed, std::uint64_t stream = 0) {
    inc_ = (stream << 1U) | 1U;
    state_ = 0;
    next();
    state_ += seed;
    next();
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xffffffffU; }
  result_type operator()() { return next(); }

  result_type next() {
    const std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    const auto xorshifted = std::uint32_t(((old >> 18U) ^ old) >> 27U);
    const auto rot = std::uint32_t(old >> 59U);
    return (xorshifted >> rot) | (xorshifted << ((32U - rot) & 31U));
  }

  // Uniform on [0, 1) from 53 random bits.
  double uniform() {
    const std::uint64_t hi = next();
    const std::uint64_t lo = next();
    return double(((hi << 32U) | lo) >> 11U) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
};

}  // namespace treedpp
