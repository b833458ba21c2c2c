#pragma once

#include <array>
#include <cstdint>

#include <boost/random/normal_distribution.hpp>

namespace mcvd::rng {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Stateless:
/// the output block is a pure function of (counter, key).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter counter, Key key) noexcept;
};

/// xoshiro256++ (Blackman & Vigna). Satisfies UniformRandomBitGenerator.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(const std::array<std::uint64_t, 4>& state) noexcept : s_(state) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> s_;
};

/// Random stream of one molecule in one replication. Its 256-bit state is
/// the Philox image of the counter (replication, molecule) under the run
/// seed, so every molecule owns an independent, addressable stream and the
/// draws never depend on which thread simulates it.
class MoleculeStream {
 public:
  MoleculeStream(std::uint64_t seed, std::uint32_t replication, std::uint32_t molecule) noexcept;

  std::uint64_t bits() noexcept { return engine_(); }
  /// Uniform double in (0, 1], 53-bit resolution.
  double uniform() noexcept { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }
  /// Standard normal variate (ziggurat).
  double normal() noexcept { return normal_(engine_); }

 private:
  Xoshiro256pp engine_;
  boost::random::normal_distribution<double> normal_;
};

}  // namespace mcvd::rng
