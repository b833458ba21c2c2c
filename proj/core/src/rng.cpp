#include "mcvd/rng.hpp"

namespace mcvd::rng {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

std::array<std::uint64_t, 4> derive_state(std::uint64_t seed, std::uint32_t replication,
                                          std::uint32_t molecule) noexcept {
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  const auto lo = Philox4x32::block({0u, 0u, molecule, replication}, key);
  const auto hi = Philox4x32::block({1u, 0u, molecule, replication}, key);
  const auto join = [](std::uint32_t a, std::uint32_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
  };
  std::array<std::uint64_t, 4> state{join(lo[0], lo[1]), join(lo[2], lo[3]), join(hi[0], hi[1]),
                                     join(hi[2], hi[3])};
  // xoshiro must not start from the all-zero state.
  if ((state[0] | state[1] | state[2] | state[3]) == 0) {
    state[0] = 0x9E3779B97F4A7C15ull;
  }
  return state;
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter c, Key k) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

MoleculeStream::MoleculeStream(std::uint64_t seed, std::uint32_t replication,
                               std::uint32_t molecule) noexcept
    : engine_(derive_state(seed, replication, molecule)) {}

}  // namespace mcvd::rng
