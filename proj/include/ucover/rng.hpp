#pragma once

// Philox4x64-10 counter-based generator (Salmon et al., SC'11). Streams are
// keyed by (master seed, trial id), so any trial can be regenerated on its own
// and in any order.

#include <array>
#include <cstdint>

namespace ucover {

using Philox4x64Block = std::array<std::uint64_t, 4>;

namespace detail {

__extension__ using uint128 = unsigned __int128;

inline void mulhilo64(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const uint128 p = static_cast<uint128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

}  // namespace detail

/// One Philox4x64 block with 10 rounds; matches the Random123 reference and
/// numpy's PhiloxGenerator bit for bit.
inline Philox4x64Block philox4x64_10(Philox4x64Block ctr, std::array<std::uint64_t, 2> key) {
  constexpr std::uint64_t M0 = 0xD2E7470EE14C6C93ULL;
  constexpr std::uint64_t M1 = 0xCA5A826395121157ULL;
  constexpr std::uint64_t W0 = 0x9E3779B97F4A7C15ULL;
  constexpr std::uint64_t W1 = 0xBB67AE8584CAA73BULL;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += W0;
      key[1] += W1;
    }
    std::uint64_t hi0, lo0, hi1, lo1;
    detail::mulhilo64(M0, ctr[0], hi0, lo0);
    detail::mulhilo64(M1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double to_unit_double(std::uint64_t w) { return static_cast<double>(w >> 11) * 0x1.0p-53; }

/// Random-access stream of uniforms under key (seed, stream). Word i is word
/// i % 4 of the block at counter (i / 4 + 1, 0, 0, 0); the +1 follows numpy,
/// which bumps the counter before each block, so the stream equals
/// numpy.random.Philox(key=[seed, stream]).random_raw().
class PhiloxStream {
 public:
  PhiloxStream(std::uint64_t seed, std::uint64_t stream) : key_{seed, stream} {}

  std::uint64_t raw(std::uint64_t i) {
    const std::uint64_t block = i / 4;
    if (!cached_ || block != block_) {
      words_ = philox4x64_10({block + 1, 0, 0, 0}, key_);
      block_ = block;
      cached_ = true;
    }
    return words_[i % 4];
  }

  double uniform(std::uint64_t i) { return to_unit_double(raw(i)); }

 private:
  std::array<std::uint64_t, 2> key_;
  Philox4x64Block words_{};
  std::uint64_t block_ = 0;
  bool cached_ = false;
};

/// Sequential reader over a PhiloxStream.
class PhiloxEngine {
 public:
  PhiloxEngine(std::uint64_t seed, std::uint64_t stream) : stream_(seed, stream) {}

  double uniform() { return stream_.uniform(next_++); }
  std::uint64_t raw() { return stream_.raw(next_++); }

 private:
  PhiloxStream stream_;
  std::uint64_t next_ = 0;
};

}  // namespace ucover
