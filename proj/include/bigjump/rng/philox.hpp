#pragma once

#include <array>
#include <cstdint>

namespace bigjump::rng {

// Philox4x32-10 block function: a keyed bijection on 128-bit counters.
using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

inline Counter philox4x32_10(Counter ctr, Key key) {
  constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
  constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t(m0) * ctr[0];
    const std::uint64_t p1 = std::uint64_t(m1) * ctr[2];
    ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1), std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1],
           std::uint32_t(p0)};
    key[0] += w0;
    key[1] += w1;
  }
  return ctr;
}

// Uniform stream for one (seed, stream, index) triple. Draws are
// numbered; draw d of a given triple is always the same value, whatever
// thread or order produced it.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint32_t stream, std::uint64_t index)
      : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)}, stream_(stream), index_(index) {}

  // Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() {
    if (pos_ == 2) refill();
    const std::uint64_t bits = words_[pos_++] >> 11;
    return (double(bits) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t next_u64() {
    if (pos_ == 2) refill();
    return words_[pos_++];
  }

 private:
  void refill() {
    // Counter layout: [index lo, index hi, block, stream].
    const Counter c{std::uint32_t(index_), std::uint32_t(index_ >> 32), block_, stream_};
    const Counter r = philox4x32_10(c, key_);
    words_[0] = (std::uint64_t(r[1]) << 32) | r[0];
    words_[1] = (std::uint64_t(r[3]) << 32) | r[2];
    ++block_;
    pos_ = 0;
  }

  Key key_;
  std::uint32_t stream_;
  std::uint64_t index_;
  std::uint32_t block_ = 0;
  std::uint64_t words_[2] = {0, 0};
  int pos_ = 2;
};

}  // namespace bigjump::rng
