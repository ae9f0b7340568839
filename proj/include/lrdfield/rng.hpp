#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace lrdfield {

/// Philox4x64-10 counter-based generator (Salmon et al., Random123).
/// A (counter, key) pair maps to four 64-bit words; streams never overlap
/// as long as their keys or counters differ.
class Philox4x64 {
 public:
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static Counter block(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      ctr = single_round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
  static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
  static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

  static Counter single_round(const Counter& c, const Key& k) noexcept {
    const unsigned __int128 p0 = static_cast<unsigned __int128>(kMul0) * c[0];
    const unsigned __int128 p1 = static_cast<unsigned __int128>(kMul1) * c[2];
    const auto hi0 = static_cast<std::uint64_t>(p0 >> 64);
    const auto lo0 = static_cast<std::uint64_t>(p0);
    const auto hi1 = static_cast<std::uint64_t>(p1 >> 64);
    const auto lo1 = static_cast<std::uint64_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/// Deterministic child seed from (parent, a, b); used to give every
/// realization and arm of an experiment its own key.
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t a, std::uint64_t b) {
  return Philox4x64::block({a, b, 0x5EEDULL, 0}, {parent, 0xD1CE5EEDULL})[0];
}

/// Stream of standard normal variates keyed by (seed, stream) with an
/// independent substream index; counter word 0 walks through blocks.
/// Box-Muller on 53-bit uniforms keeps output identical across platforms
/// with the same libm (std::normal_distribution is implementation-defined).
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0)
      : key_{seed, stream}, substream_(substream) {}

  double uniform() noexcept {
    if (pos_ == 4) refill();
    const std::uint64_t bits = buffer_[pos_++] >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;  // in (0, 1)
  }

  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  void refill() noexcept {
    buffer_ = Philox4x64::block({block_++, substream_, 0, 0}, key_);
    pos_ = 0;
  }

  Philox4x64::Key key_;
  std::uint64_t substream_;
  std::uint64_t block_ = 0;
  Philox4x64::Counter buffer_{};
  int pos_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace lrdfield
