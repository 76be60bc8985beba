#pragma once

#include <array>
#include <cstdint>

namespace gbf {

// Philox4x32-10 counter-based generator (Salmon et al., "Parallel random
// numbers: as easy as 1, 2, 3").  Pure function of (counter, key): any block
// of any stream can be regenerated in isolation, which is what makes
// replications re-runnable and aggregation order-independent.
struct Philox4x32 {
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) noexcept {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
      const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }
};

// A stream is keyed by (seed, purpose, rep); successive blocks advance a
// 64-bit block counter.  Draw order within a stream is fixed by the callers.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint32_t purpose, std::uint32_t rep) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        purpose_(purpose),
        rep_(rep) {}

  std::uint32_t next_u32() noexcept {
    if (pos_ == 4) refill();
    return buf_[pos_++];
  }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (-1, 1).
  double uniform_pm1() noexcept { return 2.0 * uniform() - 1.0; }

  // Standard normal via Box-Muller; caches the paired draw.
  double normal() noexcept;

 private:
  void refill() noexcept {
    buf_ = Philox4x32::block({static_cast<std::uint32_t>(block_),
                              static_cast<std::uint32_t>(block_ >> 32), purpose_, rep_},
                             key_);
    ++block_;
    pos_ = 0;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint32_t purpose_;
  std::uint32_t rep_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Stream purposes used by the simulation harness.
inline constexpr std::uint32_t kStreamDesign = 0;
inline constexpr std::uint32_t kStreamResponse = 1;

}  // namespace gbf
