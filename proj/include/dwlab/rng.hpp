#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace dwlab {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
/// Maps a 128-bit counter and a 64-bit key to 128 pseudo-random bits.
inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                  std::array<std::uint32_t, 2> key) noexcept {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

/// Identifies one independent random stream: a master seed plus a stream index
/// (typically the replication index). Two substreams with different indices never
/// share a Philox block.
struct Substream {
  std::uint64_t master_seed = 0;
  std::uint64_t stream = 0;

  friend bool operator==(const Substream&, const Substream&) = default;
};

/// Counter-based engine over one substream. Satisfies UniformRandomBitGenerator.
/// The master seed is the Philox key, the stream index fills the upper half of the
/// counter and the lower half counts blocks, so draws depend only on
/// (master_seed, stream, position) and never on scheduling.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(Substream s) noexcept
      : key_{static_cast<std::uint32_t>(s.master_seed), static_cast<std::uint32_t>(s.master_seed >> 32)},
        stream_lo_(static_cast<std::uint32_t>(s.stream)),
        stream_hi_(static_cast<std::uint32_t>(s.stream >> 32)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (slot_ == 2) refill();
    return buffer_[slot_++];
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t blocks_used() const noexcept { return block_; }

 private:
  void refill() noexcept {
    const auto out = philox4x32_10(
        {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32), stream_lo_, stream_hi_}, key_);
    ++block_;
    buffer_[0] = (std::uint64_t{out[1]} << 32) | out[0];
    buffer_[1] = (std::uint64_t{out[3]} << 32) | out[2];
    slot_ = 0;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint32_t stream_lo_;
  std::uint32_t stream_hi_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int slot_ = 2;
};

}  // namespace dwlab
