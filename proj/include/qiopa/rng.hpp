#pragma once

// Counter-based random streams. Every shot draws from its own stream keyed
// by (seed, phase index, shot index), so results do not depend on how shots
// are scheduled across threads.

#include <array>
#include <cstdint>
#include <limits>

namespace qiopa {

// Philox4x32 with 10 rounds (Salmon et al., SC'11).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) noexcept;
};

// UniformRandomBitGenerator over one Philox stream. The 128-bit counter is
// (block index lo, block index hi, stream lo, stream hi).
class CounterStream {
 public:
  using result_type = std::uint32_t;

  CounterStream(std::uint64_t seed, std::uint32_t stream_hi, std::uint32_t stream_lo) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept;

  std::uint64_t blocks_used() const noexcept { return block_index_; }

 private:
  void refill() noexcept;

  Philox4x32::Key key_;
  std::uint32_t stream_hi_;
  std::uint32_t stream_lo_;
  std::uint64_t block_index_ = 0;
  Philox4x32::Counter buffer_{};
  unsigned next_ = 4;
};

}  // namespace qiopa
