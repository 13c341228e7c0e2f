#pragma once

#include <array>
#include <cstdint>

namespace ota {

// Philox4x32-10 (Salmon et al., SC'11): a counter-based generator whose output
// depends only on (counter, key), so streams are reproducible on any platform.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) noexcept;

// Sequential view over one Philox stream. The key is the 64-bit seed; counter
// words are (block lo, block hi, stream id, 0).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint32_t stream) noexcept;

  std::uint32_t next_u32() noexcept;
  std::uint64_t next_u64() noexcept;
  // [0, 1) with 53 random bits.
  double uniform() noexcept;
  // (0, 1), never 0 so it is safe under log().
  double uniform_open() noexcept;
  // Unbiased integer in [0, bound) by rejection; bound > 0.
  std::uint32_t uniform_int(std::uint32_t bound) noexcept;
  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ota
