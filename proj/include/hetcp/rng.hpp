#pragma once

#include <array>
#include <cstdint>

namespace hetcp {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
///
/// A stream is addressed by (seed, stream id). The seed is the 64-bit key, the
/// stream id fills the upper half of the 128-bit counter and the lower half
/// counts blocks, so the draw sequence is a pure function of (seed, stream)
/// on every platform. Work that runs in parallel takes distinct stream ids.
class RngStream {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : seed_(seed), stream_(stream) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform on (0, 1).
  double uniform_open() noexcept;
  /// Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal() noexcept;
  /// Unbiased integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;

  static Block philox(Block counter, Key key) noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Block buffer_{};
  int used_ = 4;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// Deterministic child seed for a labelled sub-task.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept {
  return mix64(seed ^ mix64(tag + 0x632be59bd9b4e019ULL));
}

}  // namespace hetcp
