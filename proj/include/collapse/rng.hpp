#pragma once

// Counter-based random numbers (Philox4x32-10).
//
// A draw is a pure function of (seed, stream, step, purpose), so trajectories
// are reproducible bit-for-bit across platforms and independent of how an
// ensemble is scheduled across threads.

#include <array>
#include <cstdint>

namespace collapse {

struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter counter, Key key);
};

/// Purposes within one sampler step, in draw order.
enum class DrawPurpose : std::uint32_t { Vertex = 0, Outcome = 1 };

class StreamRng {
 public:
  explicit StreamRng(std::uint64_t seed, std::uint32_t stream = 0);

  std::uint64_t bits(std::uint64_t step, DrawPurpose purpose) const;

  /// Uniform in [0, 1) with 53 random bits.
  double uniform(std::uint64_t step, DrawPurpose purpose) const;

  /// Uniform integer in [0, n), n > 0 (multiply-shift; bias below n / 2^64).
  std::uint64_t uniform_index(std::uint64_t step, DrawPurpose purpose, std::uint64_t n) const;

  /// Independent child stream with its own derived key.
  StreamRng split(std::uint32_t child) const;

  std::uint64_t seed() const { return seed_; }
  std::uint32_t stream() const { return stream_; }

 private:
  StreamRng(Philox4x32::Key key, std::uint64_t seed, std::uint32_t stream);

  Philox4x32::Key key_;
  std::uint64_t seed_;
  std::uint32_t stream_;
};

}  // namespace collapse
