#include "collapse/rng.hpp"

namespace collapse {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline Philox4x32::Counter round(const Philox4x32::Counter& c, const Philox4x32::Key& k) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kMul0, c[0], hi0, lo0);
  mulhilo(kMul1, c[2], hi1, lo1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter counter, Key key) {
  counter = round(counter, key);
  for (int r = 1; r < 10; ++r) {
    key[0] += kWeyl0;
    key[1] += kWeyl1;
    counter = round(counter, key);
  }
  return counter;
}

StreamRng::StreamRng(std::uint64_t seed, std::uint32_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      seed_(seed),
      stream_(stream) {}

StreamRng::StreamRng(Philox4x32::Key key, std::uint64_t seed, std::uint32_t stream)
    : key_(key), seed_(seed), stream_(stream) {}

std::uint64_t StreamRng::bits(std::uint64_t step, DrawPurpose purpose) const {
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(step),
                                static_cast<std::uint32_t>(step >> 32),
                                static_cast<std::uint32_t>(purpose), stream_};
  const auto out = Philox4x32::generate(ctr, key_);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

double StreamRng::uniform(std::uint64_t step, DrawPurpose purpose) const {
  return static_cast<double>(bits(step, purpose) >> 11) * 0x1.0p-53;
}

std::uint64_t StreamRng::uniform_index(std::uint64_t step, DrawPurpose purpose,
                                       std::uint64_t n) const {
  __extension__ using u128 = unsigned __int128;
  const u128 wide = static_cast<u128>(bits(step, purpose)) * n;
  return static_cast<std::uint64_t>(wide >> 64);
}

StreamRng StreamRng::split(std::uint32_t child) const {
  const auto out = Philox4x32::generate({child, 0u, 0xFFFFFFFFu, stream_}, key_);
  return StreamRng(Philox4x32::Key{out[0], out[1]}, seed_, child);
}

}  // namespace collapse
