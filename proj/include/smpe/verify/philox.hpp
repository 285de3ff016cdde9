#pragma once

#include <array>
#include <cstdint>

namespace smpe {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

/// Independent stream for one (seed, stream) pair: the key is the seed and
/// the first two counter words are the stream index, so streams never
/// overlap and each draw depends only on (seed, stream, draw index).
class PhiloxStream {
 public:
  PhiloxStream(std::uint64_t seed, std::uint64_t stream);

  std::uint32_t next_u32();
  /// Uniform on [0, 1) with 53 random bits.
  double next_double();

 private:
  PhiloxKey key_;
  PhiloxCounter counter_;
  PhiloxCounter block_{};
  unsigned used_ = 4;
};

}  // namespace smpe
