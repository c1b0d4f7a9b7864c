#pragma once

#include <array>
#include <bit>
#include <cstdint>

namespace trinket::kp {

/// Oriented scale-space corner. Coordinates are in the level-0 frame.
struct Keypoint {
  float x = 0.f;
  float y = 0.f;
  int octave = 0;
  float size = 31.f;      // patch diameter, level-0 pixels
  float angle = 0.f;      // degrees, [0, 360)
  float response = 0.f;   // Harris score, clamped at 0
};

/// 256-bit binary descriptor.
struct BinaryDescriptor {
  std::array<std::uint64_t, 4> bits{};

  bool test(int i) const noexcept { return (bits[i >> 6] >> (i & 63)) & 1u; }
  void set(int i) noexcept { bits[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void flip(int i) noexcept { bits[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  friend bool operator==(const BinaryDescriptor&, const BinaryDescriptor&) = default;
};

inline int hamming(const BinaryDescriptor& a, const BinaryDescriptor& b) noexcept {
  return std::popcount(a.bits[0] ^ b.bits[0]) + std::popcount(a.bits[1] ^ b.bits[1]) +
         std::popcount(a.bits[2] ^ b.bits[2]) + std::popcount(a.bits[3] ^ b.bits[3]);
}

}  // namespace trinket::kp
