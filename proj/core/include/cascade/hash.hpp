#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace cascade {

// FNV-1a 64-bit, used for file integrity checksums and for reducing cell
// parameters to a seed key. Not cryptographic.
class Fnv1a64 {
 public:
  constexpr void update(const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      hash_ ^= bytes[i];
      hash_ *= 0x100000001B3ULL;
    }
  }
  constexpr void update(std::string_view s) { update(s.data(), s.size()); }
  constexpr void update_u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      hash_ ^= (v >> (8 * i)) & 0xFF;
      hash_ *= 0x100000001B3ULL;
    }
  }
  constexpr std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xCBF29CE484222325ULL;
};

}  // namespace cascade
