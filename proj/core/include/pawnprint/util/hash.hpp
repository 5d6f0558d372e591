#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace pawnprint {

// FNV-1a 64. Integrity checksum for the shard and checkpoint containers.
// Not cryptographic; it only needs to catch corruption and truncation.
class Fnv1a64 {
 public:
  static constexpr std::uint64_t kOffset = 0xcbf29ce484222325ULL;
  static constexpr std::uint64_t kPrime = 0x100000001b3ULL;

  void update(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      hash_ ^= p[i];
      hash_ *= kPrime;
    }
  }

  std::uint64_t digest() const { return hash_; }

 private:
  std::uint64_t hash_ = kOffset;
};

inline std::uint64_t fnv1a64(const void* data, std::size_t n) {
  Fnv1a64 h;
  h.update(data, n);
  return h.digest();
}

inline std::uint64_t fnv1a64(std::string_view s) {
  return fnv1a64(s.data(), s.size());
}

// SipHash-2-4 with a 128-bit key. Used to pseudonymize player names: keyed,
// so ids cannot be reversed to usernames without the salt.
std::uint64_t siphash24(std::span<const std::uint8_t> key16,
                        const void* data, std::size_t n);

// Hex string of a 64-bit value, zero padded to 16 chars.
std::string hex64(std::uint64_t v);

}  // namespace pawnprint
