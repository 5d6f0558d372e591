#include "pawnprint/pgn/anonymize.hpp"

#include <array>
#include <stdexcept>

#include "pawnprint/util/hash.hpp"
#include "pawnprint/util/rng.hpp"

namespace pawnprint::pgn {

std::string anonymize(std::string_view name,
                      std::span<const std::uint8_t> salt) {
  if (salt.empty()) {
    throw std::invalid_argument("anonymize: salt must not be empty");
  }
  // Stretch the salt into the 128-bit SipHash key.
  Rng expand(fnv1a64(salt.data(), salt.size()));
  std::array<std::uint8_t, 16> key{};
  for (int half = 0; half < 2; ++half) {
    std::uint64_t v = expand.next_u64();
    for (int i = 0; i < 8; ++i) {
      key[static_cast<std::size_t>(half * 8 + i)] =
          static_cast<std::uint8_t>(v >> (8 * i));
    }
  }
  return hex64(siphash24(key, name.data(), name.size()));
}

}  // namespace pawnprint::pgn
