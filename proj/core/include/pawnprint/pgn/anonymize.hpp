#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace pawnprint::pgn {

// Pseudonymous player id: 16 lowercase hex chars from a salted keyed hash of
// the username. Deterministic per (name, salt); the id leaks nothing about
// the name without the salt. Throws std::invalid_argument on an empty salt.
std::string anonymize(std::string_view name, std::span<const std::uint8_t> salt);

}  // namespace pawnprint::pgn
