#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "pawnprint/chess/types.hpp"
#include "pawnprint/encode/planes.hpp"
#include "pawnprint/util/hash.hpp"

namespace pawnprint::data {

// Stable 64-bit reference for a player id string; this is what shards and
// checkpoints store.
inline std::uint64_t player_ref(std::string_view player_id) {
  return fnv1a64(player_id);
}

// One supervised pair: encoded position, the move the player made, and the
// provenance needed to trace it back (player, game, ply, color).
struct TrainingExample {
  encode::InputPlanes planes;
  std::uint16_t target = 0;  // policy vocabulary index
  std::uint64_t player = 0;
  std::uint64_t game = 0;
  std::uint16_t ply = 0;
  chess::Color side = chess::Color::White;

  friend bool operator==(const TrainingExample&,
                         const TrainingExample&) = default;
};

// Fixed-width packed form, identical to the on-disk shard record. All input
// planes are binary except the rule-50 plane, so 109 bit-planes plus one
// byte reproduce the full 112x8x8 tensor (the constant all-zero/all-one
// planes are implicit).
struct PackedExample {
  static constexpr int kBitPlanes = 109;
  static constexpr std::size_t kBytes =
      kBitPlanes * 8 + 1 + 2 + 8 + 8 + 2 + 1;  // 894

  std::array<std::uint64_t, kBitPlanes> planes{};
  std::uint8_t rule50 = 0;  // halfmove clock, already clamped to 0..100
  std::uint16_t target = 0;
  std::uint64_t player = 0;
  std::uint64_t game = 0;
  std::uint16_t ply = 0;
  std::uint8_t side = 0;

  friend bool operator==(const PackedExample&, const PackedExample&) = default;

  static PackedExample pack(const TrainingExample& example);
  TrainingExample unpack() const;
  // Writes the 112x8x8 tensor into dst (kPlanes * kCells floats).
  void unpack_planes_into(float* dst) const;
};

}  // namespace pawnprint::data
