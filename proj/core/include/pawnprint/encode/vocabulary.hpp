#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pawnprint/chess/types.hpp"

namespace pawnprint::encode {

// The fixed 1858-slot move vocabulary the policy head predicts over.
//
// Slots are enumerated in mover-oriented geometry (the mover's back rank is
// rank 0) in a fixed documented order:
//
//   1. For every from-square a1..h8: queen-like rides in direction order
//      N, NE, E, SE, S, SW, W, NW with distances 1..7, keeping targets on
//      the board; then knight jumps in a fixed offset order. 1792 slots.
//   2. Underpromotions: for every from-file on the mover's 7th rank, pushes
//      and captures into the last rank, with explicit promotion piece in
//      order knight, bishop, rook. 66 slots.
//
// Queen promotions reuse the plain (from,to) slide slot, so "e7e8" doubles
// as "e7e8q" when a pawn makes the move.
class PolicyVocabulary {
 public:
  struct MoveTemplate {
    chess::Square from;
    chess::Square to;
    // None for slide/knight slots; Knight/Bishop/Rook for underpromotions.
    chess::PieceKind promotion;
  };

  static constexpr int kSize = 1858;
  static constexpr int kSlideKnightSlots = 1792;
  static constexpr int kUnderpromotionSlots = 66;

  // The vocabulary is a fixed table; build once and share.
  static const PolicyVocabulary& instance();

  int size() const { return static_cast<int>(templates_.size()); }

  // Index for a mover-oriented (from, to, promotion) triple, -1 if the
  // triple has no slot. Queen promotion maps to the plain slot.
  int index_of(chess::Square from, chess::Square to,
               chess::PieceKind promotion) const;

  const MoveTemplate& template_at(int index) const;

  // One slot per line ("<index> <uci>"), for cross-implementation diffing.
  std::string dump() const;

 private:
  PolicyVocabulary();

  std::vector<MoveTemplate> templates_;
  // (from, to, promo-class) -> index; promo-class 0 = none/queen, 1..3 = N/B/R.
  std::array<std::int16_t, 64 * 64 * 4> lookup_;
};

}  // namespace pawnprint::encode
