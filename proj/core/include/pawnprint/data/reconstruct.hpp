#pragma once

#include "pawnprint/chess/board.hpp"
#include "pawnprint/data/example.hpp"

namespace pawnprint::data {

// Rebuilds the current position from a packed example: placement, side to
// move, castling and the rule-50 clock come straight from the planes; the
// en-passant square is recovered by diffing the newest two history boards
// (an opponent pawn that jumped two ranks). History and repetition context
// are not reconstructed, which is fine for everything this feeds: move
// legality does not depend on them.
chess::Board reconstruct_board(const PackedExample& example);

}  // namespace pawnprint::data
