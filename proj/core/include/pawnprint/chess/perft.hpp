#pragma once

#include <cstdint>

#include "pawnprint/chess/board.hpp"

namespace pawnprint::chess {

// Leaf count of the legal-move tree at exactly `depth`. The standard
// correctness oracle for move generation.
std::uint64_t perft(const Board& board, int depth);

}  // namespace pawnprint::chess
