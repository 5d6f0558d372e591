#include "pawnprint/chess/perft.hpp"

namespace pawnprint::chess {

std::uint64_t perft(const Board& board, int depth) {
  if (depth <= 0) return 1;
  const auto moves = board.legal_moves();
  if (depth == 1) return moves.size();
  std::uint64_t total = 0;
  for (const Move& m : moves) {
    total += perft(board.apply_trusted(m), depth - 1);
  }
  return total;
}

}  // namespace pawnprint::chess
