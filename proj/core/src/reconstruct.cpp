#include "pawnprint/data/reconstruct.hpp"

#include <string>

namespace pawnprint::data {

using chess::Color;

namespace {

inline bool bit(const PackedExample& e, int plane, int row, int col) {
  return (e.planes[static_cast<std::size_t>(plane)] >>
          (row * 8 + col)) &
         1;
}

inline bool plane_set(const PackedExample& e, int plane) {
  return e.planes[static_cast<std::size_t>(plane)] != 0;
}

}  // namespace

chess::Board reconstruct_board(const PackedExample& e) {
  const Color mover = plane_set(e, 108) ? Color::Black : Color::White;
  static const char* kMoverLetters = "PNBRQK";

  // Placement, un-flipping black's rank mirror.
  char grid[8][8];
  for (auto& rank : grid) {
    for (char& c : rank) c = 0;
  }
  for (int plane = 0; plane < 12; ++plane) {
    const bool mover_piece = plane < 6;
    char letter = kMoverLetters[plane % 6];
    const bool white_piece =
        (mover == Color::White) == mover_piece;
    if (!white_piece) {
      letter = static_cast<char>(letter - 'A' + 'a');
    }
    for (int row = 0; row < 8; ++row) {
      for (int col = 0; col < 8; ++col) {
        if (!bit(e, plane, row, col)) continue;
        const int rank = mover == Color::Black ? 7 - row : row;
        grid[rank][col] = letter;
      }
    }
  }
  std::string placement;
  for (int rank = 7; rank >= 0; --rank) {
    int empties = 0;
    for (int col = 0; col < 8; ++col) {
      if (grid[rank][col] == 0) {
        ++empties;
        continue;
      }
      if (empties) placement += static_cast<char>('0' + empties);
      empties = 0;
      placement += grid[rank][col];
    }
    if (empties) placement += static_cast<char>('0' + empties);
    if (rank) placement += '/';
  }

  std::string castling;
  const bool white_mover = mover == Color::White;
  if (plane_set(e, white_mover ? 104 : 106)) castling += 'K';
  if (plane_set(e, white_mover ? 105 : 107)) castling += 'Q';
  if (plane_set(e, white_mover ? 106 : 104)) castling += 'k';
  if (plane_set(e, white_mover ? 107 : 105)) castling += 'q';
  if (castling.empty()) castling = "-";

  // En passant: the opponent pawn that moved from oriented row 6 to row 4
  // between the previous board (history slot 1) and now.
  std::string ep = "-";
  bool have_history = false;
  for (int plane = 12; plane < 24; ++plane) {
    if (plane_set(e, plane)) {
      have_history = true;
      break;
    }
  }
  if (have_history) {
    for (int col = 0; col < 8; ++col) {
      const bool now_on4 = bit(e, 6, 4, col);       // opponent pawn, slot 0
      const bool now_on6 = bit(e, 6, 6, col);
      const bool was_on6 = bit(e, 12 + 6, 6, col);  // opponent pawn, slot 1
      const bool was_on4 = bit(e, 12 + 6, 4, col);
      if (now_on4 && !now_on6 && was_on6 && !was_on4) {
        const int physical_rank = mover == Color::Black ? 7 - 5 : 5;
        ep = std::string(1, static_cast<char>('a' + col)) +
             static_cast<char>('1' + physical_rank);
        break;
      }
    }
  }

  const int clock = std::min<int>(e.rule50, 100);
  const int fullmove = e.ply / 2 + 1;
  const std::string fen = placement + (white_mover ? " w " : " b ") +
                          castling + ' ' + ep + ' ' + std::to_string(clock) +
                          ' ' + std::to_string(fullmove);
  return chess::Board::from_fen(fen);
}

}  // namespace pawnprint::data
