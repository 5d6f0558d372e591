#include "pawnprint/encode/planes.hpp"

#include <algorithm>
#include <stdexcept>

namespace pawnprint::encode {

using chess::Board;
using chess::Color;
using chess::Move;
using chess::Piece;
using chess::PieceKind;
using chess::Square;

namespace {

// Mover-oriented cell for a physical square: black's boards are rank-flipped
// so the mover's own back rank is always row 0.
inline int oriented_cell(Square s, Color mover) {
  const int rank = chess::rank_of(s);
  const int file = chess::file_of(s);
  return mover == Color::Black ? (7 - rank) * 8 + file : rank * 8 + file;
}

inline Square oriented_square(Square s, Color mover) {
  return mover == Color::Black
             ? chess::make_square(chess::file_of(s), 7 - chess::rank_of(s))
             : s;
}

void fill_plane(InputPlanes& planes, int plane, float value) {
  float* p = planes.data().data() + plane * InputPlanes::kCells;
  std::fill(p, p + InputPlanes::kCells, value);
}

}  // namespace

InputPlanes encode_position(const Board& board) {
  InputPlanes planes;
  const Color mover = board.side_to_move();

  const Board* slot = &board;
  for (int h = 0; h < 8 && slot != nullptr; ++h, slot = slot->previous()) {
    for (Square s = 0; s < 64; ++s) {
      const Piece p = slot->piece_at(s);
      if (p.empty()) continue;
      const int piece_offset =
          static_cast<int>(p.kind()) - 1 + (p.color() == mover ? 0 : 6);
      planes.at(h * 12 + piece_offset, oriented_cell(s, mover) / 8,
                oriented_cell(s, mover) % 8) = 1.0f;
    }
    if (slot->is_repetition()) fill_plane(planes, 96 + h, 1.0f);
  }

  const bool white_mover = mover == Color::White;
  if (board.has_castling_right(white_mover ? chess::kWhiteKingside
                                           : chess::kBlackKingside)) {
    fill_plane(planes, 104, 1.0f);
  }
  if (board.has_castling_right(white_mover ? chess::kWhiteQueenside
                                           : chess::kBlackQueenside)) {
    fill_plane(planes, 105, 1.0f);
  }
  if (board.has_castling_right(white_mover ? chess::kBlackKingside
                                           : chess::kWhiteKingside)) {
    fill_plane(planes, 106, 1.0f);
  }
  if (board.has_castling_right(white_mover ? chess::kBlackQueenside
                                           : chess::kWhiteQueenside)) {
    fill_plane(planes, 107, 1.0f);
  }
  if (mover == Color::Black) fill_plane(planes, 108, 1.0f);
  fill_plane(planes, 109,
             static_cast<float>(std::min(board.halfmove_clock(), 100)) /
                 100.0f);
  // plane 110 stays zero
  fill_plane(planes, 111, 1.0f);
  return planes;
}

int move_index(const Board& board, const Move& move,
               const PolicyVocabulary& vocab) {
  const Color mover = board.side_to_move();
  const Square from = oriented_square(move.from, mover);
  const Square to = oriented_square(move.to, mover);
  const int idx = vocab.index_of(from, to, move.promotion);
  if (idx < 0) {
    throw std::invalid_argument("move has no vocabulary slot: " + move.uci());
  }
  return idx;
}

Move index_move(const Board& board, int index, const PolicyVocabulary& vocab) {
  const PolicyVocabulary::MoveTemplate& t = vocab.template_at(index);
  const Color mover = board.side_to_move();
  Move m;
  m.from = oriented_square(t.from, mover);  // involution, so this un-flips
  m.to = oriented_square(t.to, mover);
  m.promotion = t.promotion;
  if (m.promotion == PieceKind::None &&
      board.piece_at(m.from).kind() == PieceKind::Pawn &&
      chess::rank_of(t.to) == 7) {
    m.promotion = PieceKind::Queen;
  }
  return m;
}

LegalMask legal_mask(const Board& board, const PolicyVocabulary& vocab) {
  LegalMask mask;
  for (const Move& m : board.legal_moves()) {
    mask.bits.set(static_cast<std::size_t>(move_index(board, m, vocab)));
  }
  return mask;
}

}  // namespace pawnprint::encode
