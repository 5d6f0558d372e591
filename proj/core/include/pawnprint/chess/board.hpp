#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pawnprint/chess/types.hpp"

namespace pawnprint::chess {

// Full game state plus a structurally shared chain of predecessor states.
// Boards are immutable once built: apply_move returns a fresh value whose
// history links back to *this, so sharing across threads needs no locks.
class Board {
 public:
  // Standard initial position, empty history.
  static Board start_position();

  // Parses a 6-field FEN. Throws std::invalid_argument on malformed fields,
  // missing/duplicated kings, pawns on the back ranks, or an impossible
  // en-passant square. Castling rights that name an impossible castle (king
  // or rook away from home) are silently dropped rather than rejected, since
  // they do not make the position itself unusable.
  static Board from_fen(const std::string& fen);

  std::string fen() const;

  Piece piece_at(Square s) const { return squares_[static_cast<size_t>(s)]; }
  Color side_to_move() const { return stm_; }
  std::uint8_t castling_rights() const { return castling_; }
  bool has_castling_right(CastlingRight r) const { return castling_ & r; }
  // En-passant target square as recorded (set after every double push, like
  // FEN does), or kNoSquare.
  Square en_passant() const { return ep_; }
  // En-passant square only when a pawn of the side to move could actually
  // capture onto it; kNoSquare otherwise. This is the value position_key
  // hashes, so transpositions that differ only in a dead ep square collide
  // on purpose.
  Square effective_en_passant() const;
  int halfmove_clock() const { return halfmove_clock_; }
  int fullmove_number() const { return fullmove_number_; }

  // Number of predecessor states, and the immediate predecessor (nullptr at
  // the root).
  int history_size() const { return history_size_; }
  const Board* previous() const { return prev_.get(); }

  // 64-bit Zobrist key over placement, side to move, castling rights and the
  // effective en-passant square. Tables come from a fixed seed, so keys are
  // stable across runs and machines.
  std::uint64_t position_key() const { return key_; }

  // True if this exact position (by key) already occurred in the history
  // chain. Only positions within the current 50-move window can repeat.
  bool is_repetition() const;
  // Occurrences of the current position among predecessors plus this one.
  int repetition_count() const;

  // Complete list of legal moves; empty on checkmate and stalemate.
  std::vector<Move> legal_moves() const;

  bool in_check() const;                 // side to move in check
  bool is_attacked(Square s, Color by) const;

  // Applies a legal move, linking *this as the new board's predecessor.
  // Throws std::invalid_argument if the move is not legal here.
  Board apply_move(const Move& m) const;

  // Same as apply_move but trusts that the move came from legal_moves().
  Board apply_trusted(const Move& m) const;

  bool is_legal(const Move& m) const;

  // Placement + side to move + castling + effective en passant (history and
  // move counters excluded). The equivalence position_key is built over.
  bool same_position(const Board& other) const;

  // Replaces the history chain. Low-level hook for position setup and tests;
  // normal play builds history through apply_move.
  void set_history_parent(std::shared_ptr<const Board> parent);

  Square king_square(Color c) const;

 private:
  Board() = default;

  void recompute_key();
  void validate_or_throw() const;
  // Generates pseudo-legal moves (king safety not yet checked).
  void pseudo_moves(std::vector<Move>& out) const;
  // Would playing m leave our own king attacked? m must be pseudo-legal.
  bool leaves_king_in_check(const Move& m) const;
  void apply_in_place(const Move& m);  // no history link, no validation

  std::array<Piece, 64> squares_{};
  Color stm_ = Color::White;
  std::uint8_t castling_ = 0;
  Square ep_ = kNoSquare;
  int halfmove_clock_ = 0;
  int fullmove_number_ = 1;
  int history_size_ = 0;
  std::uint64_t key_ = 0;
  std::shared_ptr<const Board> prev_;
};

}  // namespace pawnprint::chess
