#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace pawnprint::chess {

enum class Color : std::uint8_t { White = 0, Black = 1 };

inline Color opponent(Color c) {
  return c == Color::White ? Color::Black : Color::White;
}

enum class PieceKind : std::uint8_t {
  None = 0,
  Pawn = 1,
  Knight = 2,
  Bishop = 3,
  Rook = 4,
  Queen = 5,
  King = 6,
};

// Piece packed into one byte: kind in bits 0-2, color in bit 3.
class Piece {
 public:
  constexpr Piece() = default;
  constexpr Piece(PieceKind kind, Color color)
      : code_(static_cast<std::uint8_t>(
            static_cast<int>(kind) |
            (color == Color::Black ? 0x08 : 0x00))) {}

  constexpr bool empty() const { return code_ == 0; }
  constexpr PieceKind kind() const {
    return static_cast<PieceKind>(code_ & 0x07);
  }
  constexpr Color color() const {
    return (code_ & 0x08) ? Color::Black : Color::White;
  }
  constexpr bool is(PieceKind k, Color c) const {
    return !empty() && kind() == k && color() == c;
  }
  constexpr std::uint8_t code() const { return code_; }
  // 0..11 for occupied squares (White P,N,B,R,Q,K then Black), used to index
  // Zobrist tables and encoder planes.
  constexpr int dense_index() const {
    return static_cast<int>(kind()) - 1 + (color() == Color::Black ? 6 : 0);
  }

  friend constexpr bool operator==(Piece a, Piece b) {
    return a.code_ == b.code_;
  }

  char to_char() const;                   // FEN letter, '.' when empty
  static Piece from_char(char c);         // throws on unknown letter

 private:
  std::uint8_t code_ = 0;
};

// Squares are 0..63, a1 = 0, h1 = 7, a8 = 56.
using Square = int;

constexpr Square make_square(int file, int rank) { return rank * 8 + file; }
constexpr int file_of(Square s) { return s & 7; }
constexpr int rank_of(Square s) { return s >> 3; }
constexpr bool valid_square(Square s) { return s >= 0 && s < 64; }

inline std::string square_name(Square s) {
  return {static_cast<char>('a' + file_of(s)),
          static_cast<char>('1' + rank_of(s))};
}

inline Square parse_square(std::string_view name) {
  if (name.size() != 2 || name[0] < 'a' || name[0] > 'h' || name[1] < '1' ||
      name[1] > '8') {
    throw std::invalid_argument("bad square name: " + std::string(name));
  }
  return make_square(name[0] - 'a', name[1] - '1');
}

// Castling right bits.
enum CastlingRight : std::uint8_t {
  kWhiteKingside = 1,
  kWhiteQueenside = 2,
  kBlackKingside = 4,
  kBlackQueenside = 8,
};

struct Move {
  Square from = 0;
  Square to = 0;
  PieceKind promotion = PieceKind::None;

  friend bool operator==(const Move&, const Move&) = default;

  // Coordinate notation: e2e4, e7e8q. Castling is the king's two-square hop.
  std::string uci() const;
  static Move from_uci(std::string_view text);  // throws on malformed input
};

constexpr Square kNoSquare = -1;

}  // namespace pawnprint::chess
