#include "pawnprint/chess/san.hpp"

#include <cctype>

namespace pawnprint::chess {

namespace {

PieceKind kind_from_letter(char c) {
  switch (c) {
    case 'N': return PieceKind::Knight;
    case 'B': return PieceKind::Bishop;
    case 'R': return PieceKind::Rook;
    case 'Q': return PieceKind::Queen;
    case 'K': return PieceKind::King;
    default: return PieceKind::None;
  }
}

char letter_of(PieceKind k) {
  switch (k) {
    case PieceKind::Knight: return 'N';
    case PieceKind::Bishop: return 'B';
    case PieceKind::Rook: return 'R';
    case PieceKind::Queen: return 'Q';
    case PieceKind::King: return 'K';
    default: return '?';
  }
}

// Strips +, #, !, ? and a trailing "e.p." marker.
std::string strip_decorations(std::string token) {
  if (token.size() > 4 && token.compare(token.size() - 4, 4, "e.p.") == 0) {
    token.resize(token.size() - 4);
  }
  while (!token.empty()) {
    const char c = token.back();
    if (c == '+' || c == '#' || c == '!' || c == '?') {
      token.pop_back();
    } else {
      break;
    }
  }
  return token;
}

}  // namespace

Move parse_san(const Board& board, const std::string& san) {
  const std::string token = strip_decorations(san);
  if (token.empty()) {
    throw std::invalid_argument("empty SAN token: '" + san + "'");
  }

  const auto legal = board.legal_moves();
  auto no_match = [&]() -> std::invalid_argument {
    return std::invalid_argument("no legal move matches '" + san + "' in " +
                                 board.fen());
  };

  // Castling, including the 0-0 spelling some sources use.
  if (token == "O-O" || token == "0-0" || token == "O-O-O" ||
      token == "0-0-0") {
    const bool kingside = token == "O-O" || token == "0-0";
    const int rank = board.side_to_move() == Color::White ? 0 : 7;
    const Move want{make_square(4, rank), make_square(kingside ? 6 : 2, rank),
                    PieceKind::None};
    for (const Move& m : legal) {
      if (m == want &&
          board.piece_at(m.from).kind() == PieceKind::King) {
        return m;
      }
    }
    throw no_match();
  }

  std::string body = token;

  // Promotion suffix: "=Q" or bare trailing piece letter after a rank digit.
  PieceKind promotion = PieceKind::None;
  if (body.size() >= 2) {
    char last = body.back();
    const PieceKind k = kind_from_letter(
        static_cast<char>(std::toupper(static_cast<unsigned char>(last))));
    if (k != PieceKind::None && k != PieceKind::King &&
        (body[body.size() - 2] == '=' ||
         std::isdigit(static_cast<unsigned char>(body[body.size() - 2])))) {
      promotion = k;
      body.pop_back();
      if (!body.empty() && body.back() == '=') body.pop_back();
    }
  }

  if (body.size() < 2) throw no_match();
  const std::string dest = body.substr(body.size() - 2);
  if (dest[0] < 'a' || dest[0] > 'h' || dest[1] < '1' || dest[1] > '8') {
    throw no_match();
  }
  const Square to = parse_square(dest);
  body.resize(body.size() - 2);

  bool capture = false;
  if (!body.empty() && (body.back() == 'x' || body.back() == 'X')) {
    capture = true;
    body.pop_back();
  }

  PieceKind mover_kind = PieceKind::Pawn;
  if (!body.empty()) {
    const PieceKind k = kind_from_letter(body.front());
    if (k != PieceKind::None) {
      mover_kind = k;
      body.erase(body.begin());
    }
  }

  int want_file = -1, want_rank = -1;
  for (char c : body) {
    if (c >= 'a' && c <= 'h') {
      if (want_file != -1) throw no_match();
      want_file = c - 'a';
    } else if (c >= '1' && c <= '8') {
      if (want_rank != -1) throw no_match();
      want_rank = c - '1';
    } else {
      throw no_match();
    }
  }

  const Move* found = nullptr;
  int matches = 0;
  for (const Move& m : legal) {
    const Piece p = board.piece_at(m.from);
    if (p.kind() != mover_kind) continue;
    if (m.to != to) continue;
    if (m.promotion != promotion) continue;
    if (want_file != -1 && file_of(m.from) != want_file) continue;
    if (want_rank != -1 && rank_of(m.from) != want_rank) continue;
    if (capture) {
      const bool is_ep = p.kind() == PieceKind::Pawn &&
                         m.to == board.en_passant() &&
                         file_of(m.from) != file_of(m.to);
      if (board.piece_at(m.to).empty() && !is_ep) continue;
    }
    ++matches;
    found = &m;
  }
  if (matches == 0) throw no_match();
  if (matches > 1) {
    throw std::invalid_argument("ambiguous SAN '" + san + "' in " +
                                board.fen());
  }
  return *found;
}

std::string san_of(const Board& board, const Move& move) {
  const Piece mover = board.piece_at(move.from);
  if (mover.empty()) {
    throw std::invalid_argument("san_of: no piece on " +
                                square_name(move.from));
  }

  std::string out;
  const bool is_castle = mover.kind() == PieceKind::King &&
                         file_of(move.from) == 4 &&
                         (file_of(move.to) == 6 || file_of(move.to) == 2);
  const bool is_ep = mover.kind() == PieceKind::Pawn &&
                     move.to == board.en_passant() &&
                     file_of(move.from) != file_of(move.to);
  const bool is_capture = !board.piece_at(move.to).empty() || is_ep;

  if (is_castle) {
    out = file_of(move.to) == 6 ? "O-O" : "O-O-O";
  } else if (mover.kind() == PieceKind::Pawn) {
    if (is_capture) {
      out += static_cast<char>('a' + file_of(move.from));
      out += 'x';
    }
    out += square_name(move.to);
    if (move.promotion != PieceKind::None) {
      out += '=';
      out += letter_of(move.promotion);
    }
  } else {
    out += letter_of(mover.kind());
    // Minimal disambiguation among same-kind moves to the same square.
    bool need_any = false, file_unique = true, rank_unique = true;
    for (const Move& m : board.legal_moves()) {
      if (m.from == move.from || m.to != move.to) continue;
      if (board.piece_at(m.from).kind() != mover.kind()) continue;
      need_any = true;
      if (file_of(m.from) == file_of(move.from)) file_unique = false;
      if (rank_of(m.from) == rank_of(move.from)) rank_unique = false;
    }
    if (need_any) {
      if (file_unique) {
        out += static_cast<char>('a' + file_of(move.from));
      } else if (rank_unique) {
        out += static_cast<char>('1' + rank_of(move.from));
      } else {
        out += square_name(move.from);
      }
    }
    if (is_capture) out += 'x';
    out += square_name(move.to);
  }

  const Board after = board.apply_move(move);
  if (after.in_check()) {
    out += after.legal_moves().empty() ? '#' : '+';
  }
  return out;
}

}  // namespace pawnprint::chess
