#include "pawnprint/chess/board.hpp"

#include <cctype>
#include <sstream>

#include "pawnprint/util/rng.hpp"

namespace pawnprint::chess {

namespace {

// Zobrist tables filled from a fixed seed; position keys must be identical
// across runs and machines because seen-position indexes are persisted.
constexpr std::uint64_t kZobristSeed = 0x70617770726e7431ULL;  // "pawprnt1"

struct ZobristTables {
  std::uint64_t piece_square[12][64];
  std::uint64_t castling[16];
  std::uint64_t ep_file[8];
  std::uint64_t black_to_move;

  ZobristTables() {
    Rng rng(kZobristSeed);
    for (auto& per_piece : piece_square) {
      for (auto& v : per_piece) v = rng.next_u64();
    }
    for (auto& v : castling) v = rng.next_u64();
    for (auto& v : ep_file) v = rng.next_u64();
    black_to_move = rng.next_u64();
  }
};

const ZobristTables& zobrist() {
  static const ZobristTables tables;
  return tables;
}

constexpr int kKnightDeltas[8][2] = {{1, 2},  {2, 1},  {2, -1}, {1, -2},
                                     {-1, -2}, {-2, -1}, {-2, 1}, {-1, 2}};
constexpr int kKingDeltas[8][2] = {{0, 1},  {1, 1},  {1, 0},  {1, -1},
                                   {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}};
constexpr int kBishopDirs[4][2] = {{1, 1}, {1, -1}, {-1, -1}, {-1, 1}};
constexpr int kRookDirs[4][2] = {{0, 1}, {1, 0}, {0, -1}, {-1, 0}};

inline Square shifted(Square s, int df, int dr) {
  const int f = file_of(s) + df;
  const int r = rank_of(s) + dr;
  if (f < 0 || f > 7 || r < 0 || r > 7) return kNoSquare;
  return make_square(f, r);
}

}  // namespace

char Piece::to_char() const {
  if (empty()) return '.';
  static const char* letters = ".PNBRQK";
  const char c = letters[static_cast<int>(kind())];
  return color() == Color::White ? c
                                 : static_cast<char>(std::tolower(c));
}

Piece Piece::from_char(char c) {
  const Color color = std::isupper(static_cast<unsigned char>(c))
                          ? Color::White
                          : Color::Black;
  switch (std::toupper(static_cast<unsigned char>(c))) {
    case 'P': return {PieceKind::Pawn, color};
    case 'N': return {PieceKind::Knight, color};
    case 'B': return {PieceKind::Bishop, color};
    case 'R': return {PieceKind::Rook, color};
    case 'Q': return {PieceKind::Queen, color};
    case 'K': return {PieceKind::King, color};
    default:
      throw std::invalid_argument(std::string("unknown piece letter: ") + c);
  }
}

std::string Move::uci() const {
  std::string out = square_name(from) + square_name(to);
  switch (promotion) {
    case PieceKind::Knight: out += 'n'; break;
    case PieceKind::Bishop: out += 'b'; break;
    case PieceKind::Rook: out += 'r'; break;
    case PieceKind::Queen: out += 'q'; break;
    default: break;
  }
  return out;
}

Move Move::from_uci(std::string_view text) {
  if (text.size() < 4 || text.size() > 5) {
    throw std::invalid_argument("bad uci move: " + std::string(text));
  }
  Move m;
  m.from = parse_square(text.substr(0, 2));
  m.to = parse_square(text.substr(2, 2));
  if (text.size() == 5) {
    switch (text[4]) {
      case 'n': m.promotion = PieceKind::Knight; break;
      case 'b': m.promotion = PieceKind::Bishop; break;
      case 'r': m.promotion = PieceKind::Rook; break;
      case 'q': m.promotion = PieceKind::Queen; break;
      default:
        throw std::invalid_argument("bad promotion letter: " +
                                    std::string(text));
    }
  }
  return m;
}

Board Board::start_position() {
  return from_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1");
}

Board Board::from_fen(const std::string& fen) {
  std::istringstream in(fen);
  std::string placement, stm, castling, ep, halfmove, fullmove;
  if (!(in >> placement >> stm >> castling >> ep >> halfmove >> fullmove)) {
    throw std::invalid_argument("FEN must have 6 fields: " + fen);
  }
  std::string extra;
  if (in >> extra) {
    throw std::invalid_argument("FEN has trailing fields: " + fen);
  }

  Board b;
  int rank = 7, file = 0;
  for (char c : placement) {
    if (c == '/') {
      if (file != 8 || rank == 0) {
        throw std::invalid_argument("bad FEN rank layout: " + fen);
      }
      --rank;
      file = 0;
    } else if (c >= '1' && c <= '8') {
      file += c - '0';
      if (file > 8) throw std::invalid_argument("FEN rank overflow: " + fen);
    } else {
      if (file > 7) throw std::invalid_argument("FEN rank overflow: " + fen);
      b.squares_[static_cast<size_t>(make_square(file, rank))] =
          Piece::from_char(c);
      ++file;
    }
  }
  if (rank != 0 || file != 8) {
    throw std::invalid_argument("FEN must describe 8 ranks: " + fen);
  }

  if (stm == "w") {
    b.stm_ = Color::White;
  } else if (stm == "b") {
    b.stm_ = Color::Black;
  } else {
    throw std::invalid_argument("bad side-to-move field: " + fen);
  }

  if (castling != "-") {
    for (char c : castling) {
      switch (c) {
        case 'K': b.castling_ |= kWhiteKingside; break;
        case 'Q': b.castling_ |= kWhiteQueenside; break;
        case 'k': b.castling_ |= kBlackKingside; break;
        case 'q': b.castling_ |= kBlackQueenside; break;
        default:
          throw std::invalid_argument("bad castling field: " + fen);
      }
    }
  }
  // Drop rights whose king/rook are not at home.
  auto keep = [&](CastlingRight r, Square king, Square rook, Color c) {
    if (!(b.castling_ & r)) return;
    if (!b.piece_at(king).is(PieceKind::King, c) ||
        !b.piece_at(rook).is(PieceKind::Rook, c)) {
      b.castling_ = static_cast<std::uint8_t>(b.castling_ & ~r);
    }
  };
  keep(kWhiteKingside, parse_square("e1"), parse_square("h1"), Color::White);
  keep(kWhiteQueenside, parse_square("e1"), parse_square("a1"), Color::White);
  keep(kBlackKingside, parse_square("e8"), parse_square("h8"), Color::Black);
  keep(kBlackQueenside, parse_square("e8"), parse_square("a8"), Color::Black);

  if (ep != "-") {
    b.ep_ = parse_square(ep);
    const int r = rank_of(b.ep_);
    const bool rank_ok =
        (b.stm_ == Color::Black && r == 2) || (b.stm_ == Color::White && r == 5);
    if (!rank_ok) {
      throw std::invalid_argument("en-passant square on impossible rank: " +
                                  fen);
    }
    if (!b.piece_at(b.ep_).empty()) {
      throw std::invalid_argument("en-passant square is occupied: " + fen);
    }
    // The pawn that just double-pushed must actually stand in front.
    const Square pushed = b.stm_ == Color::Black ? b.ep_ + 8 : b.ep_ - 8;
    if (!b.piece_at(pushed).is(PieceKind::Pawn, opponent(b.stm_))) {
      throw std::invalid_argument("en-passant square without pushed pawn: " +
                                  fen);
    }
  }

  try {
    b.halfmove_clock_ = std::stoi(halfmove);
    b.fullmove_number_ = std::stoi(fullmove);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad move counters: " + fen);
  }
  if (b.halfmove_clock_ < 0 || b.fullmove_number_ < 1) {
    throw std::invalid_argument("bad move counters: " + fen);
  }

  b.validate_or_throw();
  b.recompute_key();
  return b;
}

void Board::validate_or_throw() const {
  int kings[2] = {0, 0};
  for (Square s = 0; s < 64; ++s) {
    const Piece p = squares_[static_cast<size_t>(s)];
    if (p.empty()) continue;
    if (p.kind() == PieceKind::King) {
      ++kings[p.color() == Color::Black ? 1 : 0];
    }
    if (p.kind() == PieceKind::Pawn &&
        (rank_of(s) == 0 || rank_of(s) == 7)) {
      throw std::invalid_argument("pawn on back rank at " + square_name(s));
    }
  }
  if (kings[0] != 1 || kings[1] != 1) {
    throw std::invalid_argument("position must have exactly one king per side");
  }
}

std::string Board::fen() const {
  std::string out;
  for (int rank = 7; rank >= 0; --rank) {
    int empties = 0;
    for (int file = 0; file < 8; ++file) {
      const Piece p = piece_at(make_square(file, rank));
      if (p.empty()) {
        ++empties;
        continue;
      }
      if (empties) {
        out += static_cast<char>('0' + empties);
        empties = 0;
      }
      out += p.to_char();
    }
    if (empties) out += static_cast<char>('0' + empties);
    if (rank) out += '/';
  }
  out += stm_ == Color::White ? " w " : " b ";
  if (castling_ == 0) {
    out += '-';
  } else {
    if (castling_ & kWhiteKingside) out += 'K';
    if (castling_ & kWhiteQueenside) out += 'Q';
    if (castling_ & kBlackKingside) out += 'k';
    if (castling_ & kBlackQueenside) out += 'q';
  }
  out += ' ';
  out += ep_ == kNoSquare ? "-" : square_name(ep_);
  out += ' ' + std::to_string(halfmove_clock_);
  out += ' ' + std::to_string(fullmove_number_);
  return out;
}

Square Board::king_square(Color c) const {
  for (Square s = 0; s < 64; ++s) {
    if (piece_at(s).is(PieceKind::King, c)) return s;
  }
  return kNoSquare;
}

bool Board::is_attacked(Square target, Color by) const {
  // Pawns.
  const int pawn_dr = by == Color::White ? -1 : 1;
  for (int df : {-1, 1}) {
    const Square s = shifted(target, df, pawn_dr);
    if (s != kNoSquare && piece_at(s).is(PieceKind::Pawn, by)) return true;
  }
  // Knights and kings.
  for (const auto& d : kKnightDeltas) {
    const Square s = shifted(target, d[0], d[1]);
    if (s != kNoSquare && piece_at(s).is(PieceKind::Knight, by)) return true;
  }
  for (const auto& d : kKingDeltas) {
    const Square s = shifted(target, d[0], d[1]);
    if (s != kNoSquare && piece_at(s).is(PieceKind::King, by)) return true;
  }
  // Sliders.
  for (const auto& d : kBishopDirs) {
    for (Square s = shifted(target, d[0], d[1]); s != kNoSquare;
         s = shifted(s, d[0], d[1])) {
      const Piece p = piece_at(s);
      if (p.empty()) continue;
      if (p.color() == by &&
          (p.kind() == PieceKind::Bishop || p.kind() == PieceKind::Queen)) {
        return true;
      }
      break;
    }
  }
  for (const auto& d : kRookDirs) {
    for (Square s = shifted(target, d[0], d[1]); s != kNoSquare;
         s = shifted(s, d[0], d[1])) {
      const Piece p = piece_at(s);
      if (p.empty()) continue;
      if (p.color() == by &&
          (p.kind() == PieceKind::Rook || p.kind() == PieceKind::Queen)) {
        return true;
      }
      break;
    }
  }
  return false;
}

bool Board::in_check() const {
  return is_attacked(king_square(stm_), opponent(stm_));
}

void Board::pseudo_moves(std::vector<Move>& out) const {
  const Color us = stm_;
  const Color them = opponent(us);
  const int forward = us == Color::White ? 1 : -1;
  const int start_rank = us == Color::White ? 1 : 6;
  const int promo_rank = us == Color::White ? 7 : 0;

  auto push_pawn_move = [&](Square from, Square to) {
    if (rank_of(to) == promo_rank) {
      for (PieceKind k : {PieceKind::Queen, PieceKind::Rook, PieceKind::Bishop,
                          PieceKind::Knight}) {
        out.push_back({from, to, k});
      }
    } else {
      out.push_back({from, to, PieceKind::None});
    }
  };

  for (Square from = 0; from < 64; ++from) {
    const Piece p = piece_at(from);
    if (p.empty() || p.color() != us) continue;

    switch (p.kind()) {
      case PieceKind::Pawn: {
        const Square one = shifted(from, 0, forward);
        if (one != kNoSquare && piece_at(one).empty()) {
          push_pawn_move(from, one);
          if (rank_of(from) == start_rank) {
            const Square two = shifted(from, 0, 2 * forward);
            if (two != kNoSquare && piece_at(two).empty()) {
              out.push_back({from, two, PieceKind::None});
            }
          }
        }
        for (int df : {-1, 1}) {
          const Square cap = shifted(from, df, forward);
          if (cap == kNoSquare) continue;
          const Piece victim = piece_at(cap);
          if (!victim.empty() && victim.color() == them) {
            push_pawn_move(from, cap);
          } else if (cap == ep_ && victim.empty()) {
            out.push_back({from, cap, PieceKind::None});
          }
        }
        break;
      }
      case PieceKind::Knight:
        for (const auto& d : kKnightDeltas) {
          const Square to = shifted(from, d[0], d[1]);
          if (to == kNoSquare) continue;
          const Piece q = piece_at(to);
          if (q.empty() || q.color() == them) {
            out.push_back({from, to, PieceKind::None});
          }
        }
        break;
      case PieceKind::King:
        for (const auto& d : kKingDeltas) {
          const Square to = shifted(from, d[0], d[1]);
          if (to == kNoSquare) continue;
          const Piece q = piece_at(to);
          if (q.empty() || q.color() == them) {
            out.push_back({from, to, PieceKind::None});
          }
        }
        break;
      case PieceKind::Bishop:
      case PieceKind::Rook:
      case PieceKind::Queen: {
        const bool diag = p.kind() != PieceKind::Rook;
        const bool ortho = p.kind() != PieceKind::Bishop;
        if (diag) {
          for (const auto& d : kBishopDirs) {
            for (Square to = shifted(from, d[0], d[1]); to != kNoSquare;
                 to = shifted(to, d[0], d[1])) {
              const Piece q = piece_at(to);
              if (q.empty()) {
                out.push_back({from, to, PieceKind::None});
                continue;
              }
              if (q.color() == them) out.push_back({from, to, PieceKind::None});
              break;
            }
          }
        }
        if (ortho) {
          for (const auto& d : kRookDirs) {
            for (Square to = shifted(from, d[0], d[1]); to != kNoSquare;
                 to = shifted(to, d[0], d[1])) {
              const Piece q = piece_at(to);
              if (q.empty()) {
                out.push_back({from, to, PieceKind::None});
                continue;
              }
              if (q.color() == them) out.push_back({from, to, PieceKind::None});
              break;
            }
          }
        }
        break;
      }
      default:
        break;
    }
  }

  // Castling: king and rook at home (tracked by the rights bits plus FEN
  // normalization), path empty, king's path not attacked.
  const Color them_c = opponent(us);
  if (us == Color::White ? (castling_ & kWhiteKingside)
                         : (castling_ & kBlackKingside)) {
    const Square e = us == Color::White ? parse_square("e1") : parse_square("e8");
    const Square f = e + 1, g = e + 2;
    if (piece_at(f).empty() && piece_at(g).empty() && !is_attacked(e, them_c) &&
        !is_attacked(f, them_c) && !is_attacked(g, them_c)) {
      out.push_back({e, g, PieceKind::None});
    }
  }
  if (us == Color::White ? (castling_ & kWhiteQueenside)
                         : (castling_ & kBlackQueenside)) {
    const Square e = us == Color::White ? parse_square("e1") : parse_square("e8");
    const Square d = e - 1, c = e - 2, b = e - 3;
    if (piece_at(d).empty() && piece_at(c).empty() && piece_at(b).empty() &&
        !is_attacked(e, them_c) && !is_attacked(d, them_c) &&
        !is_attacked(c, them_c)) {
      out.push_back({e, c, PieceKind::None});
    }
  }
}

bool Board::leaves_king_in_check(const Move& m) const {
  Board probe(*this);
  probe.prev_.reset();
  probe.apply_in_place(m);
  // apply_in_place flipped the mover; our king is now the opponent's king
  // from probe's point of view.
  return probe.is_attacked(probe.king_square(stm_), probe.stm_);
}

std::vector<Move> Board::legal_moves() const {
  std::vector<Move> pseudo;
  pseudo.reserve(48);
  pseudo_moves(pseudo);
  std::vector<Move> legal;
  legal.reserve(pseudo.size());
  for (const Move& m : pseudo) {
    if (!leaves_king_in_check(m)) legal.push_back(m);
  }
  return legal;
}

bool Board::is_legal(const Move& m) const {
  if (m.from == m.to) return false;
  const Piece p = piece_at(m.from);
  if (p.empty() || p.color() != stm_) return false;
  std::vector<Move> pseudo;
  pseudo_moves(pseudo);
  for (const Move& cand : pseudo) {
    if (cand == m) return !leaves_king_in_check(m);
  }
  return false;
}

void Board::apply_in_place(const Move& m) {
  const Piece mover = piece_at(m.from);
  const Color us = mover.color();
  const bool was_capture = !piece_at(m.to).empty();
  bool reset_clock = was_capture || mover.kind() == PieceKind::Pawn;

  squares_[static_cast<size_t>(m.from)] = Piece();
  Piece placed = mover;
  if (m.promotion != PieceKind::None) placed = Piece(m.promotion, us);
  squares_[static_cast<size_t>(m.to)] = placed;

  // En-passant capture removes the pawn behind the target square.
  if (mover.kind() == PieceKind::Pawn && m.to == ep_ && !was_capture &&
      file_of(m.from) != file_of(m.to)) {
    const Square victim = us == Color::White ? m.to - 8 : m.to + 8;
    squares_[static_cast<size_t>(victim)] = Piece();
    reset_clock = true;
  }

  // Castling relocates the rook.
  if (mover.kind() == PieceKind::King && file_of(m.from) == 4 &&
      (file_of(m.to) == 6 || file_of(m.to) == 2)) {
    const int rank = rank_of(m.from);
    if (file_of(m.to) == 6) {
      squares_[static_cast<size_t>(make_square(5, rank))] =
          squares_[static_cast<size_t>(make_square(7, rank))];
      squares_[static_cast<size_t>(make_square(7, rank))] = Piece();
    } else {
      squares_[static_cast<size_t>(make_square(3, rank))] =
          squares_[static_cast<size_t>(make_square(0, rank))];
      squares_[static_cast<size_t>(make_square(0, rank))] = Piece();
    }
  }

  // Rights die with king moves and rook moves/captures on home corners.
  auto clear_right = [&](Square corner, CastlingRight r) {
    if (m.from == corner || m.to == corner) {
      castling_ = static_cast<std::uint8_t>(castling_ & ~r);
    }
  };
  if (mover.kind() == PieceKind::King) {
    castling_ = static_cast<std::uint8_t>(
        castling_ & ~(us == Color::White ? (kWhiteKingside | kWhiteQueenside)
                                         : (kBlackKingside | kBlackQueenside)));
  }
  clear_right(parse_square("h1"), kWhiteKingside);
  clear_right(parse_square("a1"), kWhiteQueenside);
  clear_right(parse_square("h8"), kBlackKingside);
  clear_right(parse_square("a8"), kBlackQueenside);

  // Double pushes record the square behind the pawn, as FEN does.
  ep_ = kNoSquare;
  if (mover.kind() == PieceKind::Pawn &&
      std::abs(rank_of(m.to) - rank_of(m.from)) == 2) {
    ep_ = us == Color::White ? m.from + 8 : m.from - 8;
  }

  halfmove_clock_ = reset_clock ? 0 : halfmove_clock_ + 1;
  if (us == Color::Black) ++fullmove_number_;
  stm_ = opponent(us);
}

Board Board::apply_trusted(const Move& m) const {
  Board next(*this);
  next.prev_ = std::make_shared<const Board>(*this);
  next.history_size_ = history_size_ + 1;
  next.apply_in_place(m);
  next.recompute_key();
  return next;
}

Board Board::apply_move(const Move& m) const {
  if (!is_legal(m)) {
    throw std::invalid_argument("illegal move " + m.uci() + " in " + fen());
  }
  return apply_trusted(m);
}

Square Board::effective_en_passant() const {
  if (ep_ == kNoSquare) return kNoSquare;
  const int capture_rank = stm_ == Color::White ? 4 : 3;
  for (int df : {-1, 1}) {
    const int f = file_of(ep_) + df;
    if (f < 0 || f > 7) continue;
    if (piece_at(make_square(f, capture_rank)).is(PieceKind::Pawn, stm_)) {
      return ep_;
    }
  }
  return kNoSquare;
}

void Board::recompute_key() {
  const auto& z = zobrist();
  std::uint64_t key = 0;
  for (Square s = 0; s < 64; ++s) {
    const Piece p = piece_at(s);
    if (!p.empty()) {
      key ^= z.piece_square[p.dense_index()][static_cast<size_t>(s)];
    }
  }
  key ^= z.castling[castling_];
  const Square ep = effective_en_passant();
  if (ep != kNoSquare) key ^= z.ep_file[file_of(ep)];
  if (stm_ == Color::Black) key ^= z.black_to_move;
  key_ = key;
}

bool Board::is_repetition() const { return repetition_count() > 1; }

int Board::repetition_count() const {
  int count = 1;
  int steps = 0;
  const Board* b = prev_.get();
  // A repetition needs identical side to move, so matches sit an even number
  // of plies back, and any pawn move or capture (clock reset) breaks the run.
  while (b != nullptr && steps < halfmove_clock_) {
    ++steps;
    if (steps % 2 == 0 && b->key_ == key_ && same_position(*b)) ++count;
    b = b->prev_.get();
  }
  return count;
}

bool Board::same_position(const Board& other) const {
  return squares_ == other.squares_ && stm_ == other.stm_ &&
         castling_ == other.castling_ &&
         effective_en_passant() == other.effective_en_passant();
}

void Board::set_history_parent(std::shared_ptr<const Board> parent) {
  history_size_ = parent ? parent->history_size_ + 1 : 0;
  prev_ = std::move(parent);
}

}  // namespace pawnprint::chess
