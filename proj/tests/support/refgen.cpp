#include "refgen.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace refgen {

namespace {

// 10x12 mailbox. Playable squares are 21..98; everything else is a border.
constexpr int kOff = -99;  // off-board marker in board[]
constexpr int kEmpty = 0;
// Piece codes: positive white, negative black. 1=P 2=N 3=B 4=R 5=Q 6=K.

struct Pos {
  int board[120];
  int stm;        // +1 white, -1 black
  bool castle[4]; // WK, WQ, BK, BQ
  int ep;         // 120-index or -1
};

int sq120(int file, int rank) { return 21 + file + 10 * rank; }
int file_of(int s) { return (s - 21) % 10; }
int rank_of(int s) { return (s - 21) / 10; }
bool on_board(int s) {
  return s >= 21 && s <= 98 && file_of(s) >= 0 && file_of(s) <= 7;
}

std::string name_of(int s) {
  std::string n;
  n += static_cast<char>('a' + file_of(s));
  n += static_cast<char>('1' + rank_of(s));
  return n;
}

int piece_code(char c) {
  int v;
  switch (std::toupper(static_cast<unsigned char>(c))) {
    case 'P': v = 1; break;
    case 'N': v = 2; break;
    case 'B': v = 3; break;
    case 'R': v = 4; break;
    case 'Q': v = 5; break;
    case 'K': v = 6; break;
    default: throw std::runtime_error("refgen: bad piece char");
  }
  return std::isupper(static_cast<unsigned char>(c)) ? v : -v;
}

Pos parse(const std::string& fen) {
  Pos p{};
  for (int i = 0; i < 120; ++i) p.board[i] = kOff;
  for (int r = 0; r < 8; ++r) {
    for (int f = 0; f < 8; ++f) p.board[sq120(f, r)] = kEmpty;
  }
  std::istringstream in(fen);
  std::string placement, stm, castling, ep;
  if (!(in >> placement >> stm >> castling >> ep)) {
    throw std::runtime_error("refgen: bad FEN");
  }
  int rank = 7, file = 0;
  for (char c : placement) {
    if (c == '/') {
      --rank;
      file = 0;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      file += c - '0';
    } else {
      p.board[sq120(file, rank)] = piece_code(c);
      ++file;
    }
  }
  p.stm = stm == "w" ? 1 : -1;
  p.castle[0] = castling.find('K') != std::string::npos;
  p.castle[1] = castling.find('Q') != std::string::npos;
  p.castle[2] = castling.find('k') != std::string::npos;
  p.castle[3] = castling.find('q') != std::string::npos;
  p.ep = ep == "-" ? -1 : sq120(ep[0] - 'a', ep[1] - '1');
  return p;
}

constexpr int kKnightOff[8] = {-21, -19, -12, -8, 8, 12, 19, 21};
constexpr int kBishopOff[4] = {-11, -9, 9, 11};
constexpr int kRookOff[4] = {-10, -1, 1, 10};
constexpr int kKingOff[8] = {-11, -10, -9, -1, 1, 9, 10, 11};

bool attacked_by(const Pos& p, int target, int side) {
  // Pawn attacks: a white pawn on target-11/target-9 attacks target.
  if (side > 0) {
    if (on_board(target - 11) && p.board[target - 11] == 1) return true;
    if (on_board(target - 9) && p.board[target - 9] == 1) return true;
  } else {
    if (on_board(target + 11) && p.board[target + 11] == -1) return true;
    if (on_board(target + 9) && p.board[target + 9] == -1) return true;
  }
  for (int d : kKnightOff) {
    const int s = target + d;
    if (on_board(s) && p.board[s] == 2 * side) return true;
  }
  for (int d : kKingOff) {
    const int s = target + d;
    if (on_board(s) && p.board[s] == 6 * side) return true;
  }
  for (int d : kBishopOff) {
    for (int s = target + d; on_board(s); s += d) {
      const int q = p.board[s];
      if (q == kEmpty) continue;
      if (q == 3 * side || q == 5 * side) return true;
      break;
    }
  }
  for (int d : kRookOff) {
    for (int s = target + d; on_board(s); s += d) {
      const int q = p.board[s];
      if (q == kEmpty) continue;
      if (q == 4 * side || q == 5 * side) return true;
      break;
    }
  }
  return false;
}

int king_of(const Pos& p, int side) {
  for (int s = 21; s <= 98; ++s) {
    if (on_board(s) && p.board[s] == 6 * side) return s;
  }
  return -1;
}

struct RefMove {
  int from, to;
  int promo;  // 0 none, else 2..5
};

Pos make(const Pos& p, const RefMove& m) {
  Pos n = p;
  const int mover = n.board[m.from];
  const bool pawn = std::abs(mover) == 1;
  n.board[m.to] = m.promo ? m.promo * p.stm : mover;
  n.board[m.from] = kEmpty;
  if (pawn && m.to == p.ep && file_of(m.from) != file_of(m.to)) {
    n.board[m.to - 10 * p.stm] = kEmpty;  // en-passant victim
  }
  if (std::abs(mover) == 6 && std::abs(m.to - m.from) == 2) {
    // Castling: move the rook too.
    if (m.to > m.from) {
      n.board[m.from + 1] = n.board[m.from + 3];
      n.board[m.from + 3] = kEmpty;
    } else {
      n.board[m.from - 1] = n.board[m.from - 4];
      n.board[m.from - 4] = kEmpty;
    }
  }
  // Castling rights.
  if (mover == 6) n.castle[0] = n.castle[1] = false;
  if (mover == -6) n.castle[2] = n.castle[3] = false;
  for (int s : {m.from, m.to}) {
    if (s == sq120(7, 0)) n.castle[0] = false;
    if (s == sq120(0, 0)) n.castle[1] = false;
    if (s == sq120(7, 7)) n.castle[2] = false;
    if (s == sq120(0, 7)) n.castle[3] = false;
  }
  n.ep = -1;
  if (pawn && std::abs(m.to - m.from) == 20) n.ep = (m.to + m.from) / 2;
  n.stm = -p.stm;
  return n;
}

void gen_pseudo(const Pos& p, std::vector<RefMove>& out) {
  const int side = p.stm;
  for (int from = 21; from <= 98; ++from) {
    if (!on_board(from)) continue;
    const int pc = p.board[from];
    if (pc == kEmpty || pc == kOff || pc * side <= 0) continue;
    const int kind = std::abs(pc);
    if (kind == 1) {
      const int fwd = 10 * side;
      const int promo_rank = side > 0 ? 7 : 0;
      auto add_pawn = [&](int to) {
        if (rank_of(to) == promo_rank) {
          for (int pr : {5, 4, 3, 2}) out.push_back({from, to, pr});
        } else {
          out.push_back({from, to, 0});
        }
      };
      if (p.board[from + fwd] == kEmpty) {
        add_pawn(from + fwd);
        const int start_rank = side > 0 ? 1 : 6;
        if (rank_of(from) == start_rank && p.board[from + 2 * fwd] == kEmpty) {
          out.push_back({from, from + 2 * fwd, 0});
        }
      }
      for (int dc : {fwd - 1, fwd + 1}) {
        const int to = from + dc;
        if (!on_board(to)) continue;
        if (p.board[to] != kEmpty && p.board[to] * side < 0) {
          add_pawn(to);
        } else if (to == p.ep && p.board[to] == kEmpty) {
          out.push_back({from, to, 0});
        }
      }
    } else if (kind == 2 || kind == 6) {
      const int* offs = kind == 2 ? kKnightOff : kKingOff;
      for (int i = 0; i < 8; ++i) {
        const int to = from + offs[i];
        if (!on_board(to)) continue;
        if (p.board[to] == kEmpty || p.board[to] * side < 0) {
          out.push_back({from, to, 0});
        }
      }
    } else {
      const int* dirs = kind == 3 ? kBishopOff : kRookOff;
      const int ndirs = 4;
      for (int pass = 0; pass < (kind == 5 ? 2 : 1); ++pass) {
        const int* dd = kind == 5 ? (pass == 0 ? kBishopOff : kRookOff) : dirs;
        for (int i = 0; i < ndirs; ++i) {
          for (int to = from + dd[i]; on_board(to); to += dd[i]) {
            if (p.board[to] == kEmpty) {
              out.push_back({from, to, 0});
              continue;
            }
            if (p.board[to] * side < 0) out.push_back({from, to, 0});
            break;
          }
        }
      }
    }
  }
  // Castling.
  const int home = side > 0 ? sq120(4, 0) : sq120(4, 7);
  const bool ks = side > 0 ? p.castle[0] : p.castle[2];
  const bool qs = side > 0 ? p.castle[1] : p.castle[3];
  if (p.board[home] == 6 * side && !attacked_by(p, home, -side)) {
    if (ks && p.board[home + 1] == kEmpty && p.board[home + 2] == kEmpty &&
        p.board[home + 3] == 4 * side && !attacked_by(p, home + 1, -side) &&
        !attacked_by(p, home + 2, -side)) {
      out.push_back({home, home + 2, 0});
    }
    if (qs && p.board[home - 1] == kEmpty && p.board[home - 2] == kEmpty &&
        p.board[home - 3] == kEmpty && p.board[home - 4] == 4 * side &&
        !attacked_by(p, home - 1, -side) && !attacked_by(p, home - 2, -side)) {
      out.push_back({home, home - 2, 0});
    }
  }
}

std::vector<RefMove> gen_legal(const Pos& p) {
  std::vector<RefMove> pseudo, legal;
  gen_pseudo(p, pseudo);
  for (const RefMove& m : pseudo) {
    const Pos n = make(p, m);
    if (!attacked_by(n, king_of(n, p.stm), -p.stm)) legal.push_back(m);
  }
  return legal;
}

std::string to_uci(const RefMove& m) {
  std::string s = name_of(m.from) + name_of(m.to);
  switch (m.promo) {
    case 2: s += 'n'; break;
    case 3: s += 'b'; break;
    case 4: s += 'r'; break;
    case 5: s += 'q'; break;
    default: break;
  }
  return s;
}

std::uint64_t perft_rec(const Pos& p, int depth) {
  if (depth <= 0) return 1;
  const auto moves = gen_legal(p);
  if (depth == 1) return moves.size();
  std::uint64_t total = 0;
  for (const RefMove& m : moves) total += perft_rec(make(p, m), depth - 1);
  return total;
}

}  // namespace

std::vector<std::string> legal_moves_uci(const std::string& fen) {
  const Pos p = parse(fen);
  std::vector<std::string> out;
  for (const RefMove& m : gen_legal(p)) out.push_back(to_uci(m));
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t perft(const std::string& fen, int depth) {
  return perft_rec(parse(fen), depth);
}

}  // namespace refgen
