#include <doctest.h>

#include <algorithm>
#include <set>
#include <unordered_map>

#include "pawnprint/chess/board.hpp"
#include "pawnprint/chess/perft.hpp"
#include "pawnprint/chess/san.hpp"
#include "pawnprint/util/rng.hpp"
#include "support/refgen.hpp"

using namespace pawnprint;
using namespace pawnprint::chess;

namespace {

constexpr const char* kStartFen =
    "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";
constexpr const char* kKiwipeteFen =
    "r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1";

std::set<std::string> uci_set(const std::vector<Move>& moves) {
  std::set<std::string> out;
  for (const Move& m : moves) out.insert(m.uci());
  return out;
}

// Random playout positions for property tests. Returns boards with real
// history chains.
std::vector<Board> random_positions(int games, int max_plies,
                                    std::uint64_t seed) {
  std::vector<Board> out;
  Rng rng(seed);
  for (int g = 0; g < games; ++g) {
    Board b = Board::start_position();
    for (int ply = 0; ply < max_plies; ++ply) {
      const auto moves = b.legal_moves();
      if (moves.empty()) break;
      b = b.apply_trusted(moves[rng.next_below(moves.size())]);
      out.push_back(b);
    }
  }
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("chess_rules");

TEST_CASE("fen: initial position") {
  const Board b = Board::from_fen(kStartFen);
  int pieces = 0;
  for (Square s = 0; s < 64; ++s) {
    if (!b.piece_at(s).empty()) ++pieces;
  }
  CHECK(pieces == 32);
  CHECK(b.side_to_move() == Color::White);
  CHECK(b.castling_rights() == (kWhiteKingside | kWhiteQueenside |
                                kBlackKingside | kBlackQueenside));
  CHECK(b.en_passant() == kNoSquare);
  CHECK(b.history_size() == 0);
  CHECK(b.fen() == kStartFen);
}

TEST_CASE("fen: missing kings rejected") {
  CHECK_THROWS_AS(Board::from_fen("8/8/8/8/8/8/8/8 w - - 0 1"),
                  std::invalid_argument);
  // Two kings of one color.
  CHECK_THROWS_AS(Board::from_fen("4k3/8/8/8/8/8/8/2K1K3 w - - 0 1"),
                  std::invalid_argument);
}

TEST_CASE("fen: after 1.e4, black to move with ep square") {
  const Board b = Board::from_fen(
      "rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq e3 0 1");
  CHECK(b.side_to_move() == Color::Black);
  CHECK(b.en_passant() == parse_square("e3"));
}

TEST_CASE("fen: malformed inputs") {
  CHECK_THROWS(Board::from_fen("rnbqkbnr/pppppppp/8/8 w KQkq - 0 1"));
  CHECK_THROWS(Board::from_fen(std::string(kStartFen) + " extra"));
  // Impossible ep square: wrong rank.
  CHECK_THROWS(Board::from_fen(
      "rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq e4 0 1"));
  // Ep square without the pushed pawn behind it.
  CHECK_THROWS(Board::from_fen(
      "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR b KQkq e3 0 1"));
  CHECK_THROWS(Board::from_fen(
      "rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq - -1 1"));
}

TEST_CASE("legal_moves: counts on known positions") {
  CHECK(Board::from_fen(kStartFen).legal_moves().size() == 20);
  CHECK(Board::from_fen(kKiwipeteFen).legal_moves().size() == 48);
  // Stalemate: no moves, not in check.
  const Board stale = Board::from_fen("k7/8/1Q6/8/8/8/8/K7 b - - 0 1");
  CHECK(stale.legal_moves().empty());
  CHECK_FALSE(stale.in_check());
  // Checkmate: no moves, in check.
  const Board mate =
      Board::from_fen("rnb1kbnr/pppp1ppp/8/4p3/6Pq/5P2/PPPPP2P/RNBQKBNR w "
                      "KQkq - 1 3");
  CHECK(mate.legal_moves().empty());
  CHECK(mate.in_check());
}

TEST_CASE("apply_move: pawn double push sets ep and flips mover") {
  const Board b = Board::start_position();
  const Board after = b.apply_move(Move::from_uci("e2e4"));
  CHECK(after.piece_at(parse_square("e4")).is(PieceKind::Pawn, Color::White));
  CHECK(after.piece_at(parse_square("e2")).empty());
  CHECK(after.en_passant() == parse_square("e3"));
  CHECK(after.side_to_move() == Color::Black);
  CHECK(after.history_size() == 1);
  CHECK(after.previous()->same_position(b));
}

TEST_CASE("apply_move: captures and pawn moves reset the 50-move clock") {
  Board b = Board::start_position();
  b = b.apply_move(Move::from_uci("g1f3"));
  CHECK(b.halfmove_clock() == 1);
  b = b.apply_move(Move::from_uci("b8c6"));
  CHECK(b.halfmove_clock() == 2);
  b = b.apply_move(Move::from_uci("e2e4"));  // pawn move
  CHECK(b.halfmove_clock() == 0);
  b = b.apply_move(Move::from_uci("c6d4"));
  b = b.apply_move(Move::from_uci("f3d4"));  // capture
  CHECK(b.halfmove_clock() == 0);
}

TEST_CASE("apply_move: kingside castle relocates rook and clears rights") {
  const Board b = Board::from_fen(
      "r3k2r/pppppppp/8/8/8/8/PPPPPPPP/R3K2R w KQkq - 0 1");
  const Board after = b.apply_move(Move::from_uci("e1g1"));
  CHECK(after.piece_at(parse_square("g1")).is(PieceKind::King, Color::White));
  CHECK(after.piece_at(parse_square("f1")).is(PieceKind::Rook, Color::White));
  CHECK(after.piece_at(parse_square("h1")).empty());
  CHECK_FALSE(after.has_castling_right(kWhiteKingside));
  CHECK_FALSE(after.has_castling_right(kWhiteQueenside));
  CHECK(after.has_castling_right(kBlackKingside));
}

TEST_CASE("apply_move: illegal move rejected") {
  const Board b = Board::start_position();
  CHECK_THROWS_AS(b.apply_move(Move::from_uci("e2e5")), std::invalid_argument);
  CHECK_THROWS_AS(b.apply_move(Move::from_uci("e7e5")), std::invalid_argument);
}

TEST_CASE("apply_move: en passant removes the bypassed pawn") {
  Board b = Board::start_position();
  for (const char* u : {"e2e4", "a7a6", "e4e5", "d7d5"}) {
    b = b.apply_move(Move::from_uci(u));
  }
  CHECK(b.en_passant() == parse_square("d6"));
  const Board after = b.apply_move(Move::from_uci("e5d6"));
  CHECK(after.piece_at(parse_square("d5")).empty());
  CHECK(after.piece_at(parse_square("d6")).is(PieceKind::Pawn, Color::White));
}

TEST_CASE("san: basic tokens") {
  const Board start = Board::start_position();
  CHECK(parse_san(start, "e4") == Move::from_uci("e2e4"));
  CHECK(parse_san(start, "Nf3") == Move::from_uci("g1f3"));
  CHECK(parse_san(start, "e4!?") == Move::from_uci("e2e4"));
  CHECK_THROWS(parse_san(start, "Ke2"));
}

TEST_CASE("san: knight disambiguation") {
  // Knights on b1 and f3 can both reach the empty d2 square.
  const Board b = Board::from_fen(
      "rnbqkbnr/pppppppp/8/8/8/5N2/PPP1PPPP/RNBQKB1R w KQkq - 0 1");
  CHECK(parse_san(b, "Nbd2") == Move::from_uci("b1d2"));
  CHECK(parse_san(b, "Nfd2") == Move::from_uci("f3d2"));
  CHECK_THROWS_AS(parse_san(b, "Nd2"), std::invalid_argument);
  CHECK(san_of(b, Move::from_uci("b1d2")) == "Nbd2");
}

TEST_CASE("san: capture-promotion with check") {
  const Board b = Board::from_fen("3r3k/4P3/8/8/8/8/8/4K3 w - - 0 1");
  const Move m = parse_san(b, "exd8=Q+");
  CHECK(m == Move::from_uci("e7d8q"));
  CHECK(san_of(b, m) == "exd8=Q+");
  // Underpromotion spellings.
  CHECK(parse_san(b, "exd8=N") == Move::from_uci("e7d8n"));
  CHECK(parse_san(b, "exd8N") == Move::from_uci("e7d8n"));
}

TEST_CASE("san: castling tokens") {
  const Board b = Board::from_fen(
      "r3k2r/pppppppp/8/8/8/8/PPPPPPPP/R3K2R w KQkq - 0 1");
  CHECK(parse_san(b, "O-O") == Move::from_uci("e1g1"));
  CHECK(parse_san(b, "O-O-O") == Move::from_uci("e1c1"));
  CHECK(parse_san(b, "0-0") == Move::from_uci("e1g1"));
  CHECK(san_of(b, Move::from_uci("e1c1")) == "O-O-O");
}

TEST_CASE("perft: reference counts, cross-checked against the oracle") {
  const Board start = Board::from_fen(kStartFen);
  CHECK(perft(start, 0) == 1);
  CHECK(perft(start, 1) == 20);
  CHECK(perft(start, 2) == 400);
  CHECK(perft(start, 3) == 8902);
  CHECK(refgen::perft(kStartFen, 3) == 8902);

  const Board kiwipete = Board::from_fen(kKiwipeteFen);
  CHECK(perft(kiwipete, 1) == 48);
  CHECK(perft(kiwipete, 2) == 2039);
  CHECK(refgen::perft(kKiwipeteFen, 2) == 2039);

  // Endgame position with en-passant and promotion traffic.
  const char* pos3 = "8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1";
  const Board b3 = Board::from_fen(pos3);
  CHECK(perft(b3, 1) == 14);
  CHECK(perft(b3, 2) == 191);
  CHECK(perft(b3, 3) == 2812);
  CHECK(perft(b3, 4) == 43238);
  CHECK(refgen::perft(pos3, 4) == 43238);

  // Promotion-heavy mirrored position.
  const char* pos4 =
      "r3k2r/Pppp1ppp/1b3nbN/nP6/BBP1P3/q4N2/Pp1P2PP/R2Q1RK1 w kq - 0 1";
  const Board b4 = Board::from_fen(pos4);
  CHECK(perft(b4, 1) == 6);
  CHECK(perft(b4, 2) == 264);
  CHECK(perft(b4, 3) == 9467);
  CHECK(refgen::perft(pos4, 3) == 9467);
}

TEST_CASE("movegen equals the independent oracle on random positions") {
  const auto positions = random_positions(60, 60, 20240801);
  for (const Board& b : positions) {
    const auto ours = uci_set(b.legal_moves());
    const auto ref = refgen::legal_moves_uci(b.fen());
    const std::set<std::string> ref_set(ref.begin(), ref.end());
    REQUIRE(ours == ref_set);
  }
}

TEST_CASE("movegen never leaves own king in check") {
  const auto positions = random_positions(40, 50, 99173);
  for (const Board& b : positions) {
    const Color us = b.side_to_move();
    for (const Move& m : b.legal_moves()) {
      const Board after = b.apply_trusted(m);
      CHECK_FALSE(after.is_attacked(after.king_square(us), opponent(us)));
    }
  }
}

TEST_CASE("san round-trips for every legal move over random positions") {
  // san_of prints, parse_san must give back the identical move.
  const auto positions = random_positions(135, 80, 555123);
  REQUIRE(positions.size() >= 10000);
  std::size_t checked = 0;
  for (const Board& b : positions) {
    for (const Move& m : b.legal_moves()) {
      const std::string san = san_of(b, m);
      const Move back = parse_san(b, san);
      if (!(back == m)) {
        CAPTURE(b.fen());
        CAPTURE(san);
        REQUIRE(back == m);
      }
      ++checked;
    }
  }
  CHECK(checked > 100000);
}

TEST_CASE("position_key: transpositions collide, different state does not") {
  Board a = Board::start_position();
  for (const char* u : {"e2e4", "e7e5", "g1f3"}) {
    a = a.apply_move(Move::from_uci(u));
  }
  Board b = Board::start_position();
  for (const char* u : {"g1f3", "e7e5", "e2e4"}) {
    b = b.apply_move(Move::from_uci(u));
  }
  // Different move order, same placement; the dead ep square after e2e4 does
  // not count because no black pawn can take it.
  CHECK(a.position_key() == b.position_key());
  CHECK(a.same_position(b));

  // Same placement, different side to move.
  const Board w = Board::from_fen("4k3/8/8/8/8/8/8/4K3 w - - 0 1");
  const Board bl = Board::from_fen("4k3/8/8/8/8/8/8/4K3 b - - 0 1");
  CHECK(w.position_key() != bl.position_key());
}

TEST_CASE("position_key: live ep square changes the key") {
  // Black pawn on d4 can capture e3 en passant, so the ep square is live.
  const Board live = Board::from_fen(
      "rnbqkbnr/ppp1pppp/8/8/3pP3/8/PPPP1PPP/RNBQKBNR b KQkq e3 0 1");
  const Board dead = Board::from_fen(
      "rnbqkbnr/ppp1pppp/8/8/3pP3/8/PPPP1PPP/RNBQKBNR b KQkq - 0 1");
  CHECK(live.effective_en_passant() == parse_square("e3"));
  CHECK(live.position_key() != dead.position_key());
}

TEST_CASE("position_key: independent of history length") {
  const auto positions = random_positions(20, 40, 77777);
  for (const Board& b : positions) {
    const Board truncated = Board::from_fen(b.fen());
    CHECK(truncated.position_key() == b.position_key());
  }
}

TEST_CASE("position_key: no collisions over a large seeded sample") {
  // Distinct positions (by full state) must give distinct keys in practice.
  std::unordered_map<std::uint64_t, std::string> seen;
  seen.reserve(1 << 20);
  Rng rng(424242);
  std::size_t positions = 0;
  std::size_t collisions = 0;
  while (positions < 1000000) {
    Board b = Board::start_position();
    for (int ply = 0; ply < 80 && positions < 1000000; ++ply) {
      const auto moves = b.legal_moves();
      if (moves.empty()) break;
      b = b.apply_trusted(moves[rng.next_below(moves.size())]);
      // Normalize to exactly what the key covers: placement, side to move,
      // castling, effective en passant. Move counters and dead ep excluded.
      std::string state = b.fen();
      state.resize(state.rfind(' ', state.rfind(' ', state.rfind(' ') - 1) - 1));
      state += b.effective_en_passant() == kNoSquare
                   ? "-"
                   : square_name(b.effective_en_passant());
      auto [it, inserted] = seen.emplace(b.position_key(), state);
      if (!inserted && it->second != state) ++collisions;
      ++positions;
    }
  }
  CHECK(collisions == 0);
}

TEST_CASE("repetition counting") {
  Board b = Board::start_position();
  CHECK(b.repetition_count() == 1);
  for (const char* u : {"g1f3", "g8f6", "f3g1", "f6g8"}) {
    b = b.apply_move(Move::from_uci(u));
  }
  CHECK(b.repetition_count() == 2);  // startpos again (with both rights)
  CHECK(b.is_repetition());
  for (const char* u : {"g1f3", "g8f6", "f3g1", "f6g8"}) {
    b = b.apply_move(Move::from_uci(u));
  }
  CHECK(b.repetition_count() == 3);
}
