#include <benchmark/benchmark.h>

#include "pawnprint/chess/board.hpp"
#include "pawnprint/encode/planes.hpp"
#include "pawnprint/util/rng.hpp"

using namespace pawnprint;
using namespace pawnprint::chess;

namespace {

Board midgame_board() {
  Rng rng(12);
  Board b = Board::start_position();
  for (int i = 0; i < 24; ++i) {
    const auto moves = b.legal_moves();
    if (moves.empty()) break;
    b = b.apply_trusted(moves[rng.next_below(moves.size())]);
  }
  return b;
}

void BM_EncodePosition(benchmark::State& state) {
  const Board b = midgame_board();
  for (auto _ : state) {
    benchmark::DoNotOptimize(encode::encode_position(b));
  }
}
BENCHMARK(BM_EncodePosition);

void BM_LegalMask(benchmark::State& state) {
  const Board b = midgame_board();
  for (auto _ : state) {
    benchmark::DoNotOptimize(encode::legal_mask(b));
  }
}
BENCHMARK(BM_LegalMask);

}  // namespace
