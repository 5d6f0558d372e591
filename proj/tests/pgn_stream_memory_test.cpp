// Verifies the streaming guarantee of the PGN reader: peak live heap while
// scanning a corpus stays bounded by roughly one game, not by corpus size.
// Runs as its own binary because it instruments global new/delete.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <new>
#include <sstream>

#include "pawnprint/chess/board.hpp"
#include "pawnprint/pgn/reader.hpp"
#include "pawnprint/pgn/writer.hpp"
#include "pawnprint/util/rng.hpp"

namespace {

std::atomic<std::size_t> g_live{0};
std::atomic<std::size_t> g_peak{0};

void note_alloc(std::size_t n) {
  const std::size_t live = g_live.fetch_add(n) + n;
  std::size_t peak = g_peak.load();
  while (live > peak && !g_peak.compare_exchange_weak(peak, live)) {
  }
}

}  // namespace

void* operator new(std::size_t n) {
  void* p = std::malloc(n + 16);
  if (!p) throw std::bad_alloc();
  *static_cast<std::size_t*>(p) = n;
  note_alloc(n);
  return static_cast<char*>(p) + 16;
}

void operator delete(void* p) noexcept {
  if (!p) return;
  char* base = static_cast<char*>(p) - 16;
  g_live.fetch_sub(*reinterpret_cast<std::size_t*>(base));
  std::free(base);
}

void operator delete(void* p, std::size_t) noexcept { operator delete(p); }

int main() {
  using namespace pawnprint;

  // Build a corpus of 200 random games (~1.5 MB of PGN) up front; the
  // buffer is allocated before the measured window starts.
  std::string corpus;
  {
    std::ostringstream out;
    Rng rng(17);
    for (int g = 0; g < 200; ++g) {
      pgn::GameRecord game;
      game.tags["White"] = "w" + std::to_string(g);
      game.tags["Black"] = "b" + std::to_string(g);
      game.tags["Site"] = "mem/" + std::to_string(g);
      game.tags["Result"] = "*";
      chess::Board b = chess::Board::start_position();
      for (int ply = 0; ply < 120; ++ply) {
        const auto moves = b.legal_moves();
        if (moves.empty()) break;
        const auto m = moves[rng.next_below(moves.size())];
        game.plies.push_back({m, 180 - ply, std::nullopt});
        b = b.apply_trusted(m);
      }
      pgn::write_game(out, game);
    }
    corpus = out.str();
  }
  std::istringstream in(corpus);

  const std::size_t before = g_live.load();
  g_peak.store(before);

  pgn::PgnReader reader(in);
  std::size_t games = 0, plies = 0;
  while (auto game = reader.next()) {
    ++games;
    plies += game->plies.size();
  }
  const std::size_t peak_growth = g_peak.load() - before;

  std::printf("games %zu plies %zu corpus %zu bytes, peak heap growth %zu "
              "bytes\n",
              games, plies, corpus.size(), peak_growth);
  if (games != 200) {
    std::printf("FAIL: expected 200 games\n");
    return 1;
  }
  // One 120-ply game costs well under 200 KB including its replay history
  // chain; a reader that buffered the whole corpus would blow far past
  // this.
  const std::size_t budget = 1 << 20;
  if (peak_growth > budget) {
    std::printf("FAIL: peak growth %zu exceeds the %zu byte budget\n",
                peak_growth, budget);
    return 1;
  }
  std::printf("PASS: streaming stays within one-game memory\n");
  return 0;
}
