#pragma once

#include <functional>
#include <istream>
#include <optional>
#include <vector>

#include "pawnprint/pgn/game_record.hpp"

namespace pawnprint::pgn {

// Streaming PGN reader. Holds one game at a time, so memory stays constant
// in the corpus size. Movetext is validated by replay; clock and engine-eval
// comment annotations ([%clk ...], [%eval ...]) are attached per ply.
//
// Malformed games are reported through the diagnostic callback and skipped;
// the stream keeps going. A bad() underlying stream throws.
class PgnReader {
 public:
  struct Options {
    // Mate scores (#n) are capped to finite centipawns.
    int mate_cap_centipawns = 12800;
  };
  using DiagnosticFn = std::function<void(const std::string&)>;

  explicit PgnReader(std::istream& in);
  PgnReader(std::istream& in, Options options, DiagnosticFn diagnostic = {});

  // Next well-formed game, or nullopt at end of input.
  std::optional<GameRecord> next();

  std::size_t games_returned() const { return games_returned_; }
  std::size_t games_skipped() const { return games_skipped_; }

 private:
  void report(const std::string& message);
  void skip_to_next_game();
  std::optional<GameRecord> parse_one();

  std::istream& in_;
  Options options_;
  DiagnosticFn diagnostic_;
  std::size_t games_returned_ = 0;
  std::size_t games_skipped_ = 0;
};

// Convenience for tests and small corpora.
std::vector<GameRecord> read_all_games(std::istream& in,
                                       PgnReader::Options options = {},
                                       PgnReader::DiagnosticFn diag = {});

}  // namespace pawnprint::pgn
