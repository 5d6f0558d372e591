#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pawnprint/pgn/game_record.hpp"

namespace pawnprint::data {

// Per-player game split: everything inside the future window goes to the
// future set; the rest is shuffled by seed and cut train/validation/test.
struct SplitSpec {
  double train_fraction = 0.8;
  double validation_fraction = 0.1;
  double test_fraction = 0.1;
  pgn::Date future_start{2020, 12, 1};
  pgn::Date future_end{2020, 12, 31};
  std::uint64_t seed = 0;
};

struct GameSplit {
  std::vector<pgn::GameRecord> train;
  std::vector<pgn::GameRecord> validation;
  std::vector<pgn::GameRecord> test;
  std::vector<pgn::GameRecord> future;
};

// The partition depends only on (game ids, seed): input order is irrelevant.
// Throws on empty input or fractions not summing to 1.
GameSplit split_games(std::vector<pgn::GameRecord> games,
                      const SplitSpec& spec);

// JSON manifest with the spec, seed and per-set game ids, byte-stable for a
// given split.
std::string split_manifest(const GameSplit& split, const SplitSpec& spec);

}  // namespace pawnprint::data
