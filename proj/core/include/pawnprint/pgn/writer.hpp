#pragma once

#include <ostream>
#include <vector>

#include "pawnprint/pgn/game_record.hpp"

namespace pawnprint::pgn {

// Serializes a game back to PGN: seven-tag-roster-ish header from the
// record's tags, SAN movetext produced by replay, clock/eval annotations as
// Lichess-style brace comments. Mate-capped evals come out as their
// centipawn value, so a write/read cycle preserves the numbers this
// pipeline consumes.
void write_game(std::ostream& out, const GameRecord& game);

void write_games(std::ostream& out, const std::vector<GameRecord>& games);

}  // namespace pawnprint::pgn
