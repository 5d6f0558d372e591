#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pawnprint/pgn/game_record.hpp"
#include "pawnprint/util/toml.hpp"

namespace pawnprint::pgn {

// Per-player aggregates in one streaming pass. Rating moments use Welford's
// online update; merge() uses the parallel-variance combination, so partial
// accumulators from different threads or corpus chunks combine exactly.
struct PlayerStats {
  std::string player;
  std::int64_t games_total = 0;
  std::int64_t games_blitz = 0;
  std::int64_t games_as_white = 0;
  std::int64_t rated_games = 0;
  double rating_mean = 0.0;
  double rating_m2 = 0.0;  // sum of squared deviations
  std::int64_t wins = 0;
  std::int64_t draws = 0;
  std::int64_t losses = 0;
  Date first_game_date;
  Date last_game_date;
  bool titled = false;

  // Population variance of per-game ratings.
  double rating_variance() const {
    return rated_games > 0 ? rating_m2 / static_cast<double>(rated_games) : 0.0;
  }
  // Score fraction: wins plus half of draws, over games with a known result.
  double win_rate() const {
    const auto decided = wins + draws + losses;
    return decided > 0
               ? (static_cast<double>(wins) + 0.5 * static_cast<double>(draws)) /
                     static_cast<double>(decided)
               : 0.5;
  }
  double white_fraction() const {
    return games_total > 0 ? static_cast<double>(games_as_white) /
                                 static_cast<double>(games_total)
                           : 0.0;
  }
};

class StatsAccumulator {
 public:
  // Adds both sides of the game. Feed it the games you want counted; the
  // blitz counter only advances for blitz-classified records, everything
  // else aggregates over whatever is passed in.
  void add(const GameRecord& game);

  void merge(const StatsAccumulator& other);

  const std::map<std::string, PlayerStats>& stats() const { return stats_; }

 private:
  void add_side(const GameRecord& game, chess::Color side);
  std::map<std::string, PlayerStats> stats_;
};

// The player-selection filter. Defaults follow the documented recipe: over
// 1000 blitz games, mean rating in [1000, 2000], per-game rating variance at
// most 75, at least one game before 2020 and one from December 2020 on, no
// title, and win-rate / white-share windows to shut out result and color
// manipulation (those two windows are stand-in defaults, tune per corpus).
struct SelectionCriteria {
  std::int64_t min_games = 1000;
  double rating_low = 1000.0;
  double rating_high = 2000.0;
  double max_variance = 75.0;
  Date active_before{2020, 1, 1};   // needs a game strictly before this
  Date active_after{2020, 12, 1};   // and one on/after this
  bool exclude_titled = true;
  double win_rate_low = 0.35;
  double win_rate_high = 0.65;
  double white_fraction_low = 0.45;
  double white_fraction_high = 0.55;

  bool admits(const PlayerStats& s) const;

  static SelectionCriteria from_toml(const toml::Document& doc);
};

// Players satisfying every criterion, ordered by player id.
std::vector<std::string> select_players(
    const std::map<std::string, PlayerStats>& stats,
    const SelectionCriteria& criteria);

struct SetFractions {
  double exploration = 0.1;
  double evaluation = 0.8;
  double holdout = 0.1;
};

struct PlayerPartition {
  std::vector<std::string> exploration;
  std::vector<std::string> evaluation;
  std::vector<std::string> holdout;
};

// Seeded partition of players into exploration/evaluation/holdout,
// stratified by games-played bucket (1000/5000/10000/20000/30000/40000
// thresholds) so each set spans the activity range. Deterministic in
// (players, stats, seed).
PlayerPartition assign_player_sets(
    const std::vector<std::string>& players,
    const std::map<std::string, PlayerStats>& stats, const SetFractions& f,
    std::uint64_t seed);

}  // namespace pawnprint::pgn
