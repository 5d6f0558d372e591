#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pawnprint/data/position_index.hpp"
#include "pawnprint/nn/net.hpp"
#include "pawnprint/pgn/game_record.hpp"

namespace pawnprint::eval {

// Ply cutoff presets: all plies, from ply 10, from ply 30.
enum class PlyCutoff { All, From10, From30 };
int cutoff_floor(PlyCutoff cutoff);
std::string cutoff_name(PlyCutoff cutoff);
PlyCutoff parse_cutoff(const std::string& name);  // "all" | "10+" | "30+"

// One model decision at one position the target player faced.
struct PredictionRow {
  std::size_t game_index = 0;
  int ply = 0;
  std::uint16_t target = 0;
  bool correct = false;        // argmax (lowest-index ties) == target
  int target_rank = 0;         // 0 = predicted first
  float target_prob = 0.0f;
  float top_prob = 0.0f;
  std::uint64_t position_key = 0;
  //

  // Win-probability drop of the played move against the annotated optimum,
  // present only when the game carries engine evals.
  std::optional<double> quality_delta;
};

// Replays every game, runs the model on each position where the player is
// to move at ply >= floor, and collects one row per decision. Rows come
// back ordered by (game id, ply) regardless of input order or batching.
std::vector<PredictionRow> predict_rows(nn::PolicyValueNet& net,
                                        const std::vector<pgn::GameRecord>& games,
                                        const std::string& player,
                                        int ply_floor,
                                        double winprob_slope = 0.00368);

struct MatchMetrics {
  double accuracy = 0.0;
  double accuracy_std = 0.0;  // std of per-game accuracies
  std::map<int, double> top_k;
  std::size_t predictions = 0;
  std::size_t games_used = 0;
  std::size_t games_skipped = 0;  // no eligible plies under the cutoff
};

// Move-matching accuracy over the player's moves at the cutoff; games with
// no eligible plies are skipped and counted. Throws when nothing is
// eligible at all.
MatchMetrics move_match(nn::PolicyValueNet& net,
                        const std::vector<pgn::GameRecord>& games,
                        const std::string& player, PlyCutoff cutoff,
                        int max_k = 3);

struct PlyCurvePoint {
  int ply = 0;
  std::size_t total = 0;
  std::size_t correct = 0;
  std::size_t seen_total = 0;
  std::size_t seen_correct = 0;
  double accuracy() const;
  std::optional<double> seen_accuracy() const;
  std::optional<double> unseen_accuracy() const;
  double seen_fraction() const;

  friend bool operator==(const PlyCurvePoint&, const PlyCurvePoint&) = default;
};

// Per-ply accuracy split by whether the position appears in the player's
// training index. Plies with no samples are absent from the result.
std::vector<PlyCurvePoint> per_ply_curve(
    nn::PolicyValueNet& net, const std::vector<pgn::GameRecord>& games,
    const std::string& player, const data::PositionIndex& seen);

struct CalibrationBin {
  double lo = 0.0, hi = 0.0;
  std::size_t count = 0;
  std::size_t correct = 0;

  friend bool operator==(const CalibrationBin&, const CalibrationBin&) = default;
};

// Histogram of top-move probabilities against empirical accuracy. bins
// gives the number of equal-width cells partitioning [0, 1].
std::vector<CalibrationBin> calibration(
    nn::PolicyValueNet& net, const std::vector<pgn::GameRecord>& games,
    const std::string& player, int bins, PlyCutoff cutoff = PlyCutoff::All);

struct QualityBin {
  double lo = 0.0, hi = 0.0;  // win-probability delta range, <= 0
  std::size_t count = 0;
  std::size_t correct = 0;

  friend bool operator==(const QualityBin&, const QualityBin&) = default;
};

struct QualityTable {
  std::vector<QualityBin> bins;
  std::size_t games_without_evals = 0;
};

// Accuracy as a function of played-move quality: the (non-positive) change
// in mover win probability against the annotated optimum. edges must be
// increasing and end at 0.
QualityTable quality_bins(nn::PolicyValueNet& net,
                          const std::vector<pgn::GameRecord>& games,
                          const std::string& player,
                          std::span<const double> edges,
                          PlyCutoff cutoff = PlyCutoff::All,
                          double winprob_slope = 0.00368);

// future-set accuracy minus test-set accuracy, same cutoff.
double split_delta(nn::PolicyValueNet& net,
                   const std::vector<pgn::GameRecord>& test_games,
                   const std::vector<pgn::GameRecord>& future_games,
                   const std::string& player, PlyCutoff cutoff);

}  // namespace pawnprint::eval
