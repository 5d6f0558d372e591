#pragma once

#include <string>
#include <vector>

#include "pawnprint/eval/metrics.hpp"

namespace pawnprint::eval {

// The full structured evaluation output the CLI emits. Serializes to JSON
// (lossless, re-parseable) and to a flat CSV with one row per (slice, bin).
struct EvalReport {
  std::string player_id;
  std::string model_id;
  std::string split_name;
  std::string cutoff;

  double accuracy = 0.0;
  double accuracy_std = 0.0;
  std::map<int, double> top_k;
  std::size_t predictions = 0;
  std::size_t games_used = 0;
  std::size_t games_skipped = 0;
  std::size_t games_without_evals = 0;

  std::vector<PlyCurvePoint> per_ply;
  std::vector<CalibrationBin> calibration;
  std::vector<QualityBin> quality;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Assembles the whole report in one sweep over the games.
EvalReport evaluate_player(nn::PolicyValueNet& net,
                           const std::vector<pgn::GameRecord>& games,
                           const std::string& player,
                           const data::PositionIndex* seen_index,
                           PlyCutoff cutoff, const std::string& model_id,
                           const std::string& split_name);

std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(const std::string& text);
std::string report_to_csv(const EvalReport& report);

}  // namespace pawnprint::eval
