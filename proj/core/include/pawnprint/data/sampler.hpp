#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pawnprint/data/example.hpp"
#include "pawnprint/pgn/game_record.hpp"

namespace pawnprint::data {

// Ply sampling distribution: an unnormalized Beta(alpha, beta) density
// evaluated at the ply midpoint x = (ply + 0.5) / ply_scale, zero outside
// [0, 1). Defaults weight the middlegame most (mode at ply 25).
struct SamplerConfig {
  double alpha = 2.0;
  double beta = 6.0;
  double ply_scale = 150.0;
  int ply_floor = 0;          // plies below this get zero weight
  bool target_color_only = true;
};

double ply_weight(int ply, const SamplerConfig& cfg);

// Draws `count` training examples (with replacement) from the player's games.
// Eligible plies are those where the player is the mover (when
// target_color_only) with positive weight; draw probability is proportional
// to ply_weight. Output order groups by game id, then ply, so the result is
// a pure function of (games, player, cfg, count, seed).
//
// Throws if the player is not a side of every game.
std::vector<PackedExample> sample_examples(
    const std::vector<pgn::GameRecord>& games, const std::string& player,
    const SamplerConfig& cfg, std::size_t count, std::uint64_t seed);

// Every eligible ply exactly once (no weighting); used by evaluation.
std::vector<PackedExample> all_examples(
    const std::vector<pgn::GameRecord>& games, const std::string& player,
    int ply_floor = 0);

}  // namespace pawnprint::data
