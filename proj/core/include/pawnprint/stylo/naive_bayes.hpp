#pragma once

#include <map>
#include <string>
#include <vector>

#include "pawnprint/pgn/game_record.hpp"

namespace pawnprint::stylo {

// Centipawn losses of one side's moves, from the mover's perspective,
// clamped non-negative. The pre-game evaluation counts as 0. Throws when a
// needed annotation is missing.
std::vector<double> centipawn_loss_vector(const pgn::GameRecord& game,
                                          chess::Color side);

// Gaussian Naive Bayes over per-ply centipawn losses, one classifier per
// game-length bucket (bucket = own-ply count / bucket_width). Loss vectors
// inside a bucket are truncated to the bucket's guaranteed length. Class
// priors are uniform; variances are floored.
struct NbModel {
  struct ClassStats {
    std::vector<double> mean;
    std::vector<double> variance;
    std::size_t games = 0;
  };
  int bucket_width = 10;
  double variance_floor = 1.0;
  // bucket -> player -> per-position Gaussians
  std::map<int, std::map<std::string, ClassStats>> buckets;

  int bucket_of(std::size_t own_plies) const {
    return static_cast<int>(own_plies) / bucket_width;
  }
  int feature_length(int bucket) const {
    return std::max(1, bucket * bucket_width);
  }
};

// Trains from each player's games; the player's side in every game is found
// by name.
NbModel nb_train(
    const std::map<std::string, std::vector<pgn::GameRecord>>& games_per_player,
    int bucket_width = 10, double variance_floor = 1.0);

// Ranked (player, log-posterior) for one game, best first, ties by id. A
// game whose length bucket was never trained falls back to the nearest
// trained bucket.
std::vector<std::pair<std::string, double>> nb_identify(
    const NbModel& model, const pgn::GameRecord& game, chess::Color side);

}  // namespace pawnprint::stylo
