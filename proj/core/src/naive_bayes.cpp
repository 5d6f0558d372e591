#include "pawnprint/stylo/naive_bayes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pawnprint::stylo {

using chess::Color;

std::vector<double> centipawn_loss_vector(const pgn::GameRecord& game,
                                          Color side) {
  std::vector<double> losses;
  const int parity = side == Color::White ? 0 : 1;
  const double sign = side == Color::White ? 1.0 : -1.0;
  for (int ply = 0; ply < static_cast<int>(game.plies.size()); ++ply) {
    if (ply % 2 != parity) continue;
    const auto& after = game.plies[static_cast<std::size_t>(ply)];
    if (!after.eval_centipawns) {
      throw std::invalid_argument(
          "centipawn_loss_vector: missing eval at ply " + std::to_string(ply));
    }
    double before_cp = 0.0;
    if (ply > 0) {
      const auto& prev = game.plies[static_cast<std::size_t>(ply - 1)];
      if (!prev.eval_centipawns) {
        throw std::invalid_argument(
            "centipawn_loss_vector: missing eval at ply " +
            std::to_string(ply - 1));
      }
      before_cp = static_cast<double>(*prev.eval_centipawns);
    }
    const double after_cp = static_cast<double>(*after.eval_centipawns);
    // Loss from the mover's perspective: how much the move gave away.
    losses.push_back(std::max(0.0, sign * (before_cp - after_cp)));
  }
  return losses;
}

NbModel nb_train(
    const std::map<std::string, std::vector<pgn::GameRecord>>& games_per_player,
    int bucket_width, double variance_floor) {
  if (bucket_width < 1) {
    throw std::invalid_argument("nb_train: bucket_width must be >= 1");
  }
  NbModel model;
  model.bucket_width = bucket_width;
  model.variance_floor = variance_floor;

  // First pass: per (bucket, player) accumulate sums over truncated vectors.
  struct Acc {
    std::vector<double> sum, sum_sq;
    std::size_t games = 0;
  };
  std::map<int, std::map<std::string, Acc>> acc;
  for (const auto& [player, games] : games_per_player) {
    for (const auto& game : games) {
      const Color side = game.color_of(player);
      const auto losses = centipawn_loss_vector(game, side);
      if (losses.empty()) continue;
      const int bucket = model.bucket_of(losses.size());
      const int len = model.feature_length(bucket);
      Acc& a = acc[bucket][player];
      if (a.sum.empty()) {
        a.sum.assign(static_cast<std::size_t>(len), 0.0);
        a.sum_sq.assign(static_cast<std::size_t>(len), 0.0);
      }
      for (int i = 0; i < len; ++i) {
        const double v = losses[static_cast<std::size_t>(i)];
        a.sum[static_cast<std::size_t>(i)] += v;
        a.sum_sq[static_cast<std::size_t>(i)] += v * v;
      }
      ++a.games;
    }
  }

  for (const auto& [bucket, players] : acc) {
    for (const auto& [player, a] : players) {
      NbModel::ClassStats stats;
      stats.games = a.games;
      const double n = static_cast<double>(a.games);
      stats.mean.resize(a.sum.size());
      stats.variance.resize(a.sum.size());
      for (std::size_t i = 0; i < a.sum.size(); ++i) {
        const double mean = a.sum[i] / n;
        stats.mean[i] = mean;
        stats.variance[i] =
            std::max(variance_floor, a.sum_sq[i] / n - mean * mean);
      }
      model.buckets[bucket][player] = std::move(stats);
    }
  }
  if (model.buckets.empty()) {
    throw std::invalid_argument("nb_train: no usable training games");
  }
  return model;
}

std::vector<std::pair<std::string, double>> nb_identify(
    const NbModel& model, const pgn::GameRecord& game, Color side) {
  const auto losses = centipawn_loss_vector(game, side);
  if (model.buckets.empty()) {
    throw std::invalid_argument("nb_identify: untrained model");
  }
  const int wanted = model.bucket_of(losses.size());
  // Nearest trained bucket; ties resolve toward the shorter bucket.
  int best_bucket = model.buckets.begin()->first;
  for (const auto& [bucket, players] : model.buckets) {
    if (std::abs(bucket - wanted) < std::abs(best_bucket - wanted)) {
      best_bucket = bucket;
    }
  }
  const auto& classes = model.buckets.at(best_bucket);

  // Uniform prior; product of per-position Gaussians in log space. The
  // vector is truncated (or padded with zero losses) to the bucket's
  // feature length.
  const int len = model.feature_length(best_bucket);
  std::vector<std::pair<std::string, double>> ranked;
  for (const auto& [player, stats] : classes) {
    double log_post = -std::log(static_cast<double>(classes.size()));
    for (int i = 0; i < len; ++i) {
      const double x = i < static_cast<int>(losses.size())
                           ? losses[static_cast<std::size_t>(i)]
                           : 0.0;
      const double var = stats.variance[static_cast<std::size_t>(i)];
      const double d = x - stats.mean[static_cast<std::size_t>(i)];
      log_post += -0.5 * (std::log(2.0 * std::numbers::pi * var) +
                          d * d / var);
    }
    ranked.push_back({player, log_post});
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return ranked;
}

}  // namespace pawnprint::stylo
