#include "pawnprint/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pawnprint/chess/board.hpp"
#include "pawnprint/encode/planes.hpp"
#include "pawnprint/eval/winprob.hpp"

namespace pawnprint::eval {

using chess::Board;
using chess::Color;
using nn::NetConfig;

int cutoff_floor(PlyCutoff cutoff) {
  switch (cutoff) {
    case PlyCutoff::All: return 0;
    case PlyCutoff::From10: return 10;
    case PlyCutoff::From30: return 30;
  }
  return 0;
}

std::string cutoff_name(PlyCutoff cutoff) {
  switch (cutoff) {
    case PlyCutoff::All: return "all";
    case PlyCutoff::From10: return "10+";
    case PlyCutoff::From30: return "30+";
  }
  return "all";
}

PlyCutoff parse_cutoff(const std::string& name) {
  if (name == "all") return PlyCutoff::All;
  if (name == "10+") return PlyCutoff::From10;
  if (name == "30+") return PlyCutoff::From30;
  throw std::invalid_argument("unknown ply cutoff: '" + name +
                              "' (expected all, 10+ or 30+)");
}

double cp_to_winprob(double centipawns, double slope) {
  return 1.0 / (1.0 + std::exp(-slope * centipawns));
}

namespace {

struct PendingPosition {
  std::size_t row;  // index into the output rows
  encode::InputPlanes planes;
  encode::LegalMask mask;
};

// Runs the net over pending positions in batches and fills the row results.
void flush_batch(nn::PolicyValueNet& net, std::vector<PendingPosition>& queue,
                 std::vector<PredictionRow>& rows) {
  if (queue.empty()) return;
  const int batch = static_cast<int>(queue.size());
  const std::size_t n = static_cast<std::size_t>(batch) * 64;
  std::vector<float> planes(static_cast<std::size_t>(NetConfig::kInputPlanes) * n,
                            0.0f);
  for (int b = 0; b < batch; ++b) {
    const auto& p = queue[static_cast<std::size_t>(b)].planes;
    for (int plane = 0; plane < NetConfig::kInputPlanes; ++plane) {
      float* dst = planes.data() + static_cast<std::size_t>(plane) * n + b * 64;
      for (int cell = 0; cell < 64; ++cell) {
        dst[cell] = p.at(plane, cell / 8, cell % 8);
      }
    }
  }
  const auto out = net.forward(planes.data(), batch, /*train_mode=*/false);
  const int slots = NetConfig::kPolicySlots;
  for (int b = 0; b < batch; ++b) {
    const PendingPosition& pending = queue[static_cast<std::size_t>(b)];
    PredictionRow& row = rows[pending.row];
    const auto probs = nn::masked_policy(
        std::span<const float>(
            out.policy.data() + static_cast<std::size_t>(b) * slots,
            static_cast<std::size_t>(slots)),
        pending.mask);
    int best = -1;
    float best_p = -1.0f;
    int rank = 0;
    const float target_p = probs[row.target];
    for (int s = 0; s < slots; ++s) {
      if (!pending.mask.test(s)) continue;
      const float p = probs[static_cast<std::size_t>(s)];
      if (p > best_p) {
        best_p = p;
        best = s;
      }
      if (p > target_p || (p == target_p && s < row.target)) ++rank;
    }
    row.correct = best == row.target;
    row.target_rank = rank;
    row.target_prob = target_p;
    row.top_prob = best_p;
  }
  queue.clear();
}

}  // namespace

std::vector<PredictionRow> predict_rows(nn::PolicyValueNet& net,
                                        const std::vector<pgn::GameRecord>& games,
                                        const std::string& player,
                                        int ply_floor, double winprob_slope) {
  // Canonical game order, so results do not depend on how the caller
  // shuffled the list.
  std::vector<const pgn::GameRecord*> ordered;
  ordered.reserve(games.size());
  for (const auto& g : games) ordered.push_back(&g);
  std::sort(ordered.begin(), ordered.end(),
            [](const pgn::GameRecord* a, const pgn::GameRecord* b) {
              return a->game_id() < b->game_id();
            });

  std::vector<PredictionRow> rows;
  std::vector<PendingPosition> queue;
  constexpr int kBatch = 256;

  for (std::size_t gi = 0; gi < ordered.size(); ++gi) {
    const pgn::GameRecord& game = *ordered[gi];
    const Color side = game.color_of(player);
    Board board = Board::start_position();
    for (int ply = 0; ply < static_cast<int>(game.plies.size()); ++ply) {
      const chess::Move move =
          game.plies[static_cast<std::size_t>(ply)].move;
      if (board.side_to_move() == side && ply >= ply_floor) {
        PredictionRow row;
        row.game_index = gi;
        row.ply = ply;
        row.target = static_cast<std::uint16_t>(encode::move_index(board, move));
        row.position_key = board.position_key();

        // Move quality from the eval annotations: mover win probability
        // after the move against the position's annotated optimum (the
        // pre-move eval), clamped non-positive.
        const auto& anno = game.plies[static_cast<std::size_t>(ply)];
        std::optional<int> before_cp;
        if (ply == 0) {
          before_cp = 0;
        } else if (game.plies[static_cast<std::size_t>(ply - 1)]
                       .eval_centipawns) {
          before_cp = *game.plies[static_cast<std::size_t>(ply - 1)]
                           .eval_centipawns;
        }
        if (anno.eval_centipawns && before_cp) {
          const double sign = side == Color::White ? 1.0 : -1.0;
          const double wp_after =
              cp_to_winprob(sign * *anno.eval_centipawns, winprob_slope);
          const double wp_before =
              cp_to_winprob(sign * *before_cp, winprob_slope);
          row.quality_delta = std::min(0.0, wp_after - wp_before);
        }

        PendingPosition pending;
        pending.row = rows.size();
        pending.planes = encode::encode_position(board);
        pending.mask = encode::legal_mask(board);
        rows.push_back(row);
        queue.push_back(std::move(pending));
        if (static_cast<int>(queue.size()) >= kBatch) {
          flush_batch(net, queue, rows);
        }
      }
      board = board.apply_trusted(move);
    }
  }
  flush_batch(net, queue, rows);
  return rows;
}

MatchMetrics move_match(nn::PolicyValueNet& net,
                        const std::vector<pgn::GameRecord>& games,
                        const std::string& player, PlyCutoff cutoff,
                        int max_k) {
  const auto rows = predict_rows(net, games, player, cutoff_floor(cutoff));
  if (rows.empty()) {
    throw std::invalid_argument(
        "move_match: no eligible plies at cutoff " + cutoff_name(cutoff));
  }
  MatchMetrics m;
  m.predictions = rows.size();

  std::map<std::size_t, std::pair<std::size_t, std::size_t>> per_game;
  for (const auto& row : rows) {
    auto& [correct, total] = per_game[row.game_index];
    total += 1;
    if (row.correct) {
      correct += 1;
      m.accuracy += 1.0;
    }
    for (int k = 1; k <= max_k; ++k) {
      if (row.target_rank < k) m.top_k[k] += 1.0;
    }
  }
  m.accuracy /= static_cast<double>(rows.size());
  for (auto& [k, v] : m.top_k) v /= static_cast<double>(rows.size());
  m.games_used = per_game.size();
  m.games_skipped = games.size() - per_game.size();

  // Spread of per-game accuracies.
  if (per_game.size() > 1) {
    double mean = 0.0;
    for (const auto& [gi, counts] : per_game) {
      mean += static_cast<double>(counts.first) /
              static_cast<double>(counts.second);
    }
    mean /= static_cast<double>(per_game.size());
    double ss = 0.0;
    for (const auto& [gi, counts] : per_game) {
      const double a = static_cast<double>(counts.first) /
                       static_cast<double>(counts.second);
      ss += (a - mean) * (a - mean);
    }
    m.accuracy_std = std::sqrt(ss / static_cast<double>(per_game.size()));
  }
  return m;
}

double PlyCurvePoint::accuracy() const {
  return total ? static_cast<double>(correct) / static_cast<double>(total)
               : 0.0;
}
std::optional<double> PlyCurvePoint::seen_accuracy() const {
  if (seen_total == 0) return std::nullopt;
  return static_cast<double>(seen_correct) / static_cast<double>(seen_total);
}
std::optional<double> PlyCurvePoint::unseen_accuracy() const {
  const std::size_t unseen = total - seen_total;
  if (unseen == 0) return std::nullopt;
  return static_cast<double>(correct - seen_correct) /
         static_cast<double>(unseen);
}
double PlyCurvePoint::seen_fraction() const {
  return total ? static_cast<double>(seen_total) / static_cast<double>(total)
               : 0.0;
}

std::vector<PlyCurvePoint> per_ply_curve(
    nn::PolicyValueNet& net, const std::vector<pgn::GameRecord>& games,
    const std::string& player, const data::PositionIndex& seen) {
  const auto rows = predict_rows(net, games, player, 0);
  std::map<int, PlyCurvePoint> curve;
  for (const auto& row : rows) {
    PlyCurvePoint& point = curve[row.ply];
    point.ply = row.ply;
    point.total += 1;
    const bool was_seen = seen.contains(row.position_key);
    if (was_seen) point.seen_total += 1;
    if (row.correct) {
      point.correct += 1;
      if (was_seen) point.seen_correct += 1;
    }
  }
  std::vector<PlyCurvePoint> out;
  out.reserve(curve.size());
  for (const auto& [ply, point] : curve) out.push_back(point);
  return out;
}

std::vector<CalibrationBin> calibration(
    nn::PolicyValueNet& net, const std::vector<pgn::GameRecord>& games,
    const std::string& player, int bins, PlyCutoff cutoff) {
  if (bins < 1) throw std::invalid_argument("calibration: bins must be >= 1");
  const auto rows = predict_rows(net, games, player, cutoff_floor(cutoff));
  std::vector<CalibrationBin> out(static_cast<std::size_t>(bins));
  for (int i = 0; i < bins; ++i) {
    out[static_cast<std::size_t>(i)].lo = static_cast<double>(i) / bins;
    out[static_cast<std::size_t>(i)].hi = static_cast<double>(i + 1) / bins;
  }
  for (const auto& row : rows) {
    int bin = static_cast<int>(static_cast<double>(row.top_prob) * bins);
    bin = std::clamp(bin, 0, bins - 1);
    out[static_cast<std::size_t>(bin)].count += 1;
    if (row.correct) out[static_cast<std::size_t>(bin)].correct += 1;
  }
  return out;
}

QualityTable quality_bins(nn::PolicyValueNet& net,
                          const std::vector<pgn::GameRecord>& games,
                          const std::string& player,
                          std::span<const double> edges, PlyCutoff cutoff,
                          double winprob_slope) {
  if (edges.size() < 2) {
    throw std::invalid_argument("quality_bins: need at least two edges");
  }
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i - 1] < edges[i])) {
      throw std::invalid_argument("quality_bins: edges must increase");
    }
  }

  std::size_t without_evals = 0;
  std::vector<pgn::GameRecord> with_evals;
  for (const auto& g : games) {
    if (g.has_evals()) {
      with_evals.push_back(g);
    } else {
      ++without_evals;
    }
  }
  QualityTable table;
  table.games_without_evals = without_evals;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    table.bins.push_back({edges[i], edges[i + 1], 0, 0});
  }
  if (with_evals.empty()) return table;

  const auto rows = predict_rows(net, with_evals, player,
                                 cutoff_floor(cutoff), winprob_slope);
  for (const auto& row : rows) {
    if (!row.quality_delta) continue;
    const double d = *row.quality_delta;
    for (auto& bin : table.bins) {
      const bool last = &bin == &table.bins.back();
      if (d >= bin.lo && (d < bin.hi || (last && d <= bin.hi))) {
        bin.count += 1;
        if (row.correct) bin.correct += 1;
        break;
      }
    }
  }
  return table;
}

double split_delta(nn::PolicyValueNet& net,
                   const std::vector<pgn::GameRecord>& test_games,
                   const std::vector<pgn::GameRecord>& future_games,
                   const std::string& player, PlyCutoff cutoff) {
  if (test_games.empty() || future_games.empty()) {
    throw std::invalid_argument("split_delta: both splits must be nonempty");
  }
  const MatchMetrics test = move_match(net, test_games, player, cutoff);
  const MatchMetrics future = move_match(net, future_games, player, cutoff);
  return future.accuracy - test.accuracy;
}

}  // namespace pawnprint::eval
