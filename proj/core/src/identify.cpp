#include "pawnprint/stylo/identify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pawnprint/chess/board.hpp"
#include "pawnprint/encode/planes.hpp"

namespace pawnprint::stylo {

using chess::Board;
using nn::NetConfig;

void ModelPool::validate() const {
  if (entries.empty()) {
    throw std::invalid_argument("model pool is empty");
  }
  for (const auto& e : entries) {
    if (!(e.checkpoint.config == entries.front().checkpoint.config)) {
      throw std::invalid_argument(
          "model pool mixes topologies: '" + e.player +
          "' differs from '" + entries.front().player + "'");
    }
  }
}

namespace {

struct SamplePosition {
  encode::InputPlanes planes;
  encode::LegalMask mask;
  std::uint16_t target;
};

std::vector<SamplePosition> collect_positions(
    const std::vector<SampleGame>& sample, int ply_floor) {
  std::vector<SamplePosition> out;
  for (const auto& [game, side] : sample) {
    Board board = Board::start_position();
    for (int ply = 0; ply < static_cast<int>(game.plies.size()); ++ply) {
      const chess::Move move = game.plies[static_cast<std::size_t>(ply)].move;
      if (board.side_to_move() == side && ply >= ply_floor) {
        SamplePosition pos;
        pos.planes = encode::encode_position(board);
        pos.mask = encode::legal_mask(board);
        pos.target =
            static_cast<std::uint16_t>(encode::move_index(board, move));
        out.push_back(std::move(pos));
      }
      board = board.apply_trusted(move);
    }
  }
  return out;
}

CandidateScore score_candidate(const std::string& player,
                               nn::PolicyValueNet& net,
                               const std::vector<SamplePosition>& positions) {
  CandidateScore score;
  score.player = player;
  score.predictions = positions.size();
  constexpr int kBatch = 256;
  const int slots = NetConfig::kPolicySlots;

  for (std::size_t begin = 0; begin < positions.size(); begin += kBatch) {
    const int batch = static_cast<int>(
        std::min<std::size_t>(kBatch, positions.size() - begin));
    const std::size_t n = static_cast<std::size_t>(batch) * 64;
    std::vector<float> planes(
        static_cast<std::size_t>(NetConfig::kInputPlanes) * n, 0.0f);
    for (int b = 0; b < batch; ++b) {
      const auto& p = positions[begin + static_cast<std::size_t>(b)].planes;
      for (int plane = 0; plane < NetConfig::kInputPlanes; ++plane) {
        float* dst =
            planes.data() + static_cast<std::size_t>(plane) * n + b * 64;
        for (int cell = 0; cell < 64; ++cell) {
          dst[cell] = p.at(plane, cell / 8, cell % 8);
        }
      }
    }
    const auto out = net.forward(planes.data(), batch, /*train_mode=*/false);
    for (int b = 0; b < batch; ++b) {
      const auto& pos = positions[begin + static_cast<std::size_t>(b)];
      const auto probs = nn::masked_policy(
          std::span<const float>(
              out.policy.data() + static_cast<std::size_t>(b) * slots,
              static_cast<std::size_t>(slots)),
          pos.mask);
      int best = -1;
      float best_p = -1.0f;
      for (int s = 0; s < slots; ++s) {
        if (!pos.mask.test(s)) continue;
        if (probs[static_cast<std::size_t>(s)] > best_p) {
          best_p = probs[static_cast<std::size_t>(s)];
          best = s;
        }
      }
      if (best == pos.target) score.accuracy += 1.0;
      score.mean_log_likelihood +=
          std::log(std::max(1e-30, double(probs[pos.target])));
    }
  }
  if (!positions.empty()) {
    score.accuracy /= static_cast<double>(positions.size());
    score.mean_log_likelihood /= static_cast<double>(positions.size());
  }
  return score;
}

}  // namespace

StylometryResult identify(const ModelPool& pool,
                          const std::vector<SampleGame>& sample,
                          eval::PlyCutoff cutoff, double threshold) {
  pool.validate();
  if (sample.empty()) {
    throw std::invalid_argument("identify: empty game sample");
  }
  if (threshold > 1.0) {
    throw std::invalid_argument("identify: threshold must be <= 1");
  }

  const auto positions = collect_positions(sample, eval::cutoff_floor(cutoff));
  if (positions.empty()) {
    throw std::invalid_argument(
        "identify: no eligible plies in the sample at cutoff " +
        eval::cutoff_name(cutoff));
  }

  StylometryResult result;
  result.games_used = sample.size();
  result.cutoff = eval::cutoff_name(cutoff);
  for (const auto& entry : pool.entries) {
    nn::PolicyValueNet net(entry.checkpoint.config);
    nn::load_into_net(net, entry.checkpoint);
    result.ranking.push_back(score_candidate(entry.player, net, positions));
  }
  std::sort(result.ranking.begin(), result.ranking.end(),
            [](const CandidateScore& a, const CandidateScore& b) {
              if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
              return a.player < b.player;
            });
  const CandidateScore& top = result.ranking.front();
  result.decision =
      threshold >= 0.0 && top.accuracy < threshold ? "unknown" : top.player;
  return result;
}

std::string accuracy_matrix_csv(
    const ModelPool& pool,
    const std::vector<std::pair<std::string, std::vector<SampleGame>>>&
        samples,
    eval::PlyCutoff cutoff) {
  pool.validate();
  std::string out = "player";
  for (const auto& entry : pool.entries) out += "," + entry.player;
  out += "\n";
  for (const auto& [player, sample] : samples) {
    const StylometryResult result = identify(pool, sample, cutoff);
    out += player;
    for (const auto& entry : pool.entries) {
      const auto it = std::find_if(
          result.ranking.begin(), result.ranking.end(),
          [&](const CandidateScore& s) { return s.player == entry.player; });
      char buf[32];
      std::snprintf(buf, sizeof(buf), ",%.6f", it->accuracy);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace pawnprint::stylo
