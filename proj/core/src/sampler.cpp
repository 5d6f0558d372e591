#include "pawnprint/data/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "pawnprint/chess/board.hpp"
#include "pawnprint/encode/planes.hpp"
#include "pawnprint/util/rng.hpp"

namespace pawnprint::data {

double ply_weight(int ply, const SamplerConfig& cfg) {
  if (ply < 0 || ply < cfg.ply_floor) return 0.0;
  const double x = (static_cast<double>(ply) + 0.5) / cfg.ply_scale;
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return std::pow(x, cfg.alpha - 1.0) * std::pow(1.0 - x, cfg.beta - 1.0);
}

namespace {

struct GameKey {
  std::uint64_t id;
  const pgn::GameRecord* game;
  chess::Color side;
};

std::vector<GameKey> ordered_games(const std::vector<pgn::GameRecord>& games,
                                   const std::string& player) {
  std::vector<GameKey> out;
  out.reserve(games.size());
  for (const auto& g : games) {
    out.push_back({g.game_id(), &g, g.color_of(player)});  // throws if absent
  }
  std::sort(out.begin(), out.end(),
            [](const GameKey& a, const GameKey& b) { return a.id < b.id; });
  return out;
}

// Encodes the requested plies of one game; plies must be sorted ascending.
// emit is called once per (ply, board-before-move, move).
template <typename Emit>
void replay_at(const pgn::GameRecord& game,
               const std::vector<int>& plies, Emit&& emit) {
  chess::Board board = chess::Board::start_position();
  std::size_t next = 0;
  for (int ply = 0; ply < static_cast<int>(game.plies.size()); ++ply) {
    if (next >= plies.size()) break;
    const chess::Move& move = game.plies[static_cast<std::size_t>(ply)].move;
    if (plies[next] == ply) {
      emit(ply, board, move);
      ++next;
    }
    board = board.apply_trusted(move);
  }
  if (next != plies.size()) {
    throw std::logic_error("replay_at: requested ply beyond game end");
  }
}

PackedExample make_example(const chess::Board& board, const chess::Move& move,
                           std::uint64_t player, std::uint64_t game_id,
                           int ply) {
  TrainingExample e;
  e.planes = encode::encode_position(board);
  e.target = static_cast<std::uint16_t>(encode::move_index(board, move));
  e.player = player;
  e.game = game_id;
  e.ply = static_cast<std::uint16_t>(ply);
  e.side = board.side_to_move();
  return PackedExample::pack(e);
}

}  // namespace

std::vector<PackedExample> sample_examples(
    const std::vector<pgn::GameRecord>& games, const std::string& player,
    const SamplerConfig& cfg, std::size_t count, std::uint64_t seed) {
  const auto order = ordered_games(games, player);
  const std::uint64_t player_hash = player_ref(player);

  // Flat eligible (game, ply) list with weights, in canonical order.
  struct Slot {
    std::size_t game_pos;
    int ply;
  };
  std::vector<Slot> slots;
  std::vector<double> weights;
  for (std::size_t gi = 0; gi < order.size(); ++gi) {
    const auto& g = *order[gi].game;
    const int parity = order[gi].side == chess::Color::White ? 0 : 1;
    for (int ply = 0; ply < static_cast<int>(g.plies.size()); ++ply) {
      if (cfg.target_color_only && ply % 2 != parity) continue;
      const double w = ply_weight(ply, cfg);
      if (w <= 0.0) continue;
      slots.push_back({gi, ply});
      weights.push_back(w);
    }
  }

  std::vector<PackedExample> out;
  if (count == 0) return out;
  if (slots.empty()) {
    throw std::invalid_argument("sample_examples: no eligible plies");
  }

  WeightedPicker picker(weights);
  Rng rng(derive_seed(seed, player_hash, 0x5a3413));
  std::map<std::size_t, std::uint32_t> multiplicity;  // slot index -> draws
  for (std::size_t i = 0; i < count; ++i) {
    ++multiplicity[picker.pick(rng)];
  }

  // Group drawn plies per game, replay each game once.
  std::map<std::size_t, std::vector<std::pair<int, std::uint32_t>>> per_game;
  for (const auto& [slot_idx, times] : multiplicity) {
    per_game[slots[slot_idx].game_pos].push_back({slots[slot_idx].ply, times});
  }
  out.reserve(count);
  for (const auto& [game_pos, drawn] : per_game) {
    std::vector<int> plies;
    plies.reserve(drawn.size());
    for (const auto& [ply, times] : drawn) plies.push_back(ply);
    const auto& key = order[game_pos];
    std::size_t cursor = 0;
    replay_at(*key.game, plies,
              [&](int ply, const chess::Board& board, const chess::Move& move) {
                const PackedExample e =
                    make_example(board, move, player_hash, key.id, ply);
                for (std::uint32_t c = 0; c < drawn[cursor].second; ++c) {
                  out.push_back(e);
                }
                ++cursor;
              });
  }
  return out;
}

std::vector<PackedExample> all_examples(
    const std::vector<pgn::GameRecord>& games, const std::string& player,
    int ply_floor) {
  const auto order = ordered_games(games, player);
  std::vector<PackedExample> out;
  for (const auto& key : order) {
    const int parity = key.side == chess::Color::White ? 0 : 1;
    std::vector<int> plies;
    for (int ply = std::max(0, ply_floor);
         ply < static_cast<int>(key.game->plies.size()); ++ply) {
      if (ply % 2 == parity) plies.push_back(ply);
    }
    replay_at(*key.game, plies,
              [&](int ply, const chess::Board& board, const chess::Move& move) {
                out.push_back(make_example(board, move, player_ref(player),
                                           key.id, ply));
              });
  }
  return out;
}

}  // namespace pawnprint::data
