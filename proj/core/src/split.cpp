#include "pawnprint/data/split.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "pawnprint/util/hash.hpp"
#include "pawnprint/util/rng.hpp"

namespace pawnprint::data {

GameSplit split_games(std::vector<pgn::GameRecord> games,
                      const SplitSpec& spec) {
  if (games.empty()) throw std::invalid_argument("split_games: no games");
  const double total =
      spec.train_fraction + spec.validation_fraction + spec.test_fraction;
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("split fractions must sum to 1");
  }

  GameSplit out;
  std::vector<pgn::GameRecord> pool;
  for (auto& g : games) {
    if (!g.date.valid()) {
      throw std::invalid_argument("split_games: game without a date");
    }
    if (g.date >= spec.future_start && g.date <= spec.future_end) {
      out.future.push_back(std::move(g));
    } else {
      pool.push_back(std::move(g));
    }
  }

  // Canonical order first so the shuffle sees ids, not input order.
  std::sort(pool.begin(), pool.end(),
            [](const pgn::GameRecord& a, const pgn::GameRecord& b) {
              return a.game_id() < b.game_id();
            });
  Rng rng(derive_seed(spec.seed, 0x59117, pool.size()));
  rng.shuffle(pool);

  const double n = static_cast<double>(pool.size());
  std::size_t n_train =
      static_cast<std::size_t>(std::floor(n * spec.train_fraction));
  std::size_t n_val =
      static_cast<std::size_t>(std::floor(n * spec.validation_fraction));
  std::size_t n_test =
      static_cast<std::size_t>(std::floor(n * spec.test_fraction));
  // Largest remainder fills whatever flooring left over.
  const double rem_train = n * spec.train_fraction - std::floor(n * spec.train_fraction);
  const double rem_val =
      n * spec.validation_fraction - std::floor(n * spec.validation_fraction);
  const double rem_test = n * spec.test_fraction - std::floor(n * spec.test_fraction);
  std::size_t assigned = n_train + n_val + n_test;
  std::vector<std::pair<double, int>> order{{rem_train, 0}, {rem_val, 1},
                                            {rem_test, 2}};
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < pool.size(); ++assigned, ++i) {
    switch (order[i % 3].second) {
      case 0: ++n_train; break;
      case 1: ++n_val; break;
      default: ++n_test; break;
    }
  }

  std::size_t pos = 0;
  for (std::size_t i = 0; i < n_train; ++i) out.train.push_back(std::move(pool[pos++]));
  for (std::size_t i = 0; i < n_val; ++i) out.validation.push_back(std::move(pool[pos++]));
  for (std::size_t i = 0; i < n_test; ++i) out.test.push_back(std::move(pool[pos++]));
  return out;
}

std::string split_manifest(const GameSplit& split, const SplitSpec& spec) {
  nlohmann::json doc;
  doc["seed"] = spec.seed;
  doc["fractions"] = {{"train", spec.train_fraction},
                      {"validation", spec.validation_fraction},
                      {"test", spec.test_fraction}};
  doc["future_window"] = {spec.future_start.iso(), spec.future_end.iso()};
  auto ids = [](const std::vector<pgn::GameRecord>& games) {
    std::vector<std::string> out;
    out.reserve(games.size());
    for (const auto& g : games) out.push_back(hex64(g.game_id()));
    return out;
  };
  doc["sets"] = {{"train", ids(split.train)},
                 {"validation", ids(split.validation)},
                 {"test", ids(split.test)},
                 {"future", ids(split.future)}};
  return doc.dump(2) + "\n";
}

}  // namespace pawnprint::data
