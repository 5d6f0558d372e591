#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "pawnprint/chess/board.hpp"
#include "pawnprint/data/position_index.hpp"
#include "pawnprint/data/sampler.hpp"
#include "pawnprint/data/shard.hpp"
#include "pawnprint/data/split.hpp"
#include "pawnprint/encode/planes.hpp"
#include "pawnprint/util/rng.hpp"

using namespace pawnprint;
using namespace pawnprint::data;
using namespace pawnprint::chess;

namespace {

pgn::GameRecord tagged_game(int id, const pgn::Date& date) {
  pgn::GameRecord g;
  g.tags["Site"] = "local/" + std::to_string(id);
  g.tags["White"] = "w" + std::to_string(id % 7);
  g.tags["Black"] = "b" + std::to_string(id % 5);
  g.date = date;
  return g;
}

// A short real game between the two named players, with a unique site tag.
pgn::GameRecord played_game(const std::string& white, const std::string& black,
                            const std::vector<std::string>& moves, int id,
                            const pgn::Date& date = {2020, 3, 14}) {
  pgn::GameRecord g;
  g.tags["Site"] = "local/" + std::to_string(id);
  g.tags["White"] = white;
  g.tags["Black"] = black;
  g.tags["Result"] = "*";
  g.date = date;
  Board b = Board::start_position();
  for (const auto& u : moves) {
    const Move m = Move::from_uci(u);
    b = b.apply_move(m);
    g.plies.push_back({m, std::nullopt, std::nullopt});
  }
  return g;
}

const std::vector<std::string> kSampleLine = {
    "e2e4", "e7e5", "g1f3", "b8c6", "f1b5", "g8f6", "e1g1", "f6e4",
    "f1e1", "e4d6", "f3e5", "f8e7", "b5f1", "c6e5", "e1e5", "e8g8",
    "d2d4", "e7f6", "e5e1", "f8e8", "c2c3", "e8e1", "d1e1", "d6e8",
    "c1f4", "d7d5", "b1d2", "g7g6", "e1e2", "e8g7", "e2e7", "f6e7"};

}  // namespace

TEST_SUITE_BEGIN("dataset");

TEST_CASE("split: 80/10/10 with future window carved out first") {
  std::vector<pgn::GameRecord> games;
  for (int i = 0; i < 1000; ++i) {
    games.push_back(tagged_game(i, {2019, 1 + i % 12, 1 + i % 28}));
  }
  // Thirty games from December 2020 must always land in the future set.
  for (int i = 1000; i < 1030; ++i) {
    games.push_back(tagged_game(i, {2020, 12, 1 + i % 28}));
  }

  SplitSpec spec;
  spec.seed = 5;
  const GameSplit split = split_games(games, spec);
  CHECK(split.train.size() == 800);
  CHECK(split.validation.size() == 100);
  CHECK(split.test.size() == 100);
  CHECK(split.future.size() == 30);
  for (const auto& g : split.future) {
    CHECK(g.date.year == 2020);
    CHECK(g.date.month == 12);
  }

  // Partition: every id in exactly one set.
  std::multiset<std::uint64_t> all;
  for (const auto* set : {&split.train, &split.validation, &split.test,
                          &split.future}) {
    for (const auto& g : *set) all.insert(g.game_id());
  }
  CHECK(all.size() == games.size());
  std::multiset<std::uint64_t> expected;
  for (const auto& g : games) expected.insert(g.game_id());
  CHECK(all == expected);
}

TEST_CASE("split: manifest is a function of ids and seed only") {
  std::vector<pgn::GameRecord> games;
  for (int i = 0; i < 157; ++i) {
    games.push_back(tagged_game(i, {2020, 1 + i % 11, 3}));
  }
  SplitSpec spec;
  spec.seed = 42;
  const std::string manifest1 = split_manifest(split_games(games, spec), spec);

  std::reverse(games.begin(), games.end());
  const std::string manifest2 = split_manifest(split_games(games, spec), spec);
  CHECK(manifest1 == manifest2);

  spec.seed = 43;
  const std::string manifest3 = split_manifest(split_games(games, spec), spec);
  CHECK(manifest1 != manifest3);
}

TEST_CASE("split: train fraction within one game of target") {
  for (const std::size_t n : {7u, 23u, 99u, 250u}) {
    std::vector<pgn::GameRecord> games;
    for (std::size_t i = 0; i < n; ++i) {
      games.push_back(tagged_game(static_cast<int>(i), {2019, 6, 15}));
    }
    SplitSpec spec;
    const GameSplit split = split_games(games, spec);
    const double frac =
        static_cast<double>(split.train.size()) / static_cast<double>(n);
    CHECK(frac >= 0.8 - 1.0 / static_cast<double>(n) - 1e-12);
    CHECK(frac <= 0.8 + 1.0 / static_cast<double>(n) + 1e-12);
  }
}

TEST_CASE("split: errors") {
  CHECK_THROWS_AS(split_games({}, SplitSpec{}), std::invalid_argument);
  SplitSpec bad;
  bad.train_fraction = 0.5;
  std::vector<pgn::GameRecord> one{tagged_game(0, {2019, 1, 1})};
  CHECK_THROWS_AS(split_games(one, bad), std::invalid_argument);
}

TEST_CASE("ply_weight: unimodal with mode at ply 25, support below 150") {
  const SamplerConfig cfg;
  int argmax = 0;
  double best = -1.0;
  for (int ply = 0; ply < 150; ++ply) {
    const double w = ply_weight(ply, cfg);
    CHECK(w > 0.0);
    if (w > best) {
      best = w;
      argmax = ply;
    }
  }
  CHECK(argmax == 25);
  CHECK(ply_weight(150, cfg) == 0.0);
  CHECK(ply_weight(1000, cfg) == 0.0);
  CHECK(ply_weight(-1, cfg) == 0.0);

  // Unimodal: increases to the mode, decreases after.
  for (int ply = 1; ply <= 25; ++ply) {
    CHECK(ply_weight(ply, cfg) > ply_weight(ply - 1, cfg));
  }
  for (int ply = 26; ply < 150; ++ply) {
    CHECK(ply_weight(ply, cfg) < ply_weight(ply - 1, cfg));
  }

  SamplerConfig floored = cfg;
  floored.ply_floor = 10;
  CHECK(ply_weight(9, floored) == 0.0);
  CHECK(ply_weight(10, floored) > 0.0);
}

TEST_CASE("ply_weight: seeded draws reproduce the discrete mean") {
  const SamplerConfig cfg;
  // Exact mean of the induced distribution, computed by direct summation
  // (the continuous Beta(2,6) mean is 0.25 * 150 = 37.5; the midpoint
  // evaluation shifts it to 37.0).
  std::vector<double> weights;
  double norm = 0.0, mean_exact = 0.0;
  for (int ply = 0; ply < 150; ++ply) {
    const double w = ply_weight(ply, cfg);
    weights.push_back(w);
    norm += w;
    mean_exact += w * ply;
  }
  mean_exact /= norm;
  CHECK(mean_exact == doctest::Approx(37.0).epsilon(0.002));

  WeightedPicker picker(weights);
  Rng rng(20201215);
  double sum = 0.0;
  const int draws = 1000000;
  for (int i = 0; i < draws; ++i) {
    sum += static_cast<double>(picker.pick(rng));
  }
  const double mc_mean = sum / draws;
  CHECK(std::abs(mc_mean - mean_exact) < 0.15);
}

TEST_CASE("sample_examples: black target player only moves on odd plies") {
  std::vector<pgn::GameRecord> games;
  for (int i = 0; i < 3; ++i) {
    games.push_back(played_game("opponent", "hero", kSampleLine, i));
  }
  const auto examples = sample_examples(games, "hero", SamplerConfig{}, 200, 9);
  REQUIRE(examples.size() == 200);
  for (const auto& e : examples) {
    CHECK(e.ply % 2 == 1);
    CHECK(e.side == 1);
    CHECK(e.player == player_ref("hero"));
  }
}

TEST_CASE("sample_examples: count zero, determinism, absent player") {
  std::vector<pgn::GameRecord> games{
      played_game("hero", "other", kSampleLine, 0)};
  CHECK(sample_examples(games, "hero", SamplerConfig{}, 0, 1).empty());

  const auto a = sample_examples(games, "hero", SamplerConfig{}, 64, 7);
  const auto b = sample_examples(games, "hero", SamplerConfig{}, 64, 7);
  CHECK(a == b);
  const auto c = sample_examples(games, "hero", SamplerConfig{}, 64, 8);
  CHECK(a != c);

  games.push_back(played_game("x", "y", {"d2d4"}, 1));
  CHECK_THROWS_AS(sample_examples(games, "hero", SamplerConfig{}, 4, 1),
                  std::invalid_argument);
}

TEST_CASE("sample_examples: targets decode to the played move") {
  std::vector<pgn::GameRecord> games{
      played_game("hero", "other", kSampleLine, 0),
      played_game("other", "hero", kSampleLine, 1)};
  const auto examples =
      sample_examples(games, "hero", SamplerConfig{}, 120, 33);

  // Re-replay the games independently to map (game, ply) -> expected.
  std::map<std::pair<std::uint64_t, int>, std::pair<std::uint16_t, std::string>>
      expected;
  for (const auto& g : games) {
    Board b = Board::start_position();
    for (int ply = 0; ply < static_cast<int>(g.plies.size()); ++ply) {
      const Move m = g.plies[static_cast<std::size_t>(ply)].move;
      expected[{g.game_id(), ply}] = {
          static_cast<std::uint16_t>(encode::move_index(b, m)), b.fen()};
      b = b.apply_trusted(m);
    }
  }
  for (const auto& e : examples) {
    const auto it = expected.find({e.game, e.ply});
    REQUIRE(it != expected.end());
    CHECK(e.target == it->second.first);
    // The target must be legal in the decoded position.
    const Board b = Board::from_fen(it->second.second);
    const Move decoded = encode::index_move(b, e.target);
    CHECK(b.is_legal(decoded));
  }
}

TEST_CASE("all_examples: every eligible ply exactly once") {
  std::vector<pgn::GameRecord> games{
      played_game("hero", "other", kSampleLine, 0),
      played_game("other", "hero", kSampleLine, 1)};
  const auto both = all_examples(games, "hero");
  CHECK(both.size() == kSampleLine.size());  // 16 white + 16 black plies
  const auto late = all_examples(games, "hero", 10);
  std::size_t expected = 0;
  for (int ply = 10; ply < static_cast<int>(kSampleLine.size()); ++ply) {
    ++expected;  // one game has this parity, the other the complement
  }
  CHECK(late.size() == expected);
}

TEST_CASE("packed examples round-trip through the bit planes") {
  std::vector<pgn::GameRecord> games{
      played_game("hero", "other", kSampleLine, 0)};
  const auto packed = all_examples(games, "hero");
  REQUIRE(!packed.empty());
  for (const auto& p : packed) {
    const TrainingExample e = p.unpack();
    CHECK(PackedExample::pack(e) == p);
  }
  // Against the direct encoder: ply 0 is the start position.
  const auto start_planes = encode::encode_position(Board::start_position());
  CHECK(packed[0].unpack().planes == start_planes);
}

TEST_CASE("shard: write/read round trip") {
  std::vector<pgn::GameRecord> games{
      played_game("hero", "other", kSampleLine, 0),
      played_game("other", "hero", kSampleLine, 1)};
  auto examples = sample_examples(games, "hero", SamplerConfig{}, 1000, 4);
  REQUIRE(examples.size() == 1000);

  const auto bytes = write_shard(examples);
  const auto back = read_shard(bytes);
  CHECK(back == examples);
}

TEST_CASE("shard: corruption and format errors") {
  std::vector<pgn::GameRecord> games{
      played_game("hero", "other", kSampleLine, 0)};
  auto examples = sample_examples(games, "hero", SamplerConfig{}, 5, 4);
  auto bytes = write_shard(examples);

  SUBCASE("flipped payload byte fails the checksum") {
    bytes[40] ^= 0x01;
    CHECK_THROWS_WITH_AS(read_shard(bytes), "shard: checksum mismatch",
                         std::runtime_error);
  }
  SUBCASE("bad magic") {
    bytes[0] = 'X';
    CHECK_THROWS_WITH_AS(read_shard(bytes), "shard: bad magic",
                         std::runtime_error);
  }
  SUBCASE("unsupported version") {
    bytes[4] = 9;
    // Version byte participates in the checksum, so recompute the tail to
    // reach the version check.
    const std::uint64_t sum = fnv1a64(bytes.data(), bytes.size() - 8);
    for (int i = 0; i < 8; ++i) {
      bytes[bytes.size() - 8 + static_cast<std::size_t>(i)] =
          static_cast<std::uint8_t>(sum >> (8 * i));
    }
    CHECK_THROWS_WITH_AS(read_shard(bytes), "shard: unsupported version 9",
                         std::runtime_error);
  }
  SUBCASE("truncation") {
    bytes.resize(bytes.size() - 13);
    CHECK_THROWS_WITH_AS(read_shard(bytes), "shard: truncated payload",
                         std::runtime_error);
  }
  SUBCASE("empty shard is valid") {
    const auto empty = write_shard({});
    CHECK(read_shard(empty).empty());
  }
}

TEST_CASE("position index: membership and counts") {
  std::vector<pgn::GameRecord> games{
      played_game("hero", "other", kSampleLine, 0),
      played_game("other", "hero", kSampleLine, 1),
      played_game("hero", "other", {"d2d4", "d7d5", "c2c4"}, 2)};
  const PositionIndex index = build_position_index(games, "hero");

  // Start position: hero had the white pieces in two games.
  CHECK(index.count(Board::start_position().position_key()) == 2);

  // A position unique to the third game.
  Board b = Board::start_position();
  b = b.apply_move(Move::from_uci("d2d4"));
  b = b.apply_move(Move::from_uci("d7d5"));
  CHECK(index.count(b.position_key()) == 1);

  // Positions before black's moves in game 1 are keyed too.
  Board c = Board::start_position().apply_move(Move::from_uci("e2e4"));
  CHECK(index.contains(c.position_key()));
}

TEST_CASE("position index: order invariant and serializable") {
  std::vector<pgn::GameRecord> games{
      played_game("hero", "other", kSampleLine, 0),
      played_game("other", "hero", kSampleLine, 1)};
  const auto bytes1 = build_position_index(games, "hero").serialize();
  std::reverse(games.begin(), games.end());
  const auto bytes2 = build_position_index(games, "hero").serialize();
  CHECK(bytes1 == bytes2);

  const PositionIndex back = PositionIndex::deserialize(bytes1);
  CHECK(back.size() == build_position_index(games, "hero").size());
  CHECK(back.count(Board::start_position().position_key()) == 1);

  auto corrupted = bytes1;
  corrupted[10] ^= 0x40;
  CHECK_THROWS(PositionIndex::deserialize(corrupted));
}
