#include "pawnprint/pgn/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "pawnprint/util/rng.hpp"

namespace pawnprint::pgn {

void StatsAccumulator::add(const GameRecord& game) {
  add_side(game, chess::Color::White);
  add_side(game, chess::Color::Black);
}

void StatsAccumulator::add_side(const GameRecord& game, chess::Color side) {
  const std::string name =
      side == chess::Color::White ? game.white() : game.black();
  if (name.empty() || name == "?") return;

  PlayerStats& s = stats_[name];
  if (s.player.empty()) s.player = name;

  ++s.games_total;
  if (game.time_class == TimeClass::Blitz) ++s.games_blitz;
  if (side == chess::Color::White) ++s.games_as_white;

  if (const auto elo = game.elo(side)) {
    ++s.rated_games;
    const double x = static_cast<double>(*elo);
    const double delta = x - s.rating_mean;
    s.rating_mean += delta / static_cast<double>(s.rated_games);
    s.rating_m2 += delta * (x - s.rating_mean);
  }

  const std::string& result = game.result();
  if (result == "1/2-1/2") {
    ++s.draws;
  } else if (result == "1-0") {
    ++(side == chess::Color::White ? s.wins : s.losses);
  } else if (result == "0-1") {
    ++(side == chess::Color::Black ? s.wins : s.losses);
  }

  if (game.date.valid()) {
    if (!s.first_game_date.valid() || game.date < s.first_game_date) {
      s.first_game_date = game.date;
    }
    if (!s.last_game_date.valid() || s.last_game_date < game.date) {
      s.last_game_date = game.date;
    }
  }
  if (game.title(side)) s.titled = true;
}

void StatsAccumulator::merge(const StatsAccumulator& other) {
  for (const auto& [name, o] : other.stats_) {
    auto it = stats_.find(name);
    if (it == stats_.end()) {
      stats_[name] = o;
      continue;
    }
    PlayerStats& s = it->second;
    s.games_total += o.games_total;
    s.games_blitz += o.games_blitz;
    s.games_as_white += o.games_as_white;
    s.wins += o.wins;
    s.draws += o.draws;
    s.losses += o.losses;
    // Chan et al. parallel combination of mean and M2.
    const double na = static_cast<double>(s.rated_games);
    const double nb = static_cast<double>(o.rated_games);
    if (nb > 0) {
      const double delta = o.rating_mean - s.rating_mean;
      const double n = na + nb;
      s.rating_mean += delta * nb / n;
      s.rating_m2 += o.rating_m2 + delta * delta * na * nb / n;
      s.rated_games += o.rated_games;
    }
    if (o.first_game_date.valid() &&
        (!s.first_game_date.valid() || o.first_game_date < s.first_game_date)) {
      s.first_game_date = o.first_game_date;
    }
    if (o.last_game_date.valid() &&
        (!s.last_game_date.valid() || s.last_game_date < o.last_game_date)) {
      s.last_game_date = o.last_game_date;
    }
    s.titled = s.titled || o.titled;
  }
}

bool SelectionCriteria::admits(const PlayerStats& s) const {
  if (s.games_blitz < min_games) return false;
  if (s.rated_games == 0) return false;
  if (s.rating_mean < rating_low || s.rating_mean > rating_high) return false;
  if (s.rating_variance() > max_variance) return false;
  if (active_before.valid()) {
    if (!s.first_game_date.valid() || !(s.first_game_date < active_before)) {
      return false;
    }
  }
  if (active_after.valid()) {
    if (!s.last_game_date.valid() || s.last_game_date < active_after) {
      return false;
    }
  }
  if (exclude_titled && s.titled) return false;
  const double wr = s.win_rate();
  if (wr < win_rate_low || wr > win_rate_high) return false;
  const double wf = s.white_fraction();
  if (wf < white_fraction_low || wf > white_fraction_high) return false;
  return true;
}

SelectionCriteria SelectionCriteria::from_toml(const toml::Document& doc) {
  SelectionCriteria c;
  auto prefix = [](const std::string& k) { return "selection." + k; };
  if (auto v = doc.get_int(prefix("min_games"))) c.min_games = *v;
  if (auto v = doc.get_double_array(prefix("rating_range"))) {
    if (v->size() != 2) throw std::runtime_error("rating_range needs 2 values");
    c.rating_low = (*v)[0];
    c.rating_high = (*v)[1];
  }
  if (auto v = doc.get_double(prefix("max_variance"))) c.max_variance = *v;
  if (auto v = doc.get_string(prefix("require_active_before"))) {
    c.active_before = Date::parse(*v);
  }
  if (auto v = doc.get_string(prefix("require_active_after"))) {
    c.active_after = Date::parse(*v);
  }
  if (auto v = doc.get_bool(prefix("exclude_titled"))) c.exclude_titled = *v;
  if (auto v = doc.get_double_array(prefix("win_rate_range"))) {
    if (v->size() != 2) throw std::runtime_error("win_rate_range needs 2 values");
    c.win_rate_low = (*v)[0];
    c.win_rate_high = (*v)[1];
  }
  if (auto v = doc.get_double_array(prefix("white_fraction_range"))) {
    if (v->size() != 2) {
      throw std::runtime_error("white_fraction_range needs 2 values");
    }
    c.white_fraction_low = (*v)[0];
    c.white_fraction_high = (*v)[1];
  }
  if (!(c.rating_low <= c.rating_high) ||
      !(c.win_rate_low <= c.win_rate_high) ||
      !(c.white_fraction_low <= c.white_fraction_high)) {
    throw std::runtime_error("selection criteria ranges are not well-ordered");
  }
  return c;
}

std::vector<std::string> select_players(
    const std::map<std::string, PlayerStats>& stats,
    const SelectionCriteria& criteria) {
  std::vector<std::string> out;
  for (const auto& [name, s] : stats) {
    if (criteria.admits(s)) out.push_back(name);
  }
  return out;  // map iteration is already ordered by player id
}

namespace {

int games_bucket(std::int64_t games) {
  static constexpr std::array<std::int64_t, 6> kThresholds{
      1000, 5000, 10000, 20000, 30000, 40000};
  int bucket = 0;
  for (std::size_t i = 0; i < kThresholds.size(); ++i) {
    if (games >= kThresholds[i]) bucket = static_cast<int>(i) + 1;
  }
  return bucket;
}

}  // namespace

PlayerPartition assign_player_sets(
    const std::vector<std::string>& players,
    const std::map<std::string, PlayerStats>& stats, const SetFractions& f,
    std::uint64_t seed) {
  if (players.empty()) {
    throw std::invalid_argument("assign_player_sets: no players");
  }
  const double total = f.exploration + f.evaluation + f.holdout;
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("set fractions must sum to 1");
  }

  std::map<int, std::vector<std::string>> buckets;
  for (const std::string& p : players) {
    const auto it = stats.find(p);
    const std::int64_t games = it == stats.end() ? 0 : it->second.games_blitz;
    buckets[games_bucket(games)].push_back(p);
  }

  PlayerPartition out;
  for (auto& [bucket, members] : buckets) {
    std::sort(members.begin(), members.end());
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(bucket), 0xb0cce7));
    rng.shuffle(members);

    // Largest-remainder allocation of the three set sizes.
    const double n = static_cast<double>(members.size());
    const std::array<double, 3> want{n * f.exploration, n * f.evaluation,
                                     n * f.holdout};
    std::array<std::size_t, 3> take{};
    std::size_t assigned = 0;
    for (int i = 0; i < 3; ++i) {
      take[static_cast<std::size_t>(i)] =
          static_cast<std::size_t>(std::floor(want[static_cast<std::size_t>(i)]));
      assigned += take[static_cast<std::size_t>(i)];
    }
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const double ra = want[static_cast<std::size_t>(a)] -
                        std::floor(want[static_cast<std::size_t>(a)]);
      const double rb = want[static_cast<std::size_t>(b)] -
                        std::floor(want[static_cast<std::size_t>(b)]);
      if (ra != rb) return ra > rb;
      return a < b;
    });
    for (std::size_t i = 0; assigned < members.size(); ++i) {
      ++take[static_cast<std::size_t>(order[i % 3])];
      ++assigned;
    }

    std::size_t pos = 0;
    for (std::size_t i = 0; i < take[0]; ++i) {
      out.exploration.push_back(members[pos++]);
    }
    for (std::size_t i = 0; i < take[1]; ++i) {
      out.evaluation.push_back(members[pos++]);
    }
    for (std::size_t i = 0; i < take[2]; ++i) {
      out.holdout.push_back(members[pos++]);
    }
  }
  std::sort(out.exploration.begin(), out.exploration.end());
  std::sort(out.evaluation.begin(), out.evaluation.end());
  std::sort(out.holdout.begin(), out.holdout.end());
  return out;
}

}  // namespace pawnprint::pgn
