#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pawnprint/chess/types.hpp"

namespace pawnprint::pgn {

// Calendar date, used for split windows and activity criteria. Parses both
// the PGN tag form 2020.12.15 and ISO 2020-12-15.
struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  friend auto operator<=>(const Date&, const Date&) = default;
  bool valid() const { return year > 0; }

  std::string iso() const;
  static Date parse(const std::string& text);  // returns invalid on failure
};

enum class TimeClass : std::uint8_t {
  Unknown,
  Bullet,
  Blitz,
  Rapid,
  Classical,
};

// Estimated game duration is base + 40 * increment seconds; blitz is the
// 3-8 minute class.
TimeClass classify_time_control(const std::string& time_control_tag);

struct PlyRecord {
  chess::Move move;
  std::optional<int> clock_seconds;
  std::optional<int> eval_centipawns;  // mover-independent, white perspective
};

// One parsed game: tag pairs, replay-validated moves, per-ply clock/eval
// annotations, and a few derived fields used all over the pipeline.
struct GameRecord {
  std::map<std::string, std::string> tags;
  std::vector<PlyRecord> plies;
  Date date;
  TimeClass time_class = TimeClass::Unknown;

  const std::string& tag(const std::string& key) const;  // "" when absent
  std::string white() const { return tag("White"); }
  std::string black() const { return tag("Black"); }
  std::string result() const { return tag("Result"); }
  std::optional<int> elo(chess::Color side) const;
  std::optional<std::string> title(chess::Color side) const;
  bool has_player(const std::string& name) const;
  chess::Color color_of(const std::string& name) const;  // throws if absent

  bool has_evals() const;

  // Stable 64-bit id: the Site tag when present (Lichess game URL),
  // otherwise a hash of the players, date and moves.
  std::uint64_t game_id() const;
};

}  // namespace pawnprint::pgn
