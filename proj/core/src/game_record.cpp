#include "pawnprint/pgn/game_record.hpp"

#include <charconv>
#include <stdexcept>

#include "pawnprint/util/hash.hpp"

namespace pawnprint::pgn {

std::string Date::iso() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

Date Date::parse(const std::string& text) {
  Date d;
  if (text.size() != 10) return {};
  const char sep = text[4];
  if ((sep != '.' && sep != '-') || text[7] != sep) return {};
  auto number = [&](int from, int len, int& out) {
    auto [p, ec] =
        std::from_chars(text.data() + from, text.data() + from + len, out);
    return ec == std::errc() && p == text.data() + from + len;
  };
  if (!number(0, 4, d.year) || !number(5, 2, d.month) || !number(8, 2, d.day)) {
    return {};
  }
  if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31) return {};
  return d;
}

TimeClass classify_time_control(const std::string& tc) {
  if (tc.empty() || tc == "-") return TimeClass::Unknown;
  int base = 0, increment = 0;
  const std::size_t plus = tc.find('+');
  try {
    if (plus == std::string::npos) {
      base = std::stoi(tc);
    } else {
      base = std::stoi(tc.substr(0, plus));
      increment = std::stoi(tc.substr(plus + 1));
    }
  } catch (const std::exception&) {
    return TimeClass::Unknown;
  }
  const int estimated = base + 40 * increment;
  if (estimated < 180) return TimeClass::Bullet;
  if (estimated <= 480) return TimeClass::Blitz;
  if (estimated <= 1500) return TimeClass::Rapid;
  return TimeClass::Classical;
}

const std::string& GameRecord::tag(const std::string& key) const {
  static const std::string empty;
  const auto it = tags.find(key);
  return it == tags.end() ? empty : it->second;
}

std::optional<int> GameRecord::elo(chess::Color side) const {
  const std::string& text =
      tag(side == chess::Color::White ? "WhiteElo" : "BlackElo");
  if (text.empty() || text == "?") return std::nullopt;
  int value = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || p != text.data() + text.size()) return std::nullopt;
  return value;
}

std::optional<std::string> GameRecord::title(chess::Color side) const {
  const std::string& text =
      tag(side == chess::Color::White ? "WhiteTitle" : "BlackTitle");
  if (text.empty() || text == "-") return std::nullopt;
  return text;
}

bool GameRecord::has_player(const std::string& name) const {
  return white() == name || black() == name;
}

chess::Color GameRecord::color_of(const std::string& name) const {
  if (white() == name) return chess::Color::White;
  if (black() == name) return chess::Color::Black;
  throw std::invalid_argument("player '" + name + "' is not a side of game " +
                              tag("Site"));
}

bool GameRecord::has_evals() const {
  for (const PlyRecord& ply : plies) {
    if (ply.eval_centipawns.has_value()) return true;
  }
  return false;
}

std::uint64_t GameRecord::game_id() const {
  const std::string& site = tag("Site");
  if (!site.empty() && site != "-" && site != "?") {
    return fnv1a64(site);
  }
  Fnv1a64 h;
  auto mix = [&](const std::string& s) {
    h.update(s.data(), s.size());
    h.update("\x1f", 1);
  };
  mix(white());
  mix(black());
  mix(tag("UTCDate").empty() ? tag("Date") : tag("UTCDate"));
  mix(tag("UTCTime"));
  for (const PlyRecord& ply : plies) mix(ply.move.uci());
  return h.digest();
}

}  // namespace pawnprint::pgn
