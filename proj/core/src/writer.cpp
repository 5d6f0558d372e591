#include "pawnprint/pgn/writer.hpp"

#include <cstdio>

#include "pawnprint/chess/board.hpp"
#include "pawnprint/chess/san.hpp"

namespace pawnprint::pgn {

namespace {

std::string eval_text(int centipawns) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f",
                static_cast<double>(centipawns) / 100.0);
  return buf;
}

std::string clock_text(int seconds) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%d:%02d:%02d", seconds / 3600,
                (seconds / 60) % 60, seconds % 60);
  return buf;
}

}  // namespace

void write_game(std::ostream& out, const GameRecord& game) {
  for (const auto& [key, value] : game.tags) {
    std::string escaped;
    for (char c : value) {
      if (c == '"' || c == '\\') escaped += '\\';
      escaped += c;
    }
    out << '[' << key << " \"" << escaped << "\"]\n";
  }
  out << '\n';

  chess::Board board = chess::Board::start_position();
  std::string line;
  auto emit = [&](const std::string& token) {
    if (line.size() + token.size() + 1 > 80 && !line.empty()) {
      out << line << '\n';
      line.clear();
    }
    if (!line.empty()) line += ' ';
    line += token;
  };

  for (std::size_t ply = 0; ply < game.plies.size(); ++ply) {
    const PlyRecord& record = game.plies[ply];
    if (ply % 2 == 0) emit(std::to_string(ply / 2 + 1) + ".");
    emit(chess::san_of(board, record.move));
    if (record.eval_centipawns || record.clock_seconds) {
      std::string comment = "{";
      if (record.eval_centipawns) {
        comment += " [%eval " + eval_text(*record.eval_centipawns) + "]";
      }
      if (record.clock_seconds) {
        comment += " [%clk " + clock_text(*record.clock_seconds) + "]";
      }
      comment += " }";
      emit(comment);
    }
    board = board.apply_trusted(record.move);
  }
  const std::string& result = game.tag("Result");
  emit(result.empty() ? "*" : result);
  if (!line.empty()) out << line << '\n';
  out << '\n';
}

void write_games(std::ostream& out, const std::vector<GameRecord>& games) {
  for (const auto& g : games) write_game(out, g);
}

}  // namespace pawnprint::pgn
