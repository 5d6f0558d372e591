#include "pawnprint/pgn/reader.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

#include "pawnprint/chess/board.hpp"
#include "pawnprint/chess/san.hpp"

namespace pawnprint::pgn {

namespace {

bool is_result_token(const std::string& t) {
  return t == "1-0" || t == "0-1" || t == "1/2-1/2" || t == "*";
}

// Parses "h:mm:ss" or "mm:ss" into seconds.
std::optional<int> parse_clock(const std::string& text) {
  int parts[3] = {0, 0, 0};
  int count = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ':') {
      if (count >= 3 || i == start) return std::nullopt;
      try {
        parts[count++] = std::stoi(text.substr(start, i - start));
      } catch (const std::exception&) {
        return std::nullopt;
      }
      start = i + 1;
    }
  }
  if (count < 2) return std::nullopt;
  int seconds = 0;
  for (int i = 0; i < count; ++i) seconds = seconds * 60 + parts[i];
  return seconds;
}

std::optional<int> parse_eval(const std::string& text, int mate_cap) {
  if (text.empty()) return std::nullopt;
  if (text[0] == '#') {
    // Mate distance; sign says who mates.
    if (text.size() < 2) return std::nullopt;
    return text[1] == '-' ? -mate_cap : mate_cap;
  }
  try {
    const double pawns = std::stod(text);
    return static_cast<int>(std::llround(pawns * 100.0));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// Extracts [%key value] commands from a brace comment body.
void apply_annotations(const std::string& comment, PlyRecord* ply,
                       int mate_cap) {
  if (ply == nullptr) return;
  std::size_t pos = 0;
  while ((pos = comment.find("[%", pos)) != std::string::npos) {
    const std::size_t end = comment.find(']', pos);
    if (end == std::string::npos) break;
    const std::string body = comment.substr(pos + 2, end - pos - 2);
    const std::size_t space = body.find(' ');
    if (space != std::string::npos) {
      const std::string key = body.substr(0, space);
      const std::string value = body.substr(space + 1);
      if (key == "clk") {
        if (auto v = parse_clock(value)) ply->clock_seconds = v;
      } else if (key == "eval") {
        if (auto v = parse_eval(value, mate_cap)) ply->eval_centipawns = v;
      }
    }
    pos = end + 1;
  }
}

}  // namespace

PgnReader::PgnReader(std::istream& in) : PgnReader(in, Options{}) {}

PgnReader::PgnReader(std::istream& in, Options options, DiagnosticFn diagnostic)
    : in_(in), options_(options), diagnostic_(std::move(diagnostic)) {}

void PgnReader::report(const std::string& message) {
  if (diagnostic_) diagnostic_(message);
}

// After a parse failure: drop everything up to the next blank-line-then-'['
// boundary, which is where the next game's tag section starts.
void PgnReader::skip_to_next_game() {
  std::string line;
  bool last_blank = false;
  while (in_.peek() != EOF) {
    if (last_blank && in_.peek() == '[') return;
    if (!std::getline(in_, line)) return;
    last_blank = line.find_first_not_of(" \t\r") == std::string::npos;
  }
}

std::optional<GameRecord> PgnReader::next() {
  while (true) {
    if (in_.bad()) throw std::runtime_error("pgn: underlying stream failed");
    // Skip inter-game whitespace.
    while (in_.peek() != EOF &&
           std::isspace(static_cast<unsigned char>(in_.peek()))) {
      in_.get();
    }
    if (in_.peek() == EOF) return std::nullopt;

    try {
      auto game = parse_one();
      if (game) {
        ++games_returned_;
        return game;
      }
      return std::nullopt;
    } catch (const std::exception& e) {
      ++games_skipped_;
      report(std::string("skipping malformed game: ") + e.what());
      skip_to_next_game();
    }
  }
}

std::optional<GameRecord> PgnReader::parse_one() {
  GameRecord game;

  // Tag pair section.
  while (in_.peek() == '[') {
    std::string line;
    if (!std::getline(in_, line)) break;
    const std::size_t key_start = 1;
    const std::size_t key_end = line.find(' ', key_start);
    const std::size_t quote_open = line.find('"');
    const std::size_t quote_close = line.rfind('"');
    const std::size_t bracket = line.rfind(']');
    if (key_end == std::string::npos || quote_open == std::string::npos ||
        quote_close <= quote_open || bracket == std::string::npos) {
      throw std::runtime_error("bad tag pair: " + line);
    }
    std::string value =
        line.substr(quote_open + 1, quote_close - quote_open - 1);
    // Unescape \" and double backslashes.
    std::string clean;
    for (std::size_t i = 0; i < value.size(); ++i) {
      if (value[i] == '\\' && i + 1 < value.size()) ++i;
      clean += value[i];
    }
    game.tags[line.substr(key_start, key_end - key_start)] = clean;
    // Tag section may be followed by blank line(s).
    while (in_.peek() == '\n' || in_.peek() == '\r') in_.get();
  }

  // Movetext: replay tokens until a result token.
  chess::Board board = chess::Board::start_position();
  bool saw_result = false;
  int paren_depth = 0;

  while (!saw_result) {
    const int c = in_.peek();
    if (c == EOF) {
      throw std::runtime_error("movetext ended without a result token");
    }
    if (std::isspace(c)) {
      in_.get();
      continue;
    }
    if (c == '{') {
      in_.get();
      std::string comment;
      int ch;
      while ((ch = in_.get()) != EOF && ch != '}') {
        comment += static_cast<char>(ch);
      }
      if (ch == EOF) throw std::runtime_error("unterminated comment");
      if (paren_depth == 0 && !game.plies.empty()) {
        apply_annotations(comment, &game.plies.back(),
                          options_.mate_cap_centipawns);
      }
      continue;
    }
    if (c == ';') {
      std::string line;
      std::getline(in_, line);
      continue;
    }
    if (c == '(') {
      in_.get();
      ++paren_depth;
      continue;
    }
    if (c == ')') {
      in_.get();
      if (--paren_depth < 0) throw std::runtime_error("unbalanced variation");
      continue;
    }
    if (c == '$') {
      in_.get();
      while (in_.peek() != EOF && std::isdigit(in_.peek())) in_.get();
      continue;
    }

    // Plain token.
    std::string word;
    while (in_.peek() != EOF && !std::isspace(in_.peek()) &&
           in_.peek() != '{' && in_.peek() != '}' && in_.peek() != '(' &&
           in_.peek() != ')' && in_.peek() != ';') {
      word += static_cast<char>(in_.get());
    }
    if (word.empty()) {
      throw std::runtime_error("stray character in movetext");
    }
    if (is_result_token(word)) {
      if (paren_depth == 0) {
        saw_result = true;
        if (game.tags.find("Result") == game.tags.end()) {
          game.tags["Result"] = word;
        }
        break;
      }
      continue;  // result-looking token inside a variation
    }
    if (paren_depth > 0) continue;  // variations are skipped entirely

    // Strip a leading move number ("12.", "12...", or lone digits).
    std::size_t start = 0;
    while (start < word.size() &&
           (std::isdigit(static_cast<unsigned char>(word[start])) ||
            word[start] == '.')) {
      ++start;
    }
    // Tokens like "O-O" and "0-0" must not lose their leading zero.
    if (start > 0 && start < word.size() && word[start] == '-') start = 0;
    if (word.compare(0, 2, "0-") == 0) start = 0;
    const std::string san = word.substr(start);
    if (san.empty()) continue;  // pure move number

    const chess::Move move = chess::parse_san(board, san);
    board = board.apply_trusted(move);
    game.plies.push_back({move, std::nullopt, std::nullopt});
  }

  const std::string& date_tag =
      game.tag("UTCDate").empty() ? game.tag("Date") : game.tag("UTCDate");
  game.date = Date::parse(date_tag);
  game.time_class = classify_time_control(game.tag("TimeControl"));
  return game;
}

std::vector<GameRecord> read_all_games(std::istream& in,
                                       PgnReader::Options options,
                                       PgnReader::DiagnosticFn diag) {
  PgnReader reader(in, options, std::move(diag));
  std::vector<GameRecord> games;
  while (auto g = reader.next()) games.push_back(std::move(*g));
  return games;
}

}  // namespace pawnprint::pgn
