#include "pawnprint/uci/engine.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "pawnprint/encode/planes.hpp"
#include "pawnprint/util/rng.hpp"

namespace pawnprint::uci {

using chess::Board;
using chess::Move;
using nn::NetConfig;

EngineSession::EngineSession(nn::ModelCheckpoint checkpoint,
                             EngineOptions options)
    : checkpoint_(std::move(checkpoint)),
      net_(checkpoint_.config),
      options_(options),
      board_(Board::start_position()) {
  nn::load_into_net(net_, checkpoint_);
}

Move EngineSession::pick_move() {
  const auto legal = board_.legal_moves();
  if (legal.empty()) {
    throw std::runtime_error("no legal moves in the current position");
  }
  const auto planes = encode::encode_position(board_);
  const std::size_t n = 64;
  std::vector<float> input(static_cast<std::size_t>(NetConfig::kInputPlanes) * n);
  for (int plane = 0; plane < NetConfig::kInputPlanes; ++plane) {
    for (int cell = 0; cell < 64; ++cell) {
      input[static_cast<std::size_t>(plane) * n + cell] =
          planes.at(plane, cell / 8, cell % 8);
    }
  }
  auto out = net_.forward(input.data(), 1, /*train_mode=*/false);
  const auto mask = encode::legal_mask(board_);

  if (options_.mode == EngineOptions::PlayMode::Sample) {
    const double t = options_.temperature > 0 ? options_.temperature : 1.0;
    for (auto& logit : out.policy) {
      logit = static_cast<float>(logit / t);
    }
  }
  const auto probs = nn::masked_policy(out.policy, mask);

  if (options_.mode == EngineOptions::PlayMode::Argmax) {
    int best = -1;
    float best_p = -1.0f;
    for (int s = 0; s < NetConfig::kPolicySlots; ++s) {
      if (mask.test(s) && probs[static_cast<std::size_t>(s)] > best_p) {
        best_p = probs[static_cast<std::size_t>(s)];
        best = s;
      }
    }
    return encode::index_move(board_, best);
  }

  Rng rng(derive_seed(options_.seed, board_.position_key(), move_counter_++));
  double u = rng.next_double();
  for (int s = 0; s < NetConfig::kPolicySlots; ++s) {
    if (!mask.test(s)) continue;
    u -= static_cast<double>(probs[static_cast<std::size_t>(s)]);
    if (u <= 0.0) return encode::index_move(board_, s);
  }
  // Numerical remainder: fall back to the last legal slot.
  for (int s = NetConfig::kPolicySlots - 1; s >= 0; --s) {
    if (mask.test(s)) return encode::index_move(board_, s);
  }
  throw std::logic_error("mask had no set bits after validation");
}

void EngineSession::handle_position(const std::string& args,
                                    std::ostream& out) {
  std::istringstream in(args);
  std::string token;
  in >> token;
  Board next = board_;
  try {
    if (token == "startpos") {
      next = Board::start_position();
      in >> token;  // optional "moves"
    } else if (token == "fen") {
      std::string fen, field;
      for (int i = 0; i < 6 && in >> field; ++i) {
        if (field == "moves") {
          token = field;
          break;
        }
        if (!fen.empty()) fen += ' ';
        fen += field;
      }
      next = Board::from_fen(fen);
      if (token != "moves") in >> token;
    } else {
      out << "info string unsupported position command\n";
      return;
    }
    if (token == "moves") {
      std::string uci_move;
      while (in >> uci_move) {
        next = next.apply_move(Move::from_uci(uci_move));
      }
    }
  } catch (const std::exception& e) {
    out << "info string illegal position: " << e.what() << "\n";
    return;  // keep the previous state
  }
  board_ = next;
}

void EngineSession::handle_setoption(const std::string& args,
                                     std::ostream& out) {
  // "name <id> value <x>"
  std::istringstream in(args);
  std::string word, name, value;
  in >> word;  // "name"
  while (in >> word && word != "value") {
    if (!name.empty()) name += ' ';
    name += word;
  }
  in >> value;
  try {
    if (name == "PlayMode") {
      if (value == "argmax") {
        options_.mode = EngineOptions::PlayMode::Argmax;
      } else if (value == "sample") {
        options_.mode = EngineOptions::PlayMode::Sample;
      } else {
        out << "info string unknown PlayMode '" << value << "'\n";
      }
    } else if (name == "Temperature") {
      options_.temperature = std::stod(value);
    } else if (name == "Seed") {
      options_.seed = std::stoull(value);
    } else {
      out << "info string unknown option '" << name << "'\n";
    }
  } catch (const std::exception&) {
    out << "info string bad value for option '" << name << "'\n";
  }
}

void EngineSession::run(std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string command;
    if (!(ls >> command)) continue;
    std::string rest;
    std::getline(ls, rest);
    if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);

    if (command == "uci") {
      out << "id name pawnprint " << checkpoint_.id() << "\n";
      out << "id author pawnprint\n";
      out << "option name PlayMode type combo default "
          << (options_.mode == EngineOptions::PlayMode::Sample ? "sample"
                                                               : "argmax")
          << " var sample var argmax\n";
      out << "option name Temperature type string default 1.0\n";
      out << "option name Seed type string default 0\n";
      out << "uciok\n";
    } else if (command == "isready") {
      out << "readyok\n";
    } else if (command == "ucinewgame") {
      board_ = Board::start_position();
      move_counter_ = 0;
    } else if (command == "position") {
      handle_position(rest, out);
    } else if (command == "setoption") {
      handle_setoption(rest, out);
    } else if (command == "go") {
      // All search parameters are irrelevant: one inference, one move.
      try {
        out << "bestmove " << pick_move().uci() << "\n";
      } catch (const std::exception& e) {
        out << "info string " << e.what() << "\n";
        out << "bestmove 0000\n";
      }
    } else if (command == "stop") {
      // No background search to stop.
    } else if (command == "quit") {
      break;
    } else {
      out << "info string unknown command '" << command << "'\n";
    }
    out.flush();
  }
}

}  // namespace pawnprint::uci
