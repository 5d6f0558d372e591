#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "pawnprint/chess/board.hpp"
#include "pawnprint/nn/checkpoint.hpp"

namespace pawnprint::uci {

// How the engine turns the masked policy into a move. Sampling at
// temperature 1 plays the model as the move distribution it is; argmax is
// the deterministic evaluation-style choice.
struct EngineOptions {
  enum class PlayMode { Sample, Argmax };
  PlayMode mode = PlayMode::Sample;
  double temperature = 1.0;
  std::uint64_t seed = 0;
};

// Serves one checkpoint over the UCI text protocol. There is no search: a
// "go" answers with a single policy inference, so all go parameters are
// accepted and ignored.
class EngineSession {
 public:
  EngineSession(nn::ModelCheckpoint checkpoint, EngineOptions options);

  // Reads commands until "quit" or end of input.
  void run(std::istream& in, std::ostream& out);

  // A single best-move query against the current board; exposed for tests.
  chess::Move pick_move();

  const chess::Board& board() const { return board_; }

 private:
  void handle_position(const std::string& args, std::ostream& out);
  void handle_setoption(const std::string& args, std::ostream& out);

  nn::ModelCheckpoint checkpoint_;
  nn::PolicyValueNet net_;
  EngineOptions options_;
  chess::Board board_;
  std::uint64_t move_counter_ = 0;
};

}  // namespace pawnprint::uci
