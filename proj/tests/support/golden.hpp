#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pawnprint/chess/board.hpp"
#include "pawnprint/encode/planes.hpp"

namespace test_support {

struct GoldenOutcome {
  int positions = 0;
  int mismatched_cells = 0;
};

// Runs the encoder over every FEN block in the golden fixture and compares
// each of the 112x8x8 cells bit-exactly.
inline GoldenOutcome run_encoder_golden(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw std::runtime_error("cannot open golden file: " + path);
  GoldenOutcome outcome;
  std::vector<float> expected;
  std::string fen, line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "fen") {
      std::getline(ls, fen);
      fen = fen.substr(1);
      expected.assign(112 * 64, 0.0f);
    } else if (tag == "cell") {
      int plane, row, col;
      float value;
      ls >> plane >> row >> col >> value;
      expected[static_cast<std::size_t>(plane * 64 + row * 8 + col)] = value;
    } else if (tag == "const") {
      int plane;
      float value;
      ls >> plane >> value;
      for (int i = 0; i < 64; ++i) {
        expected[static_cast<std::size_t>(plane * 64 + i)] = value;
      }
    } else if (tag == "end") {
      ++outcome.positions;
      const auto got = pawnprint::encode::encode_position(
          pawnprint::chess::Board::from_fen(fen));
      for (int p = 0; p < 112; ++p) {
        for (int r = 0; r < 8; ++r) {
          for (int c = 0; c < 8; ++c) {
            if (got.at(p, r, c) !=
                expected[static_cast<std::size_t>(p * 64 + r * 8 + c)]) {
              ++outcome.mismatched_cells;
            }
          }
        }
      }
    }
  }
  return outcome;
}

}  // namespace test_support
