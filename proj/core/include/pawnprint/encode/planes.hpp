#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <vector>

#include "pawnprint/chess/board.hpp"
#include "pawnprint/encode/vocabulary.hpp"

namespace pawnprint::encode {

// 112 x 8 x 8 network input, always viewed from the mover's side: the
// mover's back rank is row 0 (ranks are flipped when black moves, files are
// not).
//
// Plane layout:
//   0..95    eight history boards, current first, 12 piece planes each in
//            order mover P,N,B,R,Q,K then opponent P,N,B,R,Q,K; absent
//            history boards are all zero
//   96..103  per-history-board repetition flags (all ones if that position
//            had already occurred earlier in its game)
//   104..107 castling rights: mover O-O, mover O-O-O, opponent O-O,
//            opponent O-O-O
//   108      all ones iff the mover is black
//   109      halfmove clock / 100, clamped to [0,1]
//   110      all zeros
//   111      all ones
class InputPlanes {
 public:
  static constexpr int kPlanes = 112;
  static constexpr int kCells = 64;

  InputPlanes() : data_(kPlanes * kCells, 0.0f) {}

  float at(int plane, int row, int col) const {
    return data_[static_cast<std::size_t>(plane * kCells + row * 8 + col)];
  }
  float& at(int plane, int row, int col) {
    return data_[static_cast<std::size_t>(plane * kCells + row * 8 + col)];
  }

  const std::vector<float>& data() const { return data_; }
  std::vector<float>& data() { return data_; }

  friend bool operator==(const InputPlanes&, const InputPlanes&) = default;

 private:
  std::vector<float> data_;
};

// 1858-wide legality mask aligned with the policy vocabulary.
struct LegalMask {
  std::bitset<PolicyVocabulary::kSize> bits;

  int popcount() const { return static_cast<int>(bits.count()); }
  bool test(int i) const { return bits.test(static_cast<std::size_t>(i)); }
};

// Pure function of the board and its history chain; byte-identical output
// for identical state on every platform.
InputPlanes encode_position(const chess::Board& board);

// Vocabulary slot for a legal move in this position (mover-oriented).
// Throws std::invalid_argument if the move has no slot.
int move_index(const chess::Board& board, const chess::Move& move,
               const PolicyVocabulary& vocab = PolicyVocabulary::instance());

// Inverse of move_index: concrete move for a slot. A plain slot reached by a
// pawn stepping onto the last rank resolves to a queen promotion.
chess::Move index_move(const chess::Board& board, int index,
                       const PolicyVocabulary& vocab =
                           PolicyVocabulary::instance());

LegalMask legal_mask(const chess::Board& board,
                     const PolicyVocabulary& vocab =
                         PolicyVocabulary::instance());

}  // namespace pawnprint::encode
