#include "pawnprint/encode/vocabulary.hpp"

#include <stdexcept>

namespace pawnprint::encode {

using chess::PieceKind;
using chess::Square;

namespace {

constexpr int kQueenDirs[8][2] = {{0, 1},  {1, 1},  {1, 0},  {1, -1},
                                  {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}};
constexpr int kKnightJumps[8][2] = {{1, 2},  {2, 1},  {2, -1}, {1, -2},
                                    {-1, -2}, {-2, -1}, {-2, 1}, {-1, 2}};

int promo_class(PieceKind k) {
  switch (k) {
    case PieceKind::None:
    case PieceKind::Queen:
      return 0;
    case PieceKind::Knight: return 1;
    case PieceKind::Bishop: return 2;
    case PieceKind::Rook: return 3;
    default: return -1;
  }
}

}  // namespace

PolicyVocabulary::PolicyVocabulary() {
  lookup_.fill(-1);
  templates_.reserve(kSize);

  auto add = [&](Square from, Square to, PieceKind promo) {
    const int cls = promo_class(promo);
    const std::size_t key = static_cast<std::size_t>(((from * 64) + to) * 4 + cls);
    lookup_[key] = static_cast<std::int16_t>(templates_.size());
    templates_.push_back({from, to, promo});
  };

  for (Square from = 0; from < 64; ++from) {
    const int f = chess::file_of(from);
    const int r = chess::rank_of(from);
    for (const auto& d : kQueenDirs) {
      for (int dist = 1; dist <= 7; ++dist) {
        const int tf = f + d[0] * dist;
        const int tr = r + d[1] * dist;
        if (tf < 0 || tf > 7 || tr < 0 || tr > 7) break;
        add(from, chess::make_square(tf, tr), PieceKind::None);
      }
    }
    for (const auto& j : kKnightJumps) {
      const int tf = f + j[0];
      const int tr = r + j[1];
      if (tf < 0 || tf > 7 || tr < 0 || tr > 7) continue;
      add(from, chess::make_square(tf, tr), PieceKind::None);
    }
  }
  if (static_cast<int>(templates_.size()) != kSlideKnightSlots) {
    throw std::logic_error("vocabulary: slide/knight slot count mismatch");
  }

  for (int f = 0; f < 8; ++f) {
    for (int df = -1; df <= 1; ++df) {
      const int tf = f + df;
      if (tf < 0 || tf > 7) continue;
      const Square from = chess::make_square(f, 6);
      const Square to = chess::make_square(tf, 7);
      for (PieceKind k : {PieceKind::Knight, PieceKind::Bishop,
                          PieceKind::Rook}) {
        add(from, to, k);
      }
    }
  }
  if (static_cast<int>(templates_.size()) != kSize) {
    throw std::logic_error("vocabulary: total slot count mismatch");
  }
}

const PolicyVocabulary& PolicyVocabulary::instance() {
  static const PolicyVocabulary vocab;
  return vocab;
}

int PolicyVocabulary::index_of(Square from, Square to,
                               PieceKind promotion) const {
  if (!chess::valid_square(from) || !chess::valid_square(to)) return -1;
  const int cls = promo_class(promotion);
  if (cls < 0) return -1;
  return lookup_[static_cast<std::size_t>(((from * 64) + to) * 4 + cls)];
}

const PolicyVocabulary::MoveTemplate& PolicyVocabulary::template_at(
    int index) const {
  if (index < 0 || index >= size()) {
    throw std::out_of_range("vocabulary index out of range: " +
                            std::to_string(index));
  }
  return templates_[static_cast<std::size_t>(index)];
}

std::string PolicyVocabulary::dump() const {
  std::string out;
  out.reserve(templates_.size() * 12);
  for (std::size_t i = 0; i < templates_.size(); ++i) {
    const MoveTemplate& t = templates_[i];
    chess::Move m{t.from, t.to, t.promotion};
    out += std::to_string(i);
    out += ' ';
    out += m.uci();
    out += '\n';
  }
  return out;
}

}  // namespace pawnprint::encode
