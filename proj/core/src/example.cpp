#include "pawnprint/data/example.hpp"

#include <cmath>
#include <cstring>

namespace pawnprint::data {

PackedExample PackedExample::pack(const TrainingExample& e) {
  PackedExample p;
  const auto& v = e.planes.data();
  for (int plane = 0; plane < kBitPlanes; ++plane) {
    std::uint64_t bits = 0;
    for (int cell = 0; cell < 64; ++cell) {
      if (v[static_cast<std::size_t>(plane * 64 + cell)] != 0.0f) {
        bits |= std::uint64_t{1} << cell;
      }
    }
    p.planes[static_cast<std::size_t>(plane)] = bits;
  }
  // Plane 109 broadcasts halfmove/100; recover the integer clock.
  p.rule50 = static_cast<std::uint8_t>(
      std::lround(static_cast<double>(v[109 * 64]) * 100.0));
  p.target = e.target;
  p.player = e.player;
  p.game = e.game;
  p.ply = e.ply;
  p.side = e.side == chess::Color::Black ? 1 : 0;
  return p;
}

void PackedExample::unpack_planes_into(float* dst) const {
  std::memset(dst, 0,
              sizeof(float) * encode::InputPlanes::kPlanes *
                  encode::InputPlanes::kCells);
  for (int plane = 0; plane < kBitPlanes; ++plane) {
    const std::uint64_t bits = planes[static_cast<std::size_t>(plane)];
    if (bits == 0) continue;
    float* out = dst + plane * 64;
    for (int cell = 0; cell < 64; ++cell) {
      if (bits & (std::uint64_t{1} << cell)) out[cell] = 1.0f;
    }
  }
  const float fifty = static_cast<float>(std::min<int>(rule50, 100)) / 100.0f;
  for (int cell = 0; cell < 64; ++cell) dst[109 * 64 + cell] = fifty;
  for (int cell = 0; cell < 64; ++cell) dst[111 * 64 + cell] = 1.0f;
}

TrainingExample PackedExample::unpack() const {
  TrainingExample e;
  unpack_planes_into(e.planes.data().data());
  e.target = target;
  e.player = player;
  e.game = game;
  e.ply = ply;
  e.side = side ? chess::Color::Black : chess::Color::White;
  return e;
}

}  // namespace pawnprint::data
