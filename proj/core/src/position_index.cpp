#include "pawnprint/data/position_index.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

#include "pawnprint/chess/board.hpp"
#include "pawnprint/util/hash.hpp"
#include "pawnprint/util/io.hpp"

namespace pawnprint::data {

namespace {
constexpr char kMagic[4] = {'M', 'P', 'I', 'X'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

std::vector<std::uint8_t> PositionIndex::serialize() const {
  std::vector<std::pair<std::uint64_t, std::uint32_t>> entries(counts_.begin(),
                                                               counts_.end());
  std::sort(entries.begin(), entries.end());
  std::vector<std::uint8_t> out;
  out.reserve(16 + entries.size() * 12 + 8);
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u32(out, kVersion);
  put_u64(out, entries.size());
  for (const auto& [key, count] : entries) {
    put_u64(out, key);
    put_u32(out, count);
  }
  put_u64(out, fnv1a64(out.data(), out.size()));
  return out;
}

PositionIndex PositionIndex::deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 24 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw std::runtime_error("position index: bad header");
  }
  ByteReader reader(bytes.subspan(4));
  if (reader.u32() != kVersion) {
    throw std::runtime_error("position index: unsupported version");
  }
  const std::uint64_t n = reader.u64();
  if (bytes.size() != 16 + n * 12 + 8) {
    throw std::runtime_error("position index: truncated");
  }
  if (fnv1a64(bytes.data(), bytes.size() - 8) !=
      ByteReader(bytes.subspan(bytes.size() - 8)).u64()) {
    throw std::runtime_error("position index: checksum mismatch");
  }
  PositionIndex out;
  out.counts_.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t key = reader.u64();
    out.counts_[key] = reader.u32();
  }
  return out;
}

void PositionIndex::save(const std::filesystem::path& path) const {
  const auto bytes = serialize();
  write_file(path, bytes);
}

PositionIndex PositionIndex::load(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return deserialize(bytes);
}

PositionIndex build_position_index(const std::vector<pgn::GameRecord>& games,
                                   const std::string& player) {
  PositionIndex index;
  for (const auto& game : games) {
    const chess::Color side = game.color_of(player);
    chess::Board board = chess::Board::start_position();
    for (const auto& ply : game.plies) {
      if (board.side_to_move() == side) index.add(board.position_key());
      board = board.apply_trusted(ply.move);
    }
  }
  return index;
}

}  // namespace pawnprint::data
