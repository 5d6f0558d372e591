#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pawnprint/pgn/game_record.hpp"

namespace pawnprint::data {

// Multiset of position keys a player faced (position before each of their
// own moves) across their training games. Backs the seen/unseen accuracy
// decomposition. Keys are transposition-invariant.
class PositionIndex {
 public:
  void add(std::uint64_t key) { ++counts_[key]; }
  bool contains(std::uint64_t key) const { return counts_.count(key) != 0; }
  std::uint32_t count(std::uint64_t key) const {
    const auto it = counts_.find(key);
    return it == counts_.end() ? 0 : it->second;
  }
  std::size_t size() const { return counts_.size(); }

  // Binary container: "MPIX", u32 version, u64 entry count, sorted
  // (u64 key, u32 count) pairs, u64 FNV-1a checksum.
  std::vector<std::uint8_t> serialize() const;
  static PositionIndex deserialize(std::span<const std::uint8_t> bytes);
  void save(const std::filesystem::path& path) const;
  static PositionIndex load(const std::filesystem::path& path);

 private:
  std::unordered_map<std::uint64_t, std::uint32_t> counts_;
};

// Replays the games and indexes every position the player was about to move
// in. Order of games does not matter.
PositionIndex build_position_index(const std::vector<pgn::GameRecord>& games,
                                   const std::string& player);

}  // namespace pawnprint::data
