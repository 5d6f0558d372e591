#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "pawnprint/data/example.hpp"

namespace pawnprint::data {

// Versioned binary training-shard container:
//
//   "MPS1"                magic
//   u32 little-endian     format version (currently 1)
//   u32 little-endian     record count
//   count * 894 bytes     fixed-width PackedExample records
//   u64 little-endian     FNV-1a checksum of every preceding byte
//
// Readers reject bad magic, unknown versions, truncated payloads and
// checksum mismatches with distinct error messages.
std::vector<std::uint8_t> write_shard(std::span<const PackedExample> examples);
std::vector<PackedExample> read_shard(std::span<const std::uint8_t> bytes);

void write_shard_file(const std::filesystem::path& path,
                      std::span<const PackedExample> examples);
std::vector<PackedExample> read_shard_file(const std::filesystem::path& path);

}  // namespace pawnprint::data
