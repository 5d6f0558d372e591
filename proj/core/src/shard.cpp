#include "pawnprint/data/shard.hpp"

#include <cstring>
#include <stdexcept>

#include "pawnprint/util/io.hpp"

namespace pawnprint::data {

namespace {

constexpr char kMagic[4] = {'M', 'P', 'S', '1'};
constexpr std::uint32_t kVersion = 1;

void put_record(std::vector<std::uint8_t>& out, const PackedExample& e) {
  for (std::uint64_t plane : e.planes) put_u64(out, plane);
  out.push_back(e.rule50);
  put_u16(out, e.target);
  put_u64(out, e.player);
  put_u64(out, e.game);
  put_u16(out, e.ply);
  out.push_back(e.side);
}

PackedExample take_record(ByteReader& r) {
  PackedExample e;
  for (auto& plane : e.planes) plane = r.u64();
  e.rule50 = r.u8();
  e.target = r.u16();
  e.player = r.u64();
  e.game = r.u64();
  e.ply = r.u16();
  e.side = r.u8();
  return e;
}

}  // namespace

std::vector<std::uint8_t> write_shard(std::span<const PackedExample> examples) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + examples.size() * PackedExample::kBytes);
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(examples.size()));
  for (const PackedExample& e : examples) put_record(out, e);
  put_u64(out, fnv1a64(out.data(), out.size()));
  return out;
}

std::vector<PackedExample> read_shard(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16) throw std::runtime_error("shard: truncated header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw std::runtime_error("shard: bad magic");
  }
  ByteReader reader(bytes.subspan(4));
  const std::uint32_t version = reader.u32();
  if (version != kVersion) {
    throw std::runtime_error("shard: unsupported version " +
                             std::to_string(version));
  }
  const std::uint32_t count = reader.u32();
  const std::size_t want =
      12 + static_cast<std::size_t>(count) * PackedExample::kBytes + 8;
  if (bytes.size() != want) {
    throw std::runtime_error(
        bytes.size() < want ? "shard: truncated payload"
                            : "shard: trailing bytes after checksum");
  }
  const std::uint64_t stored =
      ByteReader(bytes.subspan(bytes.size() - 8)).u64();
  if (fnv1a64(bytes.data(), bytes.size() - 8) != stored) {
    throw std::runtime_error("shard: checksum mismatch");
  }
  std::vector<PackedExample> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) out.push_back(take_record(reader));
  return out;
}

void write_shard_file(const std::filesystem::path& path,
                      std::span<const PackedExample> examples) {
  const auto bytes = write_shard(examples);
  write_file(path, bytes);
}

std::vector<PackedExample> read_shard_file(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return read_shard(bytes);
}

}  // namespace pawnprint::data
