#include <benchmark/benchmark.h>

#include "pawnprint/chess/board.hpp"
#include "pawnprint/data/shard.hpp"
#include "pawnprint/encode/planes.hpp"
#include "pawnprint/util/rng.hpp"

using namespace pawnprint;
using namespace pawnprint::chess;

namespace {

std::vector<data::PackedExample> sample_records(int count) {
  std::vector<data::PackedExample> out;
  Rng rng(4);
  Board b = Board::start_position();
  for (int i = 0; i < count; ++i) {
    auto moves = b.legal_moves();
    if (moves.empty()) {
      b = Board::start_position();
      moves = b.legal_moves();
    }
    const Move m = moves[rng.next_below(moves.size())];
    data::TrainingExample e;
    e.planes = encode::encode_position(b);
    e.target = static_cast<std::uint16_t>(encode::move_index(b, m));
    e.game = static_cast<std::uint64_t>(i);
    out.push_back(data::PackedExample::pack(e));
    b = b.apply_trusted(m);
  }
  return out;
}

void BM_ShardWrite(benchmark::State& state) {
  const auto records = sample_records(1000);
  for (auto _ : state) {
    benchmark::DoNotOptimize(data::write_shard(records));
  }
  state.SetBytesProcessed(state.iterations() * 1000 *
                          data::PackedExample::kBytes);
}
BENCHMARK(BM_ShardWrite)->Unit(benchmark::kMillisecond);

void BM_ShardRead(benchmark::State& state) {
  const auto bytes = data::write_shard(sample_records(1000));
  for (auto _ : state) {
    benchmark::DoNotOptimize(data::read_shard(bytes));
  }
  state.SetBytesProcessed(state.iterations() *
                          static_cast<std::int64_t>(bytes.size()));
}
BENCHMARK(BM_ShardRead)->Unit(benchmark::kMillisecond);

void BM_UnpackPlanes(benchmark::State& state) {
  const auto records = sample_records(1);
  std::vector<float> dst(112 * 64);
  for (auto _ : state) {
    records[0].unpack_planes_into(dst.data());
    benchmark::DoNotOptimize(dst.data());
  }
}
BENCHMARK(BM_UnpackPlanes);

}  // namespace
