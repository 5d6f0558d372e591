#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pawnprint/data/example.hpp"
#include "pawnprint/data/sampler.hpp"
#include "pawnprint/nn/checkpoint.hpp"
#include "pawnprint/nn/schedule.hpp"

namespace pawnprint::train {

// Fine-tuning recipe. The defaults are the full production settings: 30k
// steps at 1e-4 with factor-10 drops at 15k/20k/25k, full gradient depth,
// batch 256, SGD momentum 0.9.
struct FinetuneConfig {
  nn::LrSchedule schedule;
  int stop_depth = -1;  // residual blocks that receive gradients; -1 = all
  data::SamplerConfig sampler;  // recorded recipe; sampling happens upstream
  int batch_size = 256;
  double momentum = 0.9;
  std::uint64_t seed = 0;
  std::int64_t validation_interval = 1000;
  std::size_t validation_subsample = 4096;

  void validate() const;
};

struct RunLogRow {
  std::int64_t step;  // 0-based index of the last completed update
  double train_loss;  // mean loss since the previous row
  double val_accuracy;
  double val_loss;
  double lr;
};

struct RunLog {
  std::vector<RunLogRow> rows;
  double wall_seconds = 0.0;
  std::string final_checkpoint_id;

  // step,train_loss,val_accuracy,val_loss,lr rows plus trailing comment
  // lines for wall time and checkpoint id.
  std::string to_csv() const;
};

struct Metrics {
  double accuracy = 0.0;
  double top3 = 0.0;
  double cross_entropy = 0.0;
  std::size_t count = 0;
};

// Argmax move-matching metrics of a checkpointed net over examples. Ties
// break toward the lowest vocabulary index; top-3 ranks by probability then
// index. Throws on an empty set.
Metrics validate(nn::PolicyValueNet& net,
                 std::span<const data::PackedExample> examples,
                 int batch_size = 256);

// Supervised policy training from an explicit initialization. Batches are
// drawn from the example pool with replacement, one counter-derived stream
// per step, so a run can stop at any checkpoint and resume bit-identically.
// halt_step, when >= 0, stops the loop early; resuming the returned
// checkpoint under the same config reproduces the uninterrupted run
// bit-exactly.
nn::ModelCheckpoint train_policy(
    const nn::ModelCheckpoint& init,
    std::span<const data::PackedExample> train_examples,
    std::span<const data::PackedExample> validation_examples,
    const FinetuneConfig& cfg, const std::string& player_id, RunLog* log,
    std::int64_t halt_step = -1);

// Population model from pooled shards, randomly initialized.
struct TrainBaseConfig {
  nn::NetConfig net;
  nn::LrSchedule schedule{0.01, {}, 0.1, 2000};
  int batch_size = 256;
  double momentum = 0.9;
  std::uint64_t seed = 0;
  std::int64_t validation_interval = 500;
  std::size_t validation_subsample = 4096;
};
nn::ModelCheckpoint train_base(
    const TrainBaseConfig& cfg,
    std::span<const data::PackedExample> train_examples,
    std::span<const data::PackedExample> validation_examples, RunLog* log);

// Per-player fine-tune from a base checkpoint. Every shard example must
// carry the same player reference (matching player_id); the result records
// the base checkpoint id and the player in its provenance.
std::pair<nn::ModelCheckpoint, RunLog> finetune(
    const FinetuneConfig& cfg, const nn::ModelCheckpoint& base,
    std::span<const data::PackedExample> player_examples,
    std::span<const data::PackedExample> validation_examples,
    const std::string& player_id);

}  // namespace pawnprint::train
