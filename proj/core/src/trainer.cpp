#include "pawnprint/train/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "pawnprint/data/reconstruct.hpp"
#include "pawnprint/encode/planes.hpp"
#include "pawnprint/util/rng.hpp"

namespace pawnprint::train {

using data::PackedExample;
using encode::LegalMask;
using nn::NetConfig;

void FinetuneConfig::validate() const {
  schedule.validate();
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (momentum < 0 || momentum >= 1) {
    throw std::invalid_argument("momentum must be in [0, 1)");
  }
  if (validation_interval < 1 ||
      schedule.total_steps % validation_interval != 0) {
    throw std::invalid_argument(
        "validation_interval must divide the schedule's total steps");
  }
}

std::string RunLog::to_csv() const {
  std::string out = "step,train_loss,val_accuracy,val_loss,lr\n";
  char buf[160];
  for (const RunLogRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%lld,%.8g,%.8g,%.8g,%.8g\n",
                  static_cast<long long>(r.step), r.train_loss, r.val_accuracy,
                  r.val_loss, r.lr);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "# wall_seconds=%.3f\n", wall_seconds);
  out += buf;
  out += "# final_checkpoint=" + final_checkpoint_id + "\n";
  return out;
}

namespace {

// Batch staging: channel-major planes plus targets and legality masks.
struct BatchBuffers {
  std::vector<float> planes;
  std::vector<std::uint16_t> targets;
  std::vector<LegalMask> masks;

  void resize(int batch) {
    planes.assign(static_cast<std::size_t>(NetConfig::kInputPlanes) * batch * 64,
                  0.0f);
    targets.assign(static_cast<std::size_t>(batch), 0);
    masks.assign(static_cast<std::size_t>(batch), LegalMask{});
  }
};

void unpack_channel_major(const PackedExample& e, float* dst, int batch,
                          int slot) {
  const std::size_t n = static_cast<std::size_t>(batch) * 64;
  const std::size_t off = static_cast<std::size_t>(slot) * 64;
  for (int plane = 0; plane < PackedExample::kBitPlanes; ++plane) {
    float* out = dst + static_cast<std::size_t>(plane) * n + off;
    const std::uint64_t bits = e.planes[static_cast<std::size_t>(plane)];
    for (int cell = 0; cell < 64; ++cell) {
      out[cell] = (bits >> cell) & 1 ? 1.0f : 0.0f;
    }
  }
  const float fifty = static_cast<float>(std::min<int>(e.rule50, 100)) / 100.0f;
  float* r50 = dst + static_cast<std::size_t>(109) * n + off;
  float* zeros = dst + static_cast<std::size_t>(110) * n + off;
  float* ones = dst + static_cast<std::size_t>(111) * n + off;
  for (int cell = 0; cell < 64; ++cell) {
    r50[cell] = fifty;
    zeros[cell] = 0.0f;
    ones[cell] = 1.0f;
  }
}

std::vector<LegalMask> precompute_masks(
    std::span<const PackedExample> examples) {
  std::vector<LegalMask> masks;
  masks.reserve(examples.size());
  for (const PackedExample& e : examples) {
    const chess::Board board = data::reconstruct_board(e);
    LegalMask mask = encode::legal_mask(board);
    if (!mask.test(e.target)) {
      throw std::runtime_error(
          "training example target is illegal in its reconstructed position");
    }
    masks.push_back(std::move(mask));
  }
  return masks;
}

struct LoopConfig {
  nn::LrSchedule schedule;
  int stop_depth;
  int batch_size;
  double momentum;
  std::uint64_t seed;
  std::int64_t validation_interval;
  std::size_t validation_subsample;
};

nn::ModelCheckpoint run_training(const nn::ModelCheckpoint& init,
                                 std::span<const PackedExample> train_set,
                                 std::span<const PackedExample> validation_set,
                                 const LoopConfig& cfg,
                                 const std::string& player_id, RunLog* log,
                                 std::int64_t halt_step) {
  if (train_set.empty()) {
    throw std::invalid_argument("training set is empty");
  }
  const auto start_time = std::chrono::steady_clock::now();

  nn::PolicyValueNet net(init.config);
  nn::load_into_net(net, init);

  const auto train_masks = precompute_masks(train_set);

  // Fixed validation subsample, drawn once.
  std::vector<std::size_t> val_indices;
  if (!validation_set.empty()) {
    Rng rng(derive_seed(cfg.seed, 0xa11da7a, validation_set.size()));
    if (validation_set.size() > cfg.validation_subsample) {
      for (std::size_t i = 0; i < cfg.validation_subsample; ++i) {
        val_indices.push_back(rng.next_below(validation_set.size()));
      }
    } else {
      for (std::size_t i = 0; i < validation_set.size(); ++i) {
        val_indices.push_back(i);
      }
    }
  }
  std::vector<PackedExample> val_subsample;
  val_subsample.reserve(val_indices.size());
  for (std::size_t i : val_indices) {
    val_subsample.push_back(validation_set[i]);
  }

  const int stop_depth =
      cfg.stop_depth < 0 ? init.config.blocks : cfg.stop_depth;
  BatchBuffers batch;
  batch.resize(cfg.batch_size);
  double interval_loss = 0.0;
  std::int64_t interval_count = 0;

  const std::int64_t last_step =
      halt_step < 0 ? cfg.schedule.total_steps
                    : std::min(halt_step, cfg.schedule.total_steps);
  for (std::int64_t step = init.step; step < last_step; ++step) {
    // Counter-derived draw stream: resumable and thread-count independent.
    Rng draw(derive_seed(cfg.seed, static_cast<std::uint64_t>(step), 0xd4a3));
    for (int b = 0; b < cfg.batch_size; ++b) {
      const std::size_t idx = draw.next_below(train_set.size());
      unpack_channel_major(train_set[idx], batch.planes.data(),
                           cfg.batch_size, b);
      batch.targets[static_cast<std::size_t>(b)] = train_set[idx].target;
      batch.masks[static_cast<std::size_t>(b)] = train_masks[idx];
    }
    net.zero_grads();
    const float loss = net.train_loss_and_grad(
        batch.planes.data(), cfg.batch_size, batch.targets.data(),
        batch.masks.data(), stop_depth);
    const double lr = cfg.schedule.lr_at_step(step);
    net.sgd_momentum_step(static_cast<float>(lr),
                          static_cast<float>(cfg.momentum));
    interval_loss += loss;
    ++interval_count;

    if (log != nullptr && (step + 1) % cfg.validation_interval == 0) {
      RunLogRow row;
      row.step = step;
      row.train_loss = interval_loss / static_cast<double>(interval_count);
      row.lr = lr;
      if (!val_subsample.empty()) {
        const Metrics m = validate(net, val_subsample, cfg.batch_size);
        row.val_accuracy = m.accuracy;
        row.val_loss = m.cross_entropy;
      } else {
        row.val_accuracy = 0.0;
        row.val_loss = 0.0;
      }
      log->rows.push_back(row);
      interval_loss = 0.0;
      interval_count = 0;
    }
  }

  nn::ModelCheckpoint out = nn::checkpoint_from_net(
      net, last_step, init.base_id, player_id, cfg.seed);
  if (log != nullptr) {
    log->final_checkpoint_id = out.id();
    log->wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start_time)
            .count();
  }
  return out;
}

}  // namespace

Metrics validate(nn::PolicyValueNet& net,
                 std::span<const PackedExample> examples, int batch_size) {
  if (examples.empty()) {
    throw std::invalid_argument("validate: empty example set");
  }
  Metrics m;
  m.count = examples.size();
  std::vector<float> planes;
  const int slots = NetConfig::kPolicySlots;

  for (std::size_t begin = 0; begin < examples.size();
       begin += static_cast<std::size_t>(batch_size)) {
    const int batch = static_cast<int>(
        std::min<std::size_t>(batch_size, examples.size() - begin));
    planes.assign(static_cast<std::size_t>(NetConfig::kInputPlanes) * batch * 64,
                  0.0f);
    for (int b = 0; b < batch; ++b) {
      unpack_channel_major(examples[begin + static_cast<std::size_t>(b)],
                           planes.data(), batch, b);
    }
    const auto out = net.forward(planes.data(), batch, /*train_mode=*/false);
    for (int b = 0; b < batch; ++b) {
      const PackedExample& e = examples[begin + static_cast<std::size_t>(b)];
      const chess::Board board = data::reconstruct_board(e);
      const LegalMask mask = encode::legal_mask(board);
      const auto probs = nn::masked_policy(
          std::span<const float>(out.policy.data() +
                                     static_cast<std::size_t>(b) * slots,
                                 static_cast<std::size_t>(slots)),
          mask);
      // Argmax with lowest-index tie break.
      int best = -1;
      float best_p = -1.0f;
      int better_than_target = 0;
      const float target_p = probs[e.target];
      for (int s = 0; s < slots; ++s) {
        if (!mask.test(s)) continue;
        if (probs[static_cast<std::size_t>(s)] > best_p) {
          best_p = probs[static_cast<std::size_t>(s)];
          best = s;
        }
        if (probs[static_cast<std::size_t>(s)] > target_p ||
            (probs[static_cast<std::size_t>(s)] == target_p && s < e.target)) {
          ++better_than_target;
        }
      }
      if (best == e.target) m.accuracy += 1.0;
      if (better_than_target < 3) m.top3 += 1.0;
      m.cross_entropy += -std::log(std::max(1e-30, double(target_p)));
    }
  }
  m.accuracy /= static_cast<double>(m.count);
  m.top3 /= static_cast<double>(m.count);
  m.cross_entropy /= static_cast<double>(m.count);
  return m;
}

nn::ModelCheckpoint train_policy(
    const nn::ModelCheckpoint& init,
    std::span<const PackedExample> train_examples,
    std::span<const PackedExample> validation_examples,
    const FinetuneConfig& cfg, const std::string& player_id, RunLog* log,
    std::int64_t halt_step) {
  cfg.validate();
  LoopConfig loop{cfg.schedule,  cfg.stop_depth,
                  cfg.batch_size, cfg.momentum,
                  cfg.seed,       cfg.validation_interval,
                  cfg.validation_subsample};
  return run_training(init, train_examples, validation_examples, loop,
                      player_id, log, halt_step);
}

nn::ModelCheckpoint train_base(
    const TrainBaseConfig& cfg, std::span<const PackedExample> train_examples,
    std::span<const PackedExample> validation_examples, RunLog* log) {
  cfg.schedule.validate();
  const nn::ModelCheckpoint init = nn::init_random(cfg.net, cfg.seed);
  LoopConfig loop{cfg.schedule,    cfg.net.blocks,
                  cfg.batch_size,  cfg.momentum,
                  cfg.seed,        cfg.validation_interval,
                  cfg.validation_subsample};
  return run_training(init, train_examples, validation_examples, loop,
                      /*player_id=*/"", log, /*halt_step=*/-1);
}

std::pair<nn::ModelCheckpoint, RunLog> finetune(
    const FinetuneConfig& cfg, const nn::ModelCheckpoint& base,
    std::span<const PackedExample> player_examples,
    std::span<const PackedExample> validation_examples,
    const std::string& player_id) {
  cfg.validate();
  if (player_examples.empty()) {
    throw std::invalid_argument("finetune: no player examples");
  }
  const std::uint64_t expected = data::player_ref(player_id);
  for (const PackedExample& e : player_examples) {
    if (e.player != expected) {
      throw std::invalid_argument(
          "finetune: shard contains examples from another player");
    }
  }
  nn::ModelCheckpoint start = nn::init_from_base(base);
  RunLog log;
  nn::ModelCheckpoint result = train_policy(
      start, player_examples, validation_examples, cfg, player_id, &log);
  return {std::move(result), std::move(log)};
}

}  // namespace pawnprint::train
