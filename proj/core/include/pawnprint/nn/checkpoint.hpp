#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pawnprint/nn/config.hpp"
#include "pawnprint/nn/net.hpp"

namespace pawnprint::nn {

struct NamedTensor {
  std::string name;
  std::vector<int> shape;
  std::vector<float> values;

  friend bool operator==(const NamedTensor&, const NamedTensor&) = default;
};

// Everything needed to resume or reproduce a run: topology config, all
// parameter tensors (weights plus batch-norm running stats), optimizer
// momentum buffers, the step counter and provenance.
//
// File container ("MPCK"): magic, u32 version, length-prefixed JSON header
// (config, step, provenance, tensor manifest), float32 little-endian tensor
// data in manifest order, u64 FNV-1a checksum.
struct ModelCheckpoint {
  NetConfig config;
  std::vector<NamedTensor> tensors;   // param_specs order
  std::vector<NamedTensor> momentum;  // empty when no optimizer state yet
  std::int64_t step = 0;
  std::string base_id;    // id() of the checkpoint training started from
  std::string player_id;  // fine-tune target, empty for population models
  std::uint64_t seed = 0;

  friend bool operator==(const ModelCheckpoint&,
                         const ModelCheckpoint&) = default;

  // Content id: hex of the checksum over the serialized bytes.
  std::string id() const;

  std::vector<std::uint8_t> serialize() const;
  static ModelCheckpoint deserialize(std::span<const std::uint8_t> bytes);
  void save(const std::filesystem::path& path) const;
  static ModelCheckpoint load(const std::filesystem::path& path);

  // Validates the tensor manifest against the config's parameter list;
  // throws naming the first offending tensor.
  void validate() const;
};

// He fan-in initialization for weights, identity batch norms, zero biases.
ModelCheckpoint init_random(const NetConfig& config, std::uint64_t seed);

// Exact copy of the base (fresh optimizer state and step counter), with
// provenance pointing at it.
ModelCheckpoint init_from_base(const ModelCheckpoint& base);

// Copy of the base with independent Gaussian noise added to every learned
// tensor; running statistics are left untouched.
ModelCheckpoint init_noise(const ModelCheckpoint& base, double sigma,
                           std::uint64_t seed);

// Moves weights (and momentum, when present) between net and checkpoint.
void load_into_net(PolicyValueNet& net, const ModelCheckpoint& ckpt);
ModelCheckpoint checkpoint_from_net(const PolicyValueNet& net,
                                    std::int64_t step,
                                    const std::string& base_id,
                                    const std::string& player_id,
                                    std::uint64_t seed);

}  // namespace pawnprint::nn
