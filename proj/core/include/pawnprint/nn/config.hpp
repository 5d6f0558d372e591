#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pawnprint::nn {

// Residual-SE policy/value tower dimensions. The default is the desk-scale
// configuration: small enough to train on a CPU, same topology as the large
// settings.
struct NetConfig {
  int blocks = 6;
  int filters = 64;
  int se_ratio = 8;       // squeeze reduction; filters must divide evenly
  int policy_hidden = 32; // channels of the policy head 1x1 conv
  int value_hidden = 128; // width of the value head dense layer

  static constexpr int kInputPlanes = 112;
  static constexpr int kPolicySlots = 1858;
  static constexpr int kValueConvChannels = 8;
  static constexpr int kBoardCells = 64;

  friend bool operator==(const NetConfig&, const NetConfig&) = default;

  void validate() const;  // throws std::invalid_argument on bad dimensions
};

enum class ParamKind : std::uint8_t {
  Weight,   // conv / dense kernels
  Bias,
  BnGamma,
  BnBeta,
  BnMean,   // running statistics: state, never trainable
  BnVar,
};

struct ParamSpec {
  std::string name;
  std::vector<int> shape;
  ParamKind kind;
  // Index of the residual block owning this tensor; -1 for the input conv,
  // -2 for head parameters (always trainable).
  int block;

  std::size_t size() const {
    std::size_t n = 1;
    for (int d : shape) n *= static_cast<std::size_t>(d);
    return n;
  }
  bool is_state() const {
    return kind == ParamKind::BnMean || kind == ParamKind::BnVar;
  }
};

// The full parameter list in declaration order. This order is the contract
// for checkpoint files and deterministic initialization.
std::vector<ParamSpec> param_specs(const NetConfig& config);

// Fan-in used for He initialization of a weight tensor.
std::size_t fan_in(const ParamSpec& spec);

}  // namespace pawnprint::nn
