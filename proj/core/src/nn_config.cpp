#include "pawnprint/nn/config.hpp"

#include <stdexcept>

namespace pawnprint::nn {

void NetConfig::validate() const {
  if (blocks < 1 || filters < 1 || se_ratio < 1 || policy_hidden < 1 ||
      value_hidden < 1) {
    throw std::invalid_argument("net config: all dimensions must be positive");
  }
  if (filters % se_ratio != 0) {
    throw std::invalid_argument(
        "net config: filters must be divisible by se_ratio");
  }
}

namespace {

void add_bn(std::vector<ParamSpec>& out, const std::string& prefix,
            int channels, int block) {
  out.push_back({prefix + "/gamma", {channels}, ParamKind::BnGamma, block});
  out.push_back({prefix + "/beta", {channels}, ParamKind::BnBeta, block});
  out.push_back({prefix + "/mean", {channels}, ParamKind::BnMean, block});
  out.push_back({prefix + "/var", {channels}, ParamKind::BnVar, block});
}

}  // namespace

std::vector<ParamSpec> param_specs(const NetConfig& c) {
  c.validate();
  std::vector<ParamSpec> out;
  const int f = c.filters;

  out.push_back({"input/conv/w",
                 {f, NetConfig::kInputPlanes, 3, 3},
                 ParamKind::Weight,
                 -1});
  add_bn(out, "input/bn", f, -1);

  const int squeeze = f / c.se_ratio;
  for (int b = 0; b < c.blocks; ++b) {
    const std::string p = "block" + std::to_string(b);
    out.push_back({p + "/conv1/w", {f, f, 3, 3}, ParamKind::Weight, b});
    add_bn(out, p + "/bn1", f, b);
    out.push_back({p + "/conv2/w", {f, f, 3, 3}, ParamKind::Weight, b});
    add_bn(out, p + "/bn2", f, b);
    out.push_back({p + "/se/fc1/w", {squeeze, f}, ParamKind::Weight, b});
    out.push_back({p + "/se/fc1/b", {squeeze}, ParamKind::Bias, b});
    out.push_back({p + "/se/fc2/w", {f, squeeze}, ParamKind::Weight, b});
    out.push_back({p + "/se/fc2/b", {f}, ParamKind::Bias, b});
  }

  out.push_back({"policy/conv/w",
                 {c.policy_hidden, f, 1, 1},
                 ParamKind::Weight,
                 -2});
  add_bn(out, "policy/bn", c.policy_hidden, -2);
  out.push_back({"policy/fc/w",
                 {NetConfig::kPolicySlots,
                  c.policy_hidden * NetConfig::kBoardCells},
                 ParamKind::Weight,
                 -2});
  out.push_back(
      {"policy/fc/b", {NetConfig::kPolicySlots}, ParamKind::Bias, -2});

  out.push_back({"value/conv/w",
                 {NetConfig::kValueConvChannels, f, 1, 1},
                 ParamKind::Weight,
                 -2});
  add_bn(out, "value/bn", NetConfig::kValueConvChannels, -2);
  out.push_back({"value/fc1/w",
                 {c.value_hidden,
                  NetConfig::kValueConvChannels * NetConfig::kBoardCells},
                 ParamKind::Weight,
                 -2});
  out.push_back({"value/fc1/b", {c.value_hidden}, ParamKind::Bias, -2});
  out.push_back({"value/fc2/w", {1, c.value_hidden}, ParamKind::Weight, -2});
  out.push_back({"value/fc2/b", {1}, ParamKind::Bias, -2});
  return out;
}

std::size_t fan_in(const ParamSpec& spec) {
  if (spec.shape.size() == 4) {
    return static_cast<std::size_t>(spec.shape[1]) *
           static_cast<std::size_t>(spec.shape[2]) *
           static_cast<std::size_t>(spec.shape[3]);
  }
  if (spec.shape.size() == 2) {
    return static_cast<std::size_t>(spec.shape[1]);
  }
  return 1;
}

}  // namespace pawnprint::nn
