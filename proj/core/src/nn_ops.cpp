#include "pawnprint/nn/net.hpp"

namespace pawnprint::nn {

std::vector<float> masked_policy(std::span<const float> logits,
                                 const encode::LegalMask& mask) {
  if (logits.size() != NetConfig::kPolicySlots) {
    throw std::invalid_argument("masked_policy: expected 1858 logits");
  }
  if (mask.popcount() == 0) {
    throw std::invalid_argument("masked_policy: all-zero legality mask");
  }
  std::vector<float> out(logits.size(), 0.0f);
  float max_logit = -std::numeric_limits<float>::infinity();
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (mask.test(static_cast<int>(i))) {
      max_logit = std::max(max_logit, logits[i]);
    }
  }
  double denom = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (mask.test(static_cast<int>(i))) {
      const double e = std::exp(static_cast<double>(logits[i] - max_logit));
      out[i] = static_cast<float>(e);
      denom += e;
    }
  }
  for (float& v : out) v = static_cast<float>(v / denom);
  return out;
}

}  // namespace pawnprint::nn
