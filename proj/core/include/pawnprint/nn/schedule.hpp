#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace pawnprint::nn {

// Step-decay learning-rate schedule: base_lr multiplied by drop_factor at
// each listed step. The default is the fine-tuning recipe: 1e-4 with
// factor-10 drops at 15k, 20k and 25k over a 30k-step run.
struct LrSchedule {
  double base_lr = 1e-4;
  std::vector<std::int64_t> drop_steps{15000, 20000, 25000};
  double drop_factor = 0.1;
  std::int64_t total_steps = 30000;

  void validate() const {
    if (base_lr <= 0 || total_steps <= 0) {
      throw std::invalid_argument("lr schedule: base_lr and total_steps must be positive");
    }
    std::int64_t prev = -1;
    for (std::int64_t s : drop_steps) {
      if (s <= prev || s >= total_steps) {
        throw std::invalid_argument(
            "lr schedule: drop steps must be strictly increasing and below "
            "total_steps");
      }
      prev = s;
    }
  }

  double lr_at_step(std::int64_t step) const {
    if (step < 0 || step >= total_steps) {
      throw std::out_of_range("lr schedule: step out of range");
    }
    double lr = base_lr;
    for (std::int64_t s : drop_steps) {
      if (step >= s) lr *= drop_factor;
    }
    return lr;
  }

  // The same schedule compressed to a different run length, drop points
  // scaled proportionally.
  LrSchedule scaled_to(std::int64_t steps) const {
    LrSchedule out = *this;
    out.total_steps = steps;
    out.drop_steps.clear();
    for (std::int64_t s : drop_steps) {
      out.drop_steps.push_back(s * steps / total_steps);
    }
    return out;
  }
};

}  // namespace pawnprint::nn
