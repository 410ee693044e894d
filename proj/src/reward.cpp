#include "aerharvest/reward.hpp"

#include <cassert>

namespace aerharvest {

double step_reward(std::span<const double> data_before, std::span<const double> data_after,
                   bool rejected, bool crashed_this_step, const RewardParams& params) {
  assert(data_before.size() == data_after.size());
  double collected = 0.0;
  for (std::size_t k = 0; k < data_before.size(); ++k) {
    collected += data_before[k] - data_after[k];
  }
  return step_reward(collected, rejected, crashed_this_step, params);
}

double step_reward(double collected, bool rejected, bool crashed_this_step,
                   const RewardParams& params) {
  double r = params.alpha * collected + params.epsilon_move;
  if (rejected) r += params.beta;
  if (crashed_this_step) r += params.gamma_crash;
  return r;
}

}  // namespace aerharvest
