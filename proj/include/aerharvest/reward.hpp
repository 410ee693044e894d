#pragma once

#include <span>

namespace aerharvest {

struct RewardParams {
  double alpha = 1.0;          // per collected data unit, shared across agents
  double beta = -1.0;          // safety controller rejection penalty
  double gamma_crash = -50.0;  // crash penalty
  double epsilon_move = -0.1;  // constant movement penalty
};

// Per-agent reward for one mission slot from the device data before and after
// the slot's communication phase. The collection term sums what all agents
// drained from all devices and is the only shared component; rejection and
// crash penalties are individual.
double step_reward(std::span<const double> data_before, std::span<const double> data_after,
                   bool rejected, bool crashed_this_step, const RewardParams& params);

// Same, with the collected total already reduced.
double step_reward(double collected, bool rejected, bool crashed_this_step,
                   const RewardParams& params);

}  // namespace aerharvest
