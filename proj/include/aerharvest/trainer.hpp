#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "aerharvest/config.hpp"
#include "aerharvest/world.hpp"

namespace aerharvest {

struct TrainResult {
  std::int64_t steps = 0;
  int episodes = 0;
  std::string model_path;
  double final_eval_product = 0.0;
};

// Full training run: softmax-exploration episodes with per-slot DDQN updates,
// a greedy progress evaluation every 5 episodes, periodic checkpoints, a
// bitwise-deterministic training log CSV, and a run manifest.
// `progress` gets one machine-readable line per episode.
TrainResult train(const RunConfig& config, const CityMap& map, const LosTable& los,
                  std::ostream* progress);

}  // namespace aerharvest
