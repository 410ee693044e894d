#pragma once

#include <functional>
#include <string>
#include <vector>

#include "aerharvest/channel.hpp"
#include "aerharvest/comms.hpp"
#include "aerharvest/dynamics.hpp"
#include "aerharvest/learner.hpp"
#include "aerharvest/obsmap.hpp"
#include "aerharvest/reward.hpp"
#include "aerharvest/rng.hpp"
#include "aerharvest/world.hpp"

namespace aerharvest {

// Per-episode randomization ranges (all uniform, inclusive).
struct ScenarioRanges {
  int uavs_min = 1, uavs_max = 3;
  int devices_min = 3, devices_max = 10;
  double data_min = 5.0, data_max = 20.0;
  int flying_time_min = 50, flying_time_max = 150;
};

struct ScenarioParams {
  int num_uavs = 1;
  int num_devices = 0;
  int flying_time = 0;             // b0, shared by the fleet
  std::vector<double> data_init;   // one per device
  std::vector<Cell> starts;        // distinct landing cells
  std::vector<Cell> devices;       // distinct non-building cells
};

// Draw order: num_uavs, num_devices, flying_time, data_init, starts, devices.
ScenarioParams sample_scenario(const ScenarioRanges& ranges, const CityMap& map, Rng& rng);

struct EpisodeConfig {
  ChannelParams channel;  // power already normalized for the map
  RewardParams reward;
  ObsConfig obs;
};

using Policy = std::function<Action(const Observation&, int uav, Rng&)>;

Policy random_policy();
Policy greedy_policy(const QNetwork& net);
Policy softmax_policy(const QNetwork& net, double temperature);

struct StepRecord {
  int slot = 0;
  int uav = 0;
  Cell from, to;
  Action selected = Action::kHover;
  Action executed = Action::kHover;
  bool rejected = false;
  bool crashed = false;
  bool landed = false;
  double reward = 0.0;
};

struct EpisodeResult {
  ScenarioParams scenario;
  std::vector<StepRecord> steps;  // ordered by (slot, uav)
  CommLog comm;
  std::vector<UavState> uavs;        // final states
  std::vector<DeviceState> devices;  // final states
  int slots = 0;
  double total_initial = 0.0;
  double total_collected = 0.0;
  std::vector<double> agent_reward;  // cumulative, per agent
};

// Runs one Dec-POMDP episode. With a learner attached, every acting agent
// pushes its transition and triggers one training step per mission slot; the
// same rng drives policy sampling, shadowing, and replay draws.
EpisodeResult run_episode(const CityMap& map, const LosTable& los, const ScenarioParams& scenario,
                          const EpisodeConfig& config, const Policy& policy, Rng& rng,
                          Learner* learner = nullptr);

std::string episode_to_json_text(const EpisodeResult& result);
EpisodeResult episode_from_json_text(const std::string& text);

}  // namespace aerharvest
