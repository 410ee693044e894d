#pragma once

#include <cstdint>
#include <string>

#include "aerharvest/channel.hpp"
#include "aerharvest/learner.hpp"
#include "aerharvest/reward.hpp"
#include "aerharvest/scenario.hpp"

namespace aerharvest {

// Full run configuration. JSON with strict unknown-key rejection; every field
// except the map path has a default.
struct RunConfig {
  std::string map_path;
  std::uint64_t seed = 1;
  std::string out_dir = "runs/default";
  ChannelParams channel;
  RewardParams reward;
  Hyperparams hyper;
  ScenarioRanges scenario;

  static RunConfig load(const std::string& path);
  static RunConfig from_json_text(const std::string& text);
  std::string to_json_text() const;

  void validate() const;
};

// Network architecture implied by a config and map: observation geometry from
// the map size, normalization constants from the scenario ranges.
NetConfig net_config_for(const RunConfig& config, const CityMap& map);

ObsConfig obs_config_for(const RunConfig& config);
EpisodeConfig episode_config_for(const RunConfig& config, const CityMap& map);

}  // namespace aerharvest
