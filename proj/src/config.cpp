#include "aerharvest/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "aerharvest/errors.hpp"
#include "aerharvest/jsonio.hpp"

namespace aerharvest {

using nlohmann::json;

template <typename T>
static void get_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

static void get_range_int(const json& j, const char* key, int& lo, int& hi) {
  if (!j.contains(key)) return;
  const json& r = j.at(key);
  if (!r.is_array() || r.size() != 2) throw UsageError(std::string(key) + " must be [min, max]");
  lo = r.at(0).get<int>();
  hi = r.at(1).get<int>();
}

static void get_range_double(const json& j, const char* key, double& lo, double& hi) {
  if (!j.contains(key)) return;
  const json& r = j.at(key);
  if (!r.is_array() || r.size() != 2) throw UsageError(std::string(key) + " must be [min, max]");
  lo = r.at(0).get<double>();
  hi = r.at(1).get<double>();
}

RunConfig RunConfig::from_json_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw UsageError("run config is not valid JSON");
  require_keys(j, {"map", "seed", "out_dir", "channel", "reward", "hyper", "scenario"},
               "run config");
  RunConfig c;
  get_if(j, "map", c.map_path);
  get_if(j, "seed", c.seed);
  get_if(j, "out_dir", c.out_dir);

  if (j.contains("channel")) {
    const json& ch = j.at("channel");
    require_keys(ch,
                 {"alpha_los", "alpha_nlos", "sigma2_los", "sigma2_nlos", "cell_edge_snr_db",
                  "lambda", "delta_t"},
                 "channel config");
    get_if(ch, "alpha_los", c.channel.alpha_los);
    get_if(ch, "alpha_nlos", c.channel.alpha_nlos);
    get_if(ch, "sigma2_los", c.channel.sigma2_los);
    get_if(ch, "sigma2_nlos", c.channel.sigma2_nlos);
    get_if(ch, "cell_edge_snr_db", c.channel.cell_edge_snr_db);
    get_if(ch, "lambda", c.channel.lambda);
    get_if(ch, "delta_t", c.channel.delta_t);
  }
  if (j.contains("reward")) {
    const json& r = j.at("reward");
    require_keys(r, {"alpha", "beta", "gamma_crash", "epsilon_move"}, "reward config");
    get_if(r, "alpha", c.reward.alpha);
    get_if(r, "beta", c.reward.beta);
    get_if(r, "gamma_crash", c.reward.gamma_crash);
    get_if(r, "epsilon_move", c.reward.epsilon_move);
  }
  if (j.contains("hyper")) {
    const json& h = j.at("hyper");
    require_keys(h,
                 {"capacity", "minibatch", "tau", "gamma", "temperature", "learning_rate",
                  "max_steps", "local_size", "global_pooling", "conv_filters", "conv_kernel",
                  "conv_layers", "hidden", "checkpoint_interval"},
                 "hyper config");
    get_if(h, "capacity", c.hyper.capacity);
    get_if(h, "minibatch", c.hyper.minibatch);
    get_if(h, "tau", c.hyper.tau);
    get_if(h, "gamma", c.hyper.gamma);
    get_if(h, "temperature", c.hyper.temperature);
    get_if(h, "learning_rate", c.hyper.learning_rate);
    get_if(h, "max_steps", c.hyper.max_steps);
    get_if(h, "local_size", c.hyper.local_size);
    get_if(h, "global_pooling", c.hyper.global_pooling);
    get_if(h, "conv_filters", c.hyper.conv_filters);
    get_if(h, "conv_kernel", c.hyper.conv_kernel);
    get_if(h, "conv_layers", c.hyper.conv_layers);
    get_if(h, "hidden", c.hyper.hidden);
    get_if(h, "checkpoint_interval", c.hyper.checkpoint_interval);
  }
  if (j.contains("scenario")) {
    const json& s = j.at("scenario");
    require_keys(s, {"num_uavs", "num_devices", "data_init", "flying_time"}, "scenario config");
    get_range_int(s, "num_uavs", c.scenario.uavs_min, c.scenario.uavs_max);
    get_range_int(s, "num_devices", c.scenario.devices_min, c.scenario.devices_max);
    get_range_double(s, "data_init", c.scenario.data_min, c.scenario.data_max);
    get_range_int(s, "flying_time", c.scenario.flying_time_min, c.scenario.flying_time_max);
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open run config: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  try {
    return from_json_text(ss.str());
  } catch (const UsageError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

std::string RunConfig::to_json_text() const {
  json j;
  j["map"] = map_path;
  j["seed"] = seed;
  j["out_dir"] = out_dir;
  j["channel"] = {{"alpha_los", channel.alpha_los},
                  {"alpha_nlos", channel.alpha_nlos},
                  {"sigma2_los", channel.sigma2_los},
                  {"sigma2_nlos", channel.sigma2_nlos},
                  {"cell_edge_snr_db", channel.cell_edge_snr_db},
                  {"lambda", channel.lambda},
                  {"delta_t", channel.delta_t}};
  j["reward"] = {{"alpha", reward.alpha},
                 {"beta", reward.beta},
                 {"gamma_crash", reward.gamma_crash},
                 {"epsilon_move", reward.epsilon_move}};
  j["hyper"] = {{"capacity", hyper.capacity},
                {"minibatch", hyper.minibatch},
                {"tau", hyper.tau},
                {"gamma", hyper.gamma},
                {"temperature", hyper.temperature},
                {"learning_rate", hyper.learning_rate},
                {"max_steps", hyper.max_steps},
                {"local_size", hyper.local_size},
                {"global_pooling", hyper.global_pooling},
                {"conv_filters", hyper.conv_filters},
                {"conv_kernel", hyper.conv_kernel},
                {"conv_layers", hyper.conv_layers},
                {"hidden", hyper.hidden},
                {"checkpoint_interval", hyper.checkpoint_interval}};
  j["scenario"] = {{"num_uavs", {scenario.uavs_min, scenario.uavs_max}},
                   {"num_devices", {scenario.devices_min, scenario.devices_max}},
                   {"data_init", {scenario.data_min, scenario.data_max}},
                   {"flying_time", {scenario.flying_time_min, scenario.flying_time_max}}};
  return j.dump(2);
}

void RunConfig::validate() const {
  if (map_path.empty()) throw UsageError("run config needs a map path");
  if (scenario.uavs_min < 1 || scenario.uavs_min > scenario.uavs_max ||
      scenario.devices_min < 0 || scenario.devices_min > scenario.devices_max ||
      scenario.data_min < 0.0 || scenario.data_min > scenario.data_max ||
      scenario.flying_time_min < 1 || scenario.flying_time_min > scenario.flying_time_max)
    throw UsageError("scenario ranges must satisfy 0 < min <= max");
  if (reward.alpha <= 0.0 || reward.beta > 0.0 || reward.gamma_crash > 0.0 ||
      reward.epsilon_move > 0.0)
    throw UsageError("reward params: alpha > 0 and penalties <= 0");
  if (hyper.minibatch < 1 || hyper.capacity < std::size_t(hyper.minibatch))
    throw UsageError("replay capacity must be at least the minibatch size");
  if (hyper.tau <= 0.0 || hyper.tau > 1.0) throw UsageError("tau must be in (0, 1]");
  if (hyper.gamma < 0.0 || hyper.gamma >= 1.0) throw UsageError("discount must be in [0, 1)");
  if (hyper.temperature <= 0.0) throw UsageError("temperature must be positive");
  if (hyper.learning_rate <= 0.0) throw UsageError("learning rate must be positive");
  if (hyper.max_steps < 0) throw UsageError("max_steps must be nonnegative");
  if (hyper.local_size % 2 == 0 || hyper.local_size < 1)
    throw UsageError("local observation size must be odd and positive");
  if (hyper.global_pooling < 1) throw UsageError("global pooling must be at least 1");
  if (channel.lambda < 1 || channel.delta_t <= 0.0)
    throw UsageError("channel needs lambda >= 1 and delta_t > 0");
  if (channel.sigma2_los < 0.0 || channel.sigma2_nlos < 0.0)
    throw UsageError("shadowing variances must be nonnegative");
}

NetConfig net_config_for(const RunConfig& config, const CityMap& map) {
  ObsConfig obs = obs_config_for(config);
  obs.validate(map.size());
  NetConfig nc;
  nc.local_size = obs.local_size;
  nc.global_size = obs.global_size(map.size());
  nc.channels = 6;
  nc.conv_filters = config.hyper.conv_filters;
  nc.conv_kernel = config.hyper.conv_kernel;
  nc.conv_layers = config.hyper.conv_layers;
  nc.hidden = config.hyper.hidden;
  nc.actions = kNumActions;
  nc.norm_data = config.scenario.data_max > 0.0 ? config.scenario.data_max : 1.0;
  nc.norm_flying_time = config.scenario.flying_time_max;
  return nc;
}

ObsConfig obs_config_for(const RunConfig& config) {
  ObsConfig obs;
  obs.local_size = config.hyper.local_size;
  obs.global_pooling = config.hyper.global_pooling;
  return obs;
}

EpisodeConfig episode_config_for(const RunConfig& config, const CityMap& map) {
  EpisodeConfig ec;
  ec.channel = config.channel;
  normalize_power(ec.channel, map);
  ec.reward = config.reward;
  ec.obs = obs_config_for(config);
  return ec;
}

}  // namespace aerharvest
