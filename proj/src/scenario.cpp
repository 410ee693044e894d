#include "aerharvest/scenario.hpp"

#include <numeric>

#include "json.hpp"

#include "aerharvest/errors.hpp"
#include "aerharvest/jsonio.hpp"

namespace aerharvest {

using nlohmann::json;

// First n cells of a seeded partial shuffle, i.e. a uniform draw without
// replacement.
static std::vector<Cell> sample_cells(std::vector<Cell> candidates, int n, Rng& rng,
                                      const char* what) {
  if (int(candidates.size()) < n)
    throw UsageError(std::string("not enough candidate cells for ") + what);
  for (int i = 0; i < n; ++i) {
    const std::size_t j = i + rng.index(candidates.size() - i);
    std::swap(candidates[i], candidates[j]);
  }
  candidates.resize(n);
  return candidates;
}

ScenarioParams sample_scenario(const ScenarioRanges& ranges, const CityMap& map, Rng& rng) {
  ScenarioParams p;
  p.num_uavs = int(rng.uniform_int(ranges.uavs_min, ranges.uavs_max));
  p.num_devices = int(rng.uniform_int(ranges.devices_min, ranges.devices_max));
  p.flying_time = int(rng.uniform_int(ranges.flying_time_min, ranges.flying_time_max));
  p.data_init.resize(p.num_devices);
  for (double& d : p.data_init) d = rng.uniform(ranges.data_min, ranges.data_max);

  p.starts = sample_cells(map.start_cells(), p.num_uavs, rng, "UAV starts");

  std::vector<Cell> open;  // devices go anywhere without a building, NFZ included
  for (int y = 0; y < map.size(); ++y)
    for (int x = 0; x < map.size(); ++x)
      if (!map.is_building(x, y)) open.push_back({x, y});
  p.devices = sample_cells(std::move(open), p.num_devices, rng, "devices");
  return p;
}

Policy random_policy() {
  return [](const Observation&, int, Rng& rng) {
    return Action(rng.uniform_int(0, kNumActions - 1));
  };
}

Policy greedy_policy(const QNetwork& net) {
  return [&net](const Observation& obs, int, Rng&) { return Action(greedy_action(net, obs)); };
}

Policy softmax_policy(const QNetwork& net, double temperature) {
  return [&net, temperature](const Observation& obs, int, Rng& rng) {
    return Action(softmax_action(net, obs, temperature, rng));
  };
}

EpisodeResult run_episode(const CityMap& map, const LosTable& los, const ScenarioParams& scenario,
                          const EpisodeConfig& config, const Policy& policy, Rng& rng,
                          Learner* learner) {
  config.obs.validate(map.size());

  EpisodeResult res;
  res.scenario = scenario;
  res.agent_reward.assign(scenario.num_uavs, 0.0);

  std::vector<UavState> uavs(scenario.num_uavs);
  for (int i = 0; i < scenario.num_uavs; ++i) {
    uavs[i].position = scenario.starts[i];
    uavs[i].start_position = scenario.starts[i];
    uavs[i].flying_time = scenario.flying_time;
  }
  std::vector<DeviceState> devices(scenario.num_devices);
  for (int k = 0; k < scenario.num_devices; ++k) {
    devices[k].position = scenario.devices[k];
    devices[k].remaining = scenario.data_init[k];
    devices[k].initial = scenario.data_init[k];
    devices[k].collected_by.assign(scenario.num_uavs, 0.0);
  }
  res.total_initial = std::accumulate(scenario.data_init.begin(), scenario.data_init.end(), 0.0);

  struct Acted {
    int uav;
    Observation obs;
    Action selected;
    bool rejected;
    bool crashed;
    bool landed;
  };

  int global_slot = 0;
  for (int t = 0;; ++t) {
    bool any = false;
    for (const UavState& u : uavs) any = any || u.operational;
    if (!any) break;

    std::vector<Acted> acted;
    std::vector<UavCommPose> poses;
    for (int i = 0; i < scenario.num_uavs; ++i) {
      if (!uavs[i].operational) continue;
      const Cell from = uavs[i].position;
      Observation obs = observe(map, devices, uavs, i, config.obs);
      const Action selected = policy(obs, i, rng);
      const SafeAction safe = safe_action(uavs, i, selected, map);
      const StepOutcome out = step_agent(uavs[i], safe.action, map);

      acted.push_back({i, std::move(obs), selected, safe.rejected, out.crashed_now, out.landed_now});
      poses.push_back({i, from, uavs[i].position});

      StepRecord rec;
      rec.slot = t;
      rec.uav = i;
      rec.from = from;
      rec.to = uavs[i].position;
      rec.selected = selected;
      rec.executed = safe.action;
      rec.rejected = safe.rejected;
      rec.crashed = out.crashed_now;
      rec.landed = out.landed_now;
      res.steps.push_back(rec);
    }

    double before = 0.0;
    for (const DeviceState& d : devices) before += d.remaining;
    for (int n = 0; n < config.channel.lambda; ++n) {
      schedule_slot(poses, n, global_slot, devices, los, config.channel, map, rng, res.comm);
      ++global_slot;
    }
    double after = 0.0;
    for (const DeviceState& d : devices) after += d.remaining;
    const double collected = before - after;
    res.total_collected += collected;

    for (std::size_t a = 0; a < acted.size(); ++a) {
      const double r =
          step_reward(collected, acted[a].rejected, acted[a].crashed, config.reward);
      res.steps[res.steps.size() - acted.size() + a].reward = r;
      res.agent_reward[acted[a].uav] += r;
    }

    if (learner) {
      const NetConfig& nc = learner->online().config();
      for (std::size_t a = 0; a < acted.size(); ++a) {
        const int i = acted[a].uav;
        Experience e;
        e.obs = flatten_observation(acted[a].obs, nc);
        e.next_obs = flatten_observation(observe(map, devices, uavs, i, config.obs), nc);
        e.action = int(acted[a].selected);
        e.reward = float(res.steps[res.steps.size() - acted.size() + a].reward);
        e.terminal = acted[a].crashed || acted[a].landed;
        learner->push(std::move(e));
        learner->train_step(rng);
      }
    }
    ++res.slots;
  }

  res.uavs = std::move(uavs);
  res.devices = std::move(devices);
  return res;
}

static json cell_to_json(const Cell& c) { return json::array({c.x, c.y}); }
static Cell cell_from_json(const json& j) { return Cell{j.at(0).get<int>(), j.at(1).get<int>()}; }

std::string episode_to_json_text(const EpisodeResult& r) {
  json j;
  json sc;
  sc["num_uavs"] = r.scenario.num_uavs;
  sc["num_devices"] = r.scenario.num_devices;
  sc["flying_time"] = r.scenario.flying_time;
  sc["data_init"] = r.scenario.data_init;
  sc["starts"] = json::array();
  for (const Cell& c : r.scenario.starts) sc["starts"].push_back(cell_to_json(c));
  sc["devices"] = json::array();
  for (const Cell& c : r.scenario.devices) sc["devices"].push_back(cell_to_json(c));
  j["scenario"] = sc;

  j["steps"] = json::array();
  for (const StepRecord& s : r.steps) {
    json e;
    e["slot"] = s.slot;
    e["uav"] = s.uav;
    e["from"] = cell_to_json(s.from);
    e["to"] = cell_to_json(s.to);
    e["selected"] = action_name(s.selected);
    e["executed"] = action_name(s.executed);
    e["rejected"] = s.rejected;
    e["crashed"] = s.crashed;
    e["landed"] = s.landed;
    e["reward"] = s.reward;
    j["steps"].push_back(e);
  }

  j["comm"] = json::array();
  for (const CommEntry& c : r.comm)
    j["comm"].push_back(json{{"slot", c.slot},
                             {"uav", c.uav},
                             {"device", c.device},
                             {"rate", c.rate},
                             {"los", c.los}});

  j["uavs"] = json::array();
  for (const UavState& u : r.uavs)
    j["uavs"].push_back(json{{"position", cell_to_json(u.position)},
                             {"landed", u.landed()},
                             {"crashed", u.crashed},
                             {"flying_time", u.flying_time}});

  j["devices"] = json::array();
  for (const DeviceState& d : r.devices)
    j["devices"].push_back(json{{"position", cell_to_json(d.position)},
                                {"remaining", d.remaining},
                                {"initial", d.initial},
                                {"collected_by", d.collected_by}});

  j["slots"] = r.slots;
  j["total_initial"] = r.total_initial;
  j["total_collected"] = r.total_collected;
  j["agent_reward"] = r.agent_reward;
  return j.dump(2);
}

static Action action_from_name(const std::string& name) {
  for (int a = 0; a < kNumActions; ++a)
    if (name == action_name(Action(a))) return Action(a);
  throw UsageError("unknown action name in episode file: " + name);
}

EpisodeResult episode_from_json_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw UsageError("episode file is not valid JSON");
  EpisodeResult r;
  const json& sc = j.at("scenario");
  r.scenario.num_uavs = sc.at("num_uavs").get<int>();
  r.scenario.num_devices = sc.at("num_devices").get<int>();
  r.scenario.flying_time = sc.at("flying_time").get<int>();
  r.scenario.data_init = sc.at("data_init").get<std::vector<double>>();
  for (const json& c : sc.at("starts")) r.scenario.starts.push_back(cell_from_json(c));
  for (const json& c : sc.at("devices")) r.scenario.devices.push_back(cell_from_json(c));

  for (const json& e : j.at("steps")) {
    StepRecord s;
    s.slot = e.at("slot").get<int>();
    s.uav = e.at("uav").get<int>();
    s.from = cell_from_json(e.at("from"));
    s.to = cell_from_json(e.at("to"));
    s.selected = action_from_name(e.at("selected").get<std::string>());
    s.executed = action_from_name(e.at("executed").get<std::string>());
    s.rejected = e.at("rejected").get<bool>();
    s.crashed = e.at("crashed").get<bool>();
    s.landed = e.at("landed").get<bool>();
    s.reward = e.at("reward").get<double>();
    r.steps.push_back(s);
  }
  for (const json& c : j.at("comm")) {
    CommEntry e;
    e.slot = c.at("slot").get<int>();
    e.uav = c.at("uav").get<int>();
    e.device = c.at("device").get<int>();
    e.rate = c.at("rate").get<double>();
    e.los = c.at("los").get<bool>();
    r.comm.push_back(e);
  }
  for (const json& u : j.at("uavs")) {
    UavState s;
    s.position = cell_from_json(u.at("position"));
    s.crashed = u.at("crashed").get<bool>();
    s.airborne = !u.at("landed").get<bool>();
    s.operational = false;
    s.flying_time = u.at("flying_time").get<int>();
    if (r.uavs.size() < r.scenario.starts.size())
      s.start_position = r.scenario.starts[r.uavs.size()];
    r.uavs.push_back(s);
  }
  for (const json& d : j.at("devices")) {
    DeviceState s;
    s.position = cell_from_json(d.at("position"));
    s.remaining = d.at("remaining").get<double>();
    s.initial = d.at("initial").get<double>();
    s.collected_by = d.at("collected_by").get<std::vector<double>>();
    r.devices.push_back(s);
  }
  r.slots = j.at("slots").get<int>();
  r.total_initial = j.at("total_initial").get<double>();
  r.total_collected = j.at("total_collected").get<double>();
  r.agent_reward = j.at("agent_reward").get<std::vector<double>>();
  return r;
}

}  // namespace aerharvest
