#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "aerharvest/config.hpp"
#include "aerharvest/errors.hpp"
#include "aerharvest/evalharness.hpp"
#include "aerharvest/render.hpp"
#include "aerharvest/threads.hpp"
#include "aerharvest/trainer.hpp"

namespace ah = aerharvest;

namespace {

// LoS cache next to the map file unless overridden: maps/foo.json -> maps/foo.los
std::string default_cache_path(const std::string& map_path) {
  std::filesystem::path p(map_path);
  p.replace_extension(".los");
  return p.string();
}

// Load the cache when it matches the map, otherwise (re)compute and save.
ah::LosTable shadow_table(const ah::CityMap& map, const std::string& cache_path, bool* cached) {
  if (std::filesystem::exists(cache_path)) {
    try {
      ah::LosTable t = ah::LosTable::load(cache_path, map);
      if (cached) *cached = true;
      return t;
    } catch (const ah::UsageError&) {
      // stale or foreign cache: recompute below
    }
  }
  ah::LosTable t = ah::thread_count() > 1 ? ah::LosTable::compute(map)
                                          : ah::LosTable::compute_serial(map);
  t.save(cache_path);
  if (cached) *cached = false;
  return t;
}

ah::RunConfig load_config(const std::string& config_path, const std::string& map_override,
                          std::uint64_t seed, bool seed_set, std::int64_t steps,
                          const std::string& out_override) {
  ah::RunConfig cfg = ah::RunConfig::load(config_path);
  if (!map_override.empty()) cfg.map_path = map_override;
  if (seed_set) cfg.seed = seed;
  if (steps >= 0) cfg.hyper.max_steps = steps;
  if (!out_override.empty()) cfg.out_dir = out_override;
  cfg.validate();
  return cfg;
}

void dump_comm_trace(const ah::EpisodeResult& res, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "slot,uav,device,rate,los\n";
  for (const ah::CommEntry& e : res.comm)
    f << e.slot << ',' << e.uav << ',' << e.device << ',' << e.rate << ',' << (e.los ? 1 : 0)
      << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-UAV data harvesting simulator and DDQN trainer"};
  app.require_subcommand(1);

  std::string map_path, config_path, out_path, model_path, axis_name, values_csv, episode_path;
  std::string trace_path, save_episodes_dir;
  std::uint64_t seed = 1;
  std::int64_t steps = -1;
  int episodes = 1000, bins = 0, per_point = 500;
  bool seed_set = false;

  auto* shadow = app.add_subcommand("shadow", "precompute the pairwise LoS table for a map");
  shadow->add_option("--map", map_path, "map JSON file")->required();
  shadow->add_option("--out", out_path, "cache output path (default: alongside the map)");

  auto* train = app.add_subcommand("train", "train the DDQN policy");
  train->add_option("--config", config_path, "run config JSON")->required();
  train->add_option("--map", map_path, "override the config's map");
  train->add_option("--seed", seed, "override the config's seed")->each([&](const std::string&) {
    seed_set = true;
  });
  train->add_option("--steps", steps, "override the config's max training steps");
  train->add_option("--out", out_path, "override the config's output directory");

  auto* eval = app.add_subcommand("eval", "Monte-Carlo evaluation of a trained model");
  eval->add_option("--config", config_path, "run config JSON")->required();
  eval->add_option("--model", model_path, "model file")->required();
  eval->add_option("--map", map_path, "override the config's map");
  eval->add_option("--seed", seed, "override the config's seed")->each([&](const std::string&) {
    seed_set = true;
  });
  eval->add_option("--episodes", episodes, "number of random scenarios");
  eval->add_option("--out", out_path, "CSV output path")->required();
  eval->add_option("--trace", trace_path, "dump the first episode's comm log CSV here");
  eval->add_option("--save-episodes", save_episodes_dir, "dump per-episode JSON files here");

  auto* sweep = app.add_subcommand("sweep", "scenario-parameter sweep of a trained model");
  sweep->add_option("--config", config_path, "run config JSON")->required();
  sweep->add_option("--model", model_path, "model file")->required();
  sweep->add_option("--map", map_path, "override the config's map");
  sweep->add_option("--seed", seed, "override the config's seed")->each([&](const std::string&) {
    seed_set = true;
  });
  sweep->add_option("--axis", axis_name, "num_uavs|num_devices|data_per_device|flying_time")
      ->required();
  sweep->add_option("--values", values_csv, "comma-separated axis values to pin");
  sweep->add_option("--bins", bins, "bin the configured axis range instead");
  sweep->add_option("--episodes-per-point", per_point, "episodes per sweep point");
  sweep->add_option("--out", out_path, "CSV output path")->required();

  auto* render = app.add_subcommand("render", "draw a stored episode trajectory as PNG");
  render->add_option("--map", map_path, "map JSON file")->required();
  render->add_option("--episode", episode_path, "episode JSON file")->required();
  render->add_option("--out", out_path, "PNG output path")->required();

  try {
    app.parse(argc, argv);

    if (shadow->parsed()) {
      const ah::CityMap map = ah::CityMap::load(map_path);
      const std::string cache = out_path.empty() ? default_cache_path(map_path) : out_path;
      bool cached = false;
      shadow_table(map, cache, &cached);
      std::cout << (cached ? "cached" : "computed") << ' ' << cache << '\n';
      return 0;
    }

    if (train->parsed()) {
      const ah::RunConfig cfg =
          load_config(config_path, map_path, seed, seed_set, steps, out_path);
      const ah::CityMap map = ah::CityMap::load(cfg.map_path);
      const ah::LosTable los = shadow_table(map, default_cache_path(cfg.map_path), nullptr);
      const ah::TrainResult res = ah::train(cfg, map, los, &std::cout);
      std::cout << "trained steps=" << res.steps << " episodes=" << res.episodes
                << " model=" << res.model_path << '\n';
      return 0;
    }

    if (eval->parsed()) {
      const ah::RunConfig cfg = load_config(config_path, map_path, seed, seed_set, -1, "");
      const ah::CityMap map = ah::CityMap::load(cfg.map_path);
      const ah::LosTable los = shadow_table(map, default_cache_path(cfg.map_path), nullptr);
      const ah::QNetwork net = ah::QNetwork::load(model_path);
      const ah::EpisodeConfig ep = ah::episode_config_for(cfg, map);
      const ah::Rng master(cfg.seed);

      const std::vector<ah::EvalRow> rows =
          ah::monte_carlo(net, map, los, cfg.scenario, ep, episodes, master);
      ah::write_eval_csv(rows, out_path);
      const ah::EvalSummary s = ah::summarize(rows);
      std::cout << "episodes=" << s.episodes << " landing_rate=" << s.landing_rate
                << " collection_ratio=" << s.mean_collection_ratio
                << " product=" << s.mean_product << '\n';

      if (!trace_path.empty() || !save_episodes_dir.empty()) {
        for (int e = 0; e < episodes; ++e) {
          ah::Rng rng = master.split(0, std::uint64_t(e));
          const ah::ScenarioParams sc = ah::sample_scenario(cfg.scenario, map, rng);
          const ah::EpisodeResult res =
              ah::run_episode(map, los, sc, ep, ah::greedy_policy(net), rng);
          if (e == 0 && !trace_path.empty()) dump_comm_trace(res, trace_path);
          if (!save_episodes_dir.empty()) {
            std::filesystem::create_directories(save_episodes_dir);
            std::ofstream f(std::filesystem::path(save_episodes_dir) /
                            ("episode_" + std::to_string(e) + ".json"));
            f << ah::episode_to_json_text(res) << '\n';
          } else if (e == 0) {
            break;
          }
        }
      }
      return 0;
    }

    if (sweep->parsed()) {
      const ah::RunConfig cfg = load_config(config_path, map_path, seed, seed_set, -1, "");
      const ah::CityMap map = ah::CityMap::load(cfg.map_path);
      const ah::LosTable los = shadow_table(map, default_cache_path(cfg.map_path), nullptr);
      const ah::QNetwork net = ah::QNetwork::load(model_path);
      const ah::EpisodeConfig ep = ah::episode_config_for(cfg, map);
      const ah::SweepAxis axis = ah::sweep_axis_from_name(axis_name);
      const ah::Rng master(cfg.seed);

      std::vector<ah::SweepPoint> points;
      if (!values_csv.empty()) {
        std::vector<double> values;
        std::stringstream ss(values_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) values.push_back(std::stod(tok));
        points = ah::sweep_values(net, map, los, cfg.scenario, ep, axis, values, per_point, master);
      } else if (bins > 0) {
        points = ah::sweep_bins(net, map, los, cfg.scenario, ep, axis, bins, per_point, master);
      } else {
        throw ah::UsageError("sweep needs --values or --bins");
      }
      ah::write_sweep_csv(points, out_path);
      std::cout << "sweep points=" << points.size() << " out=" << out_path << '\n';
      return 0;
    }

    if (render->parsed()) {
      const ah::CityMap map = ah::CityMap::load(map_path);
      std::ifstream f(episode_path);
      if (!f) throw ah::UsageError("cannot open episode file: " + episode_path);
      std::ostringstream ss;
      ss << f.rdbuf();
      const ah::EpisodeResult res = ah::episode_from_json_text(ss.str());
      ah::render_trajectory(res, map, out_path);
      std::cout << "rendered " << out_path << '\n';
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const ah::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
