#include "aerharvest/trainer.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>

#include "json.hpp"

#include "aerharvest/evalharness.hpp"
#include "aerharvest/sha256.hpp"
#include "aerharvest/threads.hpp"

namespace aerharvest {

namespace {

// Deterministic master-seed domains for the independent streams of one run.
constexpr std::uint64_t kDomainInit = 0;
constexpr std::uint64_t kDomainTrain = 1;
constexpr std::uint64_t kDomainEval = 2;

void write_manifest(const RunConfig& config, const CityMap& map, std::int64_t steps,
                    int episodes) {
  nlohmann::json j;
  j["tool"] = "aerharvest";
  j["format_version"] = 1;
  j["config"] = nlohmann::json::parse(config.to_json_text());
  j["seed"] = config.seed;
  j["map_hash"] = hex_digest(map.hash());
  j["threads"] = thread_count();
  j["steps_trained"] = steps;
  j["episodes"] = episodes;
  std::ofstream f(std::filesystem::path(config.out_dir) / "manifest.json");
  if (!f) throw std::runtime_error("cannot write manifest in " + config.out_dir);
  f << j.dump(2) << '\n';
}

}  // namespace

TrainResult train(const RunConfig& config, const CityMap& map, const LosTable& los,
                  std::ostream* progress) {
  std::filesystem::create_directories(config.out_dir);
  write_manifest(config, map, 0, 0);

  const Rng master(config.seed);
  const EpisodeConfig ep_config = episode_config_for(config, map);
  const NetConfig net_config = net_config_for(config, map);
  Learner learner(net_config, config.hyper, master.split(kDomainInit));

  std::ofstream log(std::filesystem::path(config.out_dir) / "training_log.csv");
  if (!log) throw std::runtime_error("cannot write training log in " + config.out_dir);
  log << "episode,steps,mean_loss,episode_reward,slots,collection_ratio,"
         "eval_landed,eval_collection_ratio,eval_product\n";
  log << std::setprecision(17);

  const std::string model_path =
      (std::filesystem::path(config.out_dir) / "model.ahnet").string();

  TrainResult out;
  std::int64_t next_checkpoint = config.hyper.checkpoint_interval;
  int eval_count = 0;
  double last_eval_product = 0.0;

  for (int episode = 0; learner.steps_trained() < config.hyper.max_steps; ++episode) {
    Rng rng = master.split(kDomainTrain, std::uint64_t(episode));
    const ScenarioParams sc = sample_scenario(config.scenario, map, rng);
    const EpisodeResult res =
        run_episode(map, los, sc, ep_config, softmax_policy(learner.online(), config.hyper.temperature),
                    rng, &learner);
    const EpisodeMetrics m = compute_metrics(res);
    const double reward_sum =
        std::accumulate(res.agent_reward.begin(), res.agent_reward.end(), 0.0);
    const double mean_loss = learner.take_mean_loss();

    log << episode << ',' << learner.steps_trained() << ',' << mean_loss << ',' << reward_sum
        << ',' << res.slots << ',' << m.collection_ratio;

    if ((episode + 1) % 5 == 0) {
      Rng eval_rng = master.split(kDomainEval, std::uint64_t(eval_count++));
      const ScenarioParams esc = sample_scenario(config.scenario, map, eval_rng);
      const EpisodeResult eres =
          run_episode(map, los, esc, ep_config, greedy_policy(learner.online()), eval_rng);
      const EpisodeMetrics em = compute_metrics(eres);
      last_eval_product = em.collection_ratio_and_landed;
      log << ',' << (em.successful_landing ? 1 : 0) << ',' << em.collection_ratio << ','
          << em.collection_ratio_and_landed << '\n';
      if (progress)
        *progress << "episode=" << episode << " steps=" << learner.steps_trained()
                  << " loss=" << mean_loss << " eval_landed=" << em.successful_landing
                  << " eval_collection=" << em.collection_ratio
                  << " eval_product=" << em.collection_ratio_and_landed << std::endl;
    } else {
      log << ",,,\n";
      if (progress)
        *progress << "episode=" << episode << " steps=" << learner.steps_trained()
                  << " loss=" << mean_loss << std::endl;
    }

    if (learner.steps_trained() >= next_checkpoint) {
      learner.online().save((std::filesystem::path(config.out_dir) /
                             ("checkpoint_" + std::to_string(learner.steps_trained()) + ".ahnet"))
                                .string());
      next_checkpoint += config.hyper.checkpoint_interval;
    }
    out.episodes = episode + 1;
  }

  out.steps = learner.steps_trained();
  out.model_path = model_path;
  out.final_eval_product = last_eval_product;
  learner.online().save(model_path);
  write_manifest(config, map, out.steps, out.episodes);
  return out;
}

}  // namespace aerharvest
