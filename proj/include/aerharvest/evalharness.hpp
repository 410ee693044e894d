#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aerharvest/scenario.hpp"

namespace aerharvest {

struct EpisodeMetrics {
  bool successful_landing = false;  // every agent landed, none crashed
  double collection_ratio = 0.0;
  double collection_ratio_and_landed = 0.0;
  int steps = 0;  // mission slots
  std::vector<bool> crashed;
};

EpisodeMetrics compute_metrics(const EpisodeResult& result);

struct EvalRow {
  int episode = 0;
  std::uint64_t seed = 0;
  int num_uavs = 0;
  int num_devices = 0;
  double total_data = 0.0;
  int flying_time = 0;
  bool landed = false;
  double collection_ratio = 0.0;
  double product = 0.0;
};

struct EvalSummary {
  int episodes = 0;
  double landing_rate = 0.0;
  double mean_collection_ratio = 0.0;
  double mean_product = 0.0;
};

EvalSummary summarize(const std::vector<EvalRow>& rows);

// Fully random scenarios under the greedy policy; episodes are independent
// and run in parallel under AERHARVEST_THREADS, each on its own split rng
// stream, so results do not depend on the thread count.
std::vector<EvalRow> monte_carlo(const QNetwork& net, const CityMap& map, const LosTable& los,
                                 const ScenarioRanges& ranges, const EpisodeConfig& config,
                                 int episodes, const Rng& master);

void write_eval_csv(const std::vector<EvalRow>& rows, const std::string& path);

enum class SweepAxis { kNumUavs, kNumDevices, kDataPerDevice, kFlyingTime };

SweepAxis sweep_axis_from_name(const std::string& name);
const char* sweep_axis_name(SweepAxis axis);

struct SweepPoint {
  double axis_value = 0.0;  // pinned value, or bin midpoint in bins mode
  double mean_product = 0.0;
  int count = 0;
};

// One point per value: the axis parameter is pinned (num_uavs=3 etc.) while
// everything else is randomized per episode.
std::vector<SweepPoint> sweep_values(const QNetwork& net, const CityMap& map, const LosTable& los,
                                     const ScenarioRanges& ranges, const EpisodeConfig& config,
                                     SweepAxis axis, const std::vector<double>& values,
                                     int episodes_per_point, const Rng& master);

// Bins partition the configured range of the axis into equal subranges; the
// axis parameter is drawn uniformly inside each bin.
std::vector<SweepPoint> sweep_bins(const QNetwork& net, const CityMap& map, const LosTable& los,
                                   const ScenarioRanges& ranges, const EpisodeConfig& config,
                                   SweepAxis axis, int bins, int episodes_per_point,
                                   const Rng& master);

void write_sweep_csv(const std::vector<SweepPoint>& points, const std::string& path);

}  // namespace aerharvest
