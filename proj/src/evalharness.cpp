#include "aerharvest/evalharness.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include "aerharvest/errors.hpp"
#include "aerharvest/threads.hpp"

namespace aerharvest {

EpisodeMetrics compute_metrics(const EpisodeResult& result) {
  EpisodeMetrics m;
  m.successful_landing = true;
  for (const UavState& u : result.uavs) {
    m.crashed.push_back(u.crashed);
    if (!u.landed()) m.successful_landing = false;
  }
  m.collection_ratio =
      result.total_initial > 0.0 ? result.total_collected / result.total_initial : 1.0;
  m.collection_ratio_and_landed = m.successful_landing ? m.collection_ratio : 0.0;
  m.steps = result.slots;
  return m;
}

EvalSummary summarize(const std::vector<EvalRow>& rows) {
  EvalSummary s;
  s.episodes = int(rows.size());
  for (const EvalRow& r : rows) {
    s.landing_rate += r.landed ? 1.0 : 0.0;
    s.mean_collection_ratio += r.collection_ratio;
    s.mean_product += r.product;
  }
  if (s.episodes > 0) {
    s.landing_rate /= s.episodes;
    s.mean_collection_ratio /= s.episodes;
    s.mean_product /= s.episodes;
  }
  return s;
}

static EvalRow eval_one(const QNetwork& net, const CityMap& map, const LosTable& los,
                        const ScenarioRanges& ranges, const EpisodeConfig& config, int episode,
                        Rng rng) {
  const ScenarioParams sc = sample_scenario(ranges, map, rng);
  const EpisodeResult res = run_episode(map, los, sc, config, greedy_policy(net), rng);
  const EpisodeMetrics m = compute_metrics(res);
  EvalRow row;
  row.episode = episode;
  row.seed = rng.seed();
  row.num_uavs = sc.num_uavs;
  row.num_devices = sc.num_devices;
  row.total_data = std::accumulate(sc.data_init.begin(), sc.data_init.end(), 0.0);
  row.flying_time = sc.flying_time;
  row.landed = m.successful_landing;
  row.collection_ratio = m.collection_ratio;
  row.product = m.collection_ratio_and_landed;
  return row;
}

std::vector<EvalRow> monte_carlo(const QNetwork& net, const CityMap& map, const LosTable& los,
                                 const ScenarioRanges& ranges, const EpisodeConfig& config,
                                 int episodes, const Rng& master) {
  std::vector<EvalRow> rows(episodes);
#pragma omp parallel for schedule(dynamic) if (threads_enabled())
  for (int e = 0; e < episodes; ++e)
    rows[e] = eval_one(net, map, los, ranges, config, e, master.split(0, std::uint64_t(e)));
  return rows;
}

void write_eval_csv(const std::vector<EvalRow>& rows, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "episode,seed,num_uavs,num_devices,total_data,flying_time,landed,collection_ratio,product\n";
  const EvalSummary s = summarize(rows);
  for (const EvalRow& r : rows)
    f << r.episode << ',' << r.seed << ',' << r.num_uavs << ',' << r.num_devices << ','
      << r.total_data << ',' << r.flying_time << ',' << (r.landed ? 1 : 0) << ','
      << r.collection_ratio << ',' << r.product << '\n';
  f << "summary,," << s.episodes << ",,,," << s.landing_rate << ',' << s.mean_collection_ratio
    << ',' << s.mean_product << '\n';
  if (!f) throw std::runtime_error("failed writing " + path);
}

SweepAxis sweep_axis_from_name(const std::string& name) {
  if (name == "num_uavs") return SweepAxis::kNumUavs;
  if (name == "num_devices") return SweepAxis::kNumDevices;
  if (name == "data_per_device") return SweepAxis::kDataPerDevice;
  if (name == "flying_time") return SweepAxis::kFlyingTime;
  throw UsageError("unknown sweep axis: " + name +
                   " (expected num_uavs|num_devices|data_per_device|flying_time)");
}

const char* sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kNumUavs: return "num_uavs";
    case SweepAxis::kNumDevices: return "num_devices";
    case SweepAxis::kDataPerDevice: return "data_per_device";
    case SweepAxis::kFlyingTime: return "flying_time";
  }
  return "?";
}

static ScenarioRanges pin_axis(ScenarioRanges r, SweepAxis axis, double lo, double hi) {
  switch (axis) {
    case SweepAxis::kNumUavs:
      r.uavs_min = int(std::lround(lo));
      r.uavs_max = int(std::lround(hi));
      break;
    case SweepAxis::kNumDevices:
      r.devices_min = int(std::lround(lo));
      r.devices_max = int(std::lround(hi));
      break;
    case SweepAxis::kDataPerDevice:
      r.data_min = lo;
      r.data_max = hi;
      break;
    case SweepAxis::kFlyingTime:
      r.flying_time_min = int(std::lround(lo));
      r.flying_time_max = int(std::lround(hi));
      break;
  }
  return r;
}

static std::vector<SweepPoint> sweep_impl(const QNetwork& net, const CityMap& map,
                                          const LosTable& los, const ScenarioRanges& ranges,
                                          const EpisodeConfig& config, SweepAxis axis,
                                          const std::vector<std::pair<double, double>>& bins,
                                          int episodes_per_point, const Rng& master) {
  std::vector<SweepPoint> points(bins.size());
  for (std::size_t p = 0; p < bins.size(); ++p) {
    const ScenarioRanges pinned = pin_axis(ranges, axis, bins[p].first, bins[p].second);
    std::vector<double> products(episodes_per_point);
#pragma omp parallel for schedule(dynamic) if (threads_enabled())
    for (int e = 0; e < episodes_per_point; ++e) {
      Rng rng = master.split(p + 1, std::uint64_t(e));
      const ScenarioParams sc = sample_scenario(pinned, map, rng);
      const EpisodeResult res = run_episode(map, los, sc, config, greedy_policy(net), rng);
      products[e] = compute_metrics(res).collection_ratio_and_landed;
    }
    SweepPoint& pt = points[p];
    pt.axis_value = 0.5 * (bins[p].first + bins[p].second);
    pt.count = episodes_per_point;
    for (double v : products) pt.mean_product += v;
    if (episodes_per_point > 0) pt.mean_product /= episodes_per_point;
  }
  return points;
}

std::vector<SweepPoint> sweep_values(const QNetwork& net, const CityMap& map, const LosTable& los,
                                     const ScenarioRanges& ranges, const EpisodeConfig& config,
                                     SweepAxis axis, const std::vector<double>& values,
                                     int episodes_per_point, const Rng& master) {
  std::vector<std::pair<double, double>> bins;
  for (double v : values) bins.emplace_back(v, v);
  return sweep_impl(net, map, los, ranges, config, axis, bins, episodes_per_point, master);
}

std::vector<SweepPoint> sweep_bins(const QNetwork& net, const CityMap& map, const LosTable& los,
                                   const ScenarioRanges& ranges, const EpisodeConfig& config,
                                   SweepAxis axis, int bins, int episodes_per_point,
                                   const Rng& master) {
  if (bins < 1) throw UsageError("sweep needs at least one bin");
  double lo = 0.0, hi = 0.0;
  switch (axis) {
    case SweepAxis::kNumUavs: lo = ranges.uavs_min, hi = ranges.uavs_max; break;
    case SweepAxis::kNumDevices: lo = ranges.devices_min, hi = ranges.devices_max; break;
    case SweepAxis::kDataPerDevice: lo = ranges.data_min, hi = ranges.data_max; break;
    case SweepAxis::kFlyingTime: lo = ranges.flying_time_min, hi = ranges.flying_time_max; break;
  }
  std::vector<std::pair<double, double>> spans;
  for (int b = 0; b < bins; ++b)
    spans.emplace_back(lo + (hi - lo) * b / bins, lo + (hi - lo) * (b + 1) / bins);
  return sweep_impl(net, map, los, ranges, config, axis, spans, episodes_per_point, master);
}

void write_sweep_csv(const std::vector<SweepPoint>& points, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "axis_value_bin,mean_product,count\n";
  for (const SweepPoint& p : points)
    f << p.axis_value << ',' << p.mean_product << ',' << p.count << '\n';
  if (!f) throw std::runtime_error("failed writing " + path);
}

}  // namespace aerharvest
