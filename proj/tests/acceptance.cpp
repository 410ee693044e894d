// Acceptance gate. Runs the eleven release criteria in order and prints one
// PASS/FAIL/SKIP line each; exits nonzero if any criterion fails. Individual
// criteria can be selected by number on the command line.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "aerharvest/config.hpp"
#include "aerharvest/evalharness.hpp"
#include "aerharvest/learner.hpp"
#include "aerharvest/net.hpp"
#include "aerharvest/scenario.hpp"
#include "aerharvest/threads.hpp"
#include "aerharvest/trainer.hpp"

using namespace aerharvest;

namespace {

// Pinned tolerances and budgets.
constexpr int kC1Episodes = 1000;
constexpr double kC1TimeLimitS = 300.0;    // single-threaded wall clock
constexpr int kC2Fixtures = 100;           // exact equality, no tolerance
constexpr int kC3Maps = 50;                // exact equality, no tolerance
constexpr int kC4Fixtures = 10000;         // exact equality, no tolerance
constexpr int kC5Episodes = 1000;
constexpr double kC5RelTol = 1e-9;
constexpr int kC6Probes = 250;             // >= 200 required
constexpr double kC6RelTol = 1e-4;
constexpr int kC7Updates = 100;
constexpr double kC7StepRelTol = 1e-13;    // machine precision per update
constexpr double kC7TotalRelTol = 1e-12;
constexpr double kC8ProductBar = 0.90;
constexpr int kC8EvalEpisodes = 100;
constexpr std::int64_t kC8EvalEverySteps = 10000;
constexpr double kC8TimeLimitS = 7200.0;
constexpr double kC9TolPp = 5.0;           // percentage points per metric
constexpr int kC9Episodes = 1000;
constexpr int kC10Batches = 10000;
constexpr std::int64_t kC11Steps = 5000;

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void report_skip(int criterion, const std::string& detail) {
  std::printf("criterion %2d: SKIP  %s\n", criterion, detail.c_str());
  std::fflush(stdout);
}

std::string src(const std::string& rel) { return std::string(AH_SOURCE_DIR) + "/" + rel; }

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// Random city map, rows listed north first; the south row is all landing so
// every fleet size has distinct start cells.
CityMap random_map(int m, double tall, double small, double nfz, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::string> rows;
  for (int r = 0; r < m; ++r) {
    std::string row;
    for (int x = 0; x < m; ++x) {
      if (r == m - 1) {
        row.push_back('L');
        continue;
      }
      const double u = rng.uniform();
      if (u < tall)
        row.push_back('T');
      else if (u < tall + small)
        row.push_back('S');
      else if (u < tall + small + nfz)
        row.push_back('N');
      else
        row.push_back('.');
    }
    rows.push_back(row);
  }
  nlohmann::json j;
  j["name"] = "random" + std::to_string(seed);
  j["cell_size"] = 10.0;
  j["uav_altitude"] = 10.0;
  j["cells"] = rows;
  return CityMap::from_json_text(j.dump());
}

LosTable los_for(const CityMap& map, const std::string& cache_path) {
  if (!cache_path.empty()) {
    try {
      return LosTable::load(cache_path, map);
    } catch (...) {
    }
  }
  return LosTable::compute(map);
}

// ---------------------------------------------------------------------------
// criterion 1: random-policy episodes on the 32-cell city never violate the
// mobility constraints and never land outside a landing zone
// ---------------------------------------------------------------------------
void criterion1() {
  Stopwatch sw;
  const CityMap map = CityMap::load(src("maps/manhattan32.json"));
  const LosTable los = los_for(map, src("maps/manhattan32.los"));
  EpisodeConfig ec;
  normalize_power(ec.channel, map);
  const ScenarioRanges ranges;  // full-scale defaults
  const Rng master(1001);

  long violations = 0, bad_landings = 0, steps = 0;
  for (int e = 0; e < kC1Episodes; ++e) {
    Rng rng = master.split(1, std::uint64_t(e));
    const ScenarioParams sc = sample_scenario(ranges, map, rng);
    const EpisodeResult res = run_episode(map, los, sc, ec, random_policy(), rng);

    // replay the trajectory and check every slot against the constraint oracle
    std::vector<UavState> states(sc.num_uavs);
    for (int i = 0; i < sc.num_uavs; ++i) {
      states[i].position = sc.starts[i];
      states[i].flying_time = sc.flying_time;
    }
    int slot = 0;
    auto end_of_slot = [&] {
      violations += long(check_constraints(states, map).size());
    };
    for (const StepRecord& s : res.steps) {
      if (s.slot != slot) {
        end_of_slot();
        slot = s.slot;
      }
      ++steps;
      if (!map.in_bounds(s.to.x, s.to.y)) ++violations;
      else if (map.is_nfz_or_tall(s.to.x, s.to.y)) ++violations;
      if (s.executed == Action::kLand && !map.is_landing(s.from.x, s.from.y)) ++bad_landings;
      if (s.landed && !map.is_landing(s.to.x, s.to.y)) ++bad_landings;
      if (s.rejected && s.executed != Action::kHover) ++violations;
      if (s.to.x != s.from.x + action_dx(s.executed) ||
          s.to.y != s.from.y + action_dy(s.executed))
        ++violations;
      states[s.uav].position = s.to;
      if (s.crashed || s.landed) states[s.uav].operational = false;
    }
    end_of_slot();

    for (const UavState& u : res.uavs)
      if (u.operational || (!u.landed() && !u.crashed)) ++violations;
  }

  const double el = sw.seconds();
  report(1, violations == 0 && bad_landings == 0 && el <= kC1TimeLimitS,
         fmt("%d random-policy episodes on manhattan32, %ld agent steps: %ld constraint "
             "violations, %ld landings outside landing zones, %.1f s (limit %.0f s)",
             kC1Episodes, steps, violations, bad_landings, el, kC1TimeLimitS));
}

// ---------------------------------------------------------------------------
// criterion 2: every element of the centered local and global observation
// maps equals a from-definition recomputation, exactly
// ---------------------------------------------------------------------------
double world_value(const CityMap& map, const std::vector<DeviceState>& devices,
                   const std::vector<UavState>& uavs, int c, int x, int y) {
  if (!map.in_bounds(x, y)) return (c == 1 || c == 2) ? 1.0 : 0.0;
  switch (c) {
    case 0: return map.is_landing(x, y) ? 1.0 : 0.0;
    case 1: return map.is_nfz_or_tall(x, y) ? 1.0 : 0.0;
    case 2: return map.is_building(x, y) ? 1.0 : 0.0;
    case 3: {
      double v = 0.0;
      for (const DeviceState& d : devices)
        if (d.position.x == x && d.position.y == y) v = d.remaining;
      return v;
    }
    case 4: {
      double v = 0.0;
      for (const UavState& u : uavs)
        if (u.position.x == x && u.position.y == y) v = double(u.flying_time);
      return v;
    }
    default: {
      double v = 0.0;
      for (const UavState& u : uavs)
        if (u.position.x == x && u.position.y == y) v = u.operational ? 1.0 : 0.0;
      return v;
    }
  }
}

void criterion2() {
  Stopwatch sw;
  const int sizes[] = {8, 16, 32, 50};
  long checked = 0, mismatches = 0;
  int fixtures = 0;
  const Rng master(2002);

  for (int f = 0; f < kC2Fixtures; ++f) {
    const int m = sizes[f % 4];
    const CityMap map = random_map(m, 0.1, 0.1, 0.08, 7000 + std::uint64_t(f));
    Rng rng = master.split(2, std::uint64_t(f));

    ObsConfig obs;
    obs.local_size = m == 8 ? 9 : 17;
    obs.global_pooling = m == 50 ? 5 : 3;
    obs.validate(m);

    std::vector<DeviceState> devices(rng.uniform_int(0, 8));
    for (DeviceState& d : devices) {
      d.position = {int(rng.uniform_int(0, m - 1)), int(rng.uniform_int(0, m - 1))};
      d.remaining = rng.uniform(0.0, 25.0);
      d.initial = d.remaining;
    }
    std::vector<UavState> uavs(rng.uniform_int(1, 3));
    for (UavState& u : uavs) {
      u.position = {int(rng.uniform_int(0, m - 1)), int(rng.uniform_int(0, m - 1))};
      u.flying_time = int(rng.uniform_int(0, 150));
      u.operational = rng.uniform() < 0.8;
    }
    const int ego = int(rng.uniform_int(0, int(uavs.size()) - 1));
    const Observation o = observe(map, devices, uavs, ego, obs);
    ++fixtures;

    const Cell p = uavs[ego].position;
    const int l = obs.local_size;
    for (int c = 0; c < 6; ++c)
      for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j) {
          const double want =
              world_value(map, devices, uavs, c, p.x + j - (l - 1) / 2, p.y + i - (l - 1) / 2);
          ++checked;
          if (o.local.at(c, i, j) != want) ++mismatches;
        }

    const int g = obs.global_pooling;
    const int gbar = obs.global_size(m);
    for (int c = 0; c < 6; ++c)
      for (int bi = 0; bi < gbar; ++bi)
        for (int bj = 0; bj < gbar; ++bj) {
          double sum = 0.0;
          for (int di = 0; di < g; ++di)
            for (int dj = 0; dj < g; ++dj) {
              const int ci = bi * g + di, cj = bj * g + dj;
              sum += world_value(map, devices, uavs, c, p.x + cj - (m - 1), p.y + ci - (m - 1));
            }
          const double want = sum * (1.0 / (g * g));
          ++checked;
          if (o.global_map.at(c, bi, bj) != want) ++mismatches;
        }

    ++checked;
    if (o.scalar_b != double(uavs[ego].flying_time)) ++mismatches;
  }

  report(2, mismatches == 0,
         fmt("%d observation fixtures over map sizes 8/16/32/50: %ld elements recomputed from "
             "the definition, %ld mismatches (exact compare), %.1f s",
             fixtures, checked, mismatches, sw.seconds()));
}

// ---------------------------------------------------------------------------
// criterion 3: the ray-traced LoS table equals a continuous segment-sampling
// oracle (step <= 0.25 cell) on every ordered cell pair of 50 random maps
// ---------------------------------------------------------------------------
bool sampled_los(const CityMap& map, int x0, int y0, int x1, int y1) {
  if (x0 == x1 && y0 == y1) return true;
  const std::int64_t dx = x1 - x0, dy = y1 - y0;
  const std::int64_t ax = dx < 0 ? -dx : dx, ay = dy < 0 ? -dy : dy;
  // sample count: a common multiple of 2|dx| and 2|dy| puts a sample on every
  // cell-boundary crossing; doubling until n >= 4*len caps the step at a
  // quarter cell
  std::int64_t n = ax == 0 ? 2 * ay : ay == 0 ? 2 * ax : std::lcm(2 * ax, 2 * ay);
  const double len = std::sqrt(double(dx * dx + dy * dy));
  while (double(n) < 4.0 * len) n *= 2;

  for (std::int64_t i = 0; i <= n; ++i) {
    // sample point times 2n, exact integers
    const std::int64_t px = 2 * (x0 * n + i * dx);
    const std::int64_t py = 2 * (y0 * n + i * dy);
    const std::int64_t cx0 = px / (2 * n), cy0 = py / (2 * n);
    for (std::int64_t cx = cx0 - 1; cx <= cx0 + 1; ++cx)
      for (std::int64_t cy = cy0 - 1; cy <= cy0 + 1; ++cy) {
        // the point lies in closed cell [cx-1/2, cx+1/2] x [cy-1/2, cy+1/2]
        const std::int64_t ex = px - 2 * cx * n, ey = py - 2 * cy * n;
        if (ex < -n || ex > n || ey < -n || ey > n) continue;
        if ((cx == x0 && cy == y0) || (cx == x1 && cy == y1)) continue;
        if (!map.in_bounds(int(cx), int(cy))) continue;
        if (map.is_building(int(cx), int(cy))) return false;
      }
  }
  return true;
}

void criterion3() {
  Stopwatch sw;
  long pairs = 0, mismatches = 0;
  for (int mi = 0; mi < kC3Maps; ++mi) {
    const CityMap map = random_map(16, 0.13, 0.12, 0.0, 3000 + std::uint64_t(mi));
    const LosTable table = LosTable::compute(map);
    const int m = map.size();
    for (int a = 0; a < m * m; ++a)
      for (int b = 0; b < m * m; ++b) {
        const Cell ca = map.cell_at(a), cb = map.cell_at(b);
        const bool want = sampled_los(map, ca.x, ca.y, cb.x, cb.y);
        ++pairs;
        if (table.los(a, b) != want) ++mismatches;
      }
  }
  report(3, mismatches == 0,
         fmt("%d random 16x16 maps, %ld ordered cell pairs vs segment-sampling oracle "
             "(step <= 0.25 cell): %ld mismatches, %.1f s",
             kC3Maps, pairs, mismatches, sw.seconds()));
}

// ---------------------------------------------------------------------------
// criterion 4: TDMA scheduling equals brute-force max-SNR selection and the
// throughput accounting law on random single-slot fixtures
// ---------------------------------------------------------------------------
void criterion4() {
  Stopwatch sw;
  std::vector<CityMap> maps;
  std::vector<LosTable> tables;
  for (int i = 0; i < 10; ++i) {
    maps.push_back(random_map(8, 0.15, 0.15, 0.0, 4000 + std::uint64_t(i)));
    tables.push_back(LosTable::compute(maps.back()));
  }

  const Rng master(4004);
  long mismatches = 0, fixtures = 0, served = 0;
  for (int f = 0; f < kC4Fixtures; ++f) {
    const CityMap& map = maps[f % maps.size()];
    const LosTable& table = tables[f % maps.size()];
    Rng setup = master.split(3, std::uint64_t(f));

    ChannelParams params;
    params.cell_edge_snr_db = 0.0;
    normalize_power(params, map);

    const int m = map.size();
    auto open_cell = [&] {
      while (true) {
        const Cell c{int(setup.uniform_int(0, m - 1)), int(setup.uniform_int(0, m - 1))};
        if (!map.is_building(c.x, c.y)) return c;
      }
    };

    const int nu = int(setup.uniform_int(1, 3));
    const int nd = int(setup.uniform_int(1, 6));
    std::vector<UavCommPose> poses(nu);
    for (int i = 0; i < nu; ++i) {
      poses[i].uav = i;
      poses[i].from = {int(setup.uniform_int(0, m - 1)), int(setup.uniform_int(0, m - 1))};
      poses[i].to = {int(setup.uniform_int(0, m - 1)), int(setup.uniform_int(0, m - 1))};
    }
    std::vector<DeviceState> devices(nd);
    for (DeviceState& d : devices) {
      d.position = open_cell();
      d.remaining = setup.uniform() < 0.4 ? 0.0 : setup.uniform(0.005, 2.0);
      d.initial = d.remaining;
      d.collected_by.assign(nu, 0.0);
    }
    const int offset = int(setup.uniform_int(0, params.lambda - 1));

    Rng comm_rng = master.split(4, std::uint64_t(f));
    Rng oracle_rng = comm_rng;  // identical stream for the reference

    std::vector<DeviceState> got = devices;
    CommLog log;
    schedule_slot(poses, offset, f, got, table, params, map, comm_rng, log);
    if (log.size() != std::size_t(nu)) {
      ++mismatches;
      continue;
    }

    // reference: per UAV in index order, draw per-device shadowing in device
    // order, select the strict maximum SNR among devices holding data, then
    // drain rate * delta_n capped at the remaining load
    std::vector<DeviceState> want = devices;
    for (int i = 0; i < nu; ++i) {
      const Vec3 pos = interpolate_position(poses[i].from, poses[i].to, offset, params, map);
      const Cell cell = nearest_cell(pos, map);
      int best = -1;
      double best_snr = 0.0;
      bool best_los = false;
      for (int k = 0; k < nd; ++k) {
        const bool los = table.los(cell, want[k].position);
        const double eta = oracle_rng.normal(0.0, params.shadow_sigma(los));
        if (want[k].remaining <= 0.0) continue;
        const double snr = link_snr(pos, device_position_m(want[k].position, map), los, params, eta);
        if (best < 0 || snr > best_snr) {
          best = k;
          best_snr = snr;
          best_los = los;
        }
      }
      const CommEntry& e = log[i];
      if (e.slot != f || e.uav != i) ++mismatches;
      if (best < 0) {
        if (e.device != -1 || e.rate != 0.0) ++mismatches;
        continue;
      }
      ++served;
      const double before = want[best].remaining;
      const double rate = effective_rate(max_rate(best_snr), before, params.delta_n());
      double after = before - rate * params.delta_n();
      if (after < 0.0) after = 0.0;
      want[best].remaining = after;
      want[best].collected_by[i] += rate * params.delta_n();
      if (e.device != best || e.rate != rate || e.los != best_los) ++mismatches;
    }

    for (int k = 0; k < nd; ++k) {
      if (got[k].remaining != want[k].remaining) ++mismatches;
      if (got[k].collected_by != want[k].collected_by) ++mismatches;
      if (got[k].remaining < 0.0) ++mismatches;  // throughput law: never negative
    }
    ++fixtures;
  }

  report(4, mismatches == 0,
         fmt("%ld single-slot fixtures (%ld scheduled transmissions) vs brute-force max-SNR "
             "reference: %ld mismatches (exact compare), %.1f s",
             fixtures, served, mismatches, sw.seconds()));
}

// ---------------------------------------------------------------------------
// criterion 5: data conservation over full episodes
// ---------------------------------------------------------------------------
void criterion5() {
  Stopwatch sw;
  const CityMap map = random_map(16, 0.12, 0.12, 0.05, 5005);
  const LosTable los = LosTable::compute(map);
  EpisodeConfig ec;
  ec.channel.cell_edge_snr_db = 0.0;
  normalize_power(ec.channel, map);
  ec.obs.local_size = 9;
  ec.obs.global_pooling = 3;

  ScenarioRanges ranges;
  ranges.devices_min = 1;
  ranges.devices_max = 8;
  ranges.data_min = 1.0;
  ranges.data_max = 10.0;
  ranges.flying_time_min = 10;
  ranges.flying_time_max = 30;

  const Rng master(5005);
  double worst = 0.0;
  for (int e = 0; e < kC5Episodes; ++e) {
    Rng rng = master.split(1, std::uint64_t(e));
    const ScenarioParams sc = sample_scenario(ranges, map, rng);
    const EpisodeResult res = run_episode(map, los, sc, ec, random_policy(), rng);

    double remaining = 0.0, by_uav = 0.0;
    for (const DeviceState& d : res.devices) {
      remaining += d.remaining;
      for (double c : d.collected_by) by_uav += c;
    }
    const double scale = std::max(1.0, res.total_initial);
    worst = std::max(worst, std::abs(res.total_initial - (remaining + by_uav)) / scale);
    worst = std::max(worst, std::abs(res.total_collected - by_uav) / scale);
  }

  report(5, worst <= kC5RelTol,
         fmt("%d random episodes: worst relative conservation error %.3g (tolerance %.0e), %.1f s",
             kC5Episodes, worst, kC5RelTol, sw.seconds()));
}

// ---------------------------------------------------------------------------
// criterion 6: analytic gradients vs central finite differences
// ---------------------------------------------------------------------------
void criterion6() {
  Stopwatch sw;
  NetConfig cfg;
  cfg.local_size = 5;
  cfg.global_size = 6;
  cfg.channels = 2;
  cfg.conv_filters = 3;
  cfg.conv_kernel = 3;
  cfg.conv_layers = 2;
  cfg.hidden = {10, 8};
  cfg.actions = 6;

  QNetwork net(cfg);
  Rng rng(6006);
  net.init(rng);

  const int batch = 4;
  std::vector<double> inputs(std::size_t(batch) * cfg.input_size());
  for (double& v : inputs) v = rng.uniform(-1.0, 1.0);
  std::vector<double> dq(std::size_t(batch) * cfg.actions);
  for (double& v : dq) v = rng.uniform(-1.0, 1.0);

  auto loss = [&] {
    std::vector<double> q(std::size_t(batch) * cfg.actions);
    net.forward_batch(inputs.data(), batch, q.data(), false);
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) s += dq[i] * q[i];
    return s;
  };

  NetWorkspace ws;
  std::vector<double> q(std::size_t(batch) * cfg.actions);
  net.forward_batch(inputs.data(), batch, q.data(), false, &ws);
  std::vector<double> grad;
  net.backward_batch(inputs.data(), dq.data(), ws, grad, false);

  const double h = 1e-6;
  double worst = 0.0;
  for (int probe = 0; probe < kC6Probes; ++probe) {
    const std::size_t i = rng.index(net.num_params());
    const double orig = net.params()[i];
    net.params()[i] = orig + h;
    const double up = loss();
    net.params()[i] = orig - h;
    const double down = loss();
    net.params()[i] = orig;
    const double fd = (up - down) / (2.0 * h);
    worst = std::max(worst, std::abs(grad[i] - fd) /
                                std::max({std::abs(grad[i]), std::abs(fd), 1e-6}));
  }

  report(6, worst <= kC6RelTol,
         fmt("%d parameters probed with central differences (%zu total): worst relative error "
             "%.3g (tolerance %.0e), %.1f s",
             kC6Probes, net.num_params(), worst, kC6RelTol, sw.seconds()));
}

// ---------------------------------------------------------------------------
// criterion 7: the soft target update contracts the gap by exactly (1 - tau)
// ---------------------------------------------------------------------------
void criterion7() {
  const std::size_t n = 20000;
  const double tau = 0.005;
  Rng rng(7007);
  std::vector<double> online(n), target(n);
  for (std::size_t i = 0; i < n; ++i) {
    online[i] = rng.uniform(-1.0, 1.0);
    target[i] = rng.uniform(-1.0, 1.0);
  }

  auto gap = [&] {
    double mx = 0.0;
    for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, std::abs(target[i] - online[i]));
    return mx;
  };

  const double d0 = gap();
  double prev = d0;
  double worst_step = 0.0;
  for (int k = 1; k <= kC7Updates; ++k) {
    soft_update(target, online, tau);
    const double d = gap();
    worst_step = std::max(worst_step, std::abs(d - (1.0 - tau) * prev) / prev);
    prev = d;
  }
  const double want_final = std::pow(1.0 - tau, double(kC7Updates)) * d0;
  const double total_err = std::abs(prev - want_final) / d0;

  report(7, worst_step <= kC7StepRelTol && total_err <= kC7TotalRelTol,
         fmt("%d updates, tau=%.3f: worst per-step deviation from (1-tau) contraction %.3g "
             "(tolerance %.0e), cumulative %.3g (tolerance %.0e)",
             kC7Updates, tau, worst_step, kC7StepRelTol, total_err, kC7TotalRelTol));
}

// ---------------------------------------------------------------------------
// criterion 8: the DDQN agent learns the tiny 8x8 task within the step budget
// ---------------------------------------------------------------------------
struct TinyRun {
  std::uint64_t seed = 0;
  bool success = false;
  std::int64_t steps = 0;
  double product = 0.0;
};

TinyRun train_tiny(const RunConfig& base, const CityMap& map, const LosTable& los,
                   std::uint64_t seed) {
  RunConfig cfg = base;
  cfg.seed = seed;
  const Rng master(cfg.seed);
  const EpisodeConfig ec = episode_config_for(cfg, map);
  Learner learner(net_config_for(cfg, map), cfg.hyper, master.split(0));

  TinyRun out;
  out.seed = seed;
  std::int64_t next_eval = kC8EvalEverySteps;
  int eval_idx = 0;
  for (int episode = 0; learner.steps_trained() < cfg.hyper.max_steps; ++episode) {
    Rng rng = master.split(1, std::uint64_t(episode));
    const ScenarioParams sc = sample_scenario(cfg.scenario, map, rng);
    run_episode(map, los, sc, ec,
                softmax_policy(learner.online(), cfg.hyper.temperature), rng, &learner);

    if (learner.steps_trained() >= next_eval ||
        learner.steps_trained() >= cfg.hyper.max_steps) {
      while (next_eval <= learner.steps_trained()) next_eval += kC8EvalEverySteps;
      const EvalSummary s = summarize(monte_carlo(learner.online(), map, los, cfg.scenario, ec,
                                                  kC8EvalEpisodes,
                                                  master.split(2, std::uint64_t(eval_idx++))));
      out.steps = learner.steps_trained();
      out.product = s.mean_product;
      if (s.mean_product >= kC8ProductBar) {
        out.success = true;
        break;
      }
    }
  }
  return out;
}

void criterion8() {
  Stopwatch sw;
  const RunConfig base = RunConfig::load(src("configs/tiny8.json"));
  const CityMap map = CityMap::load(src("maps/tiny8.json"));
  const LosTable los = los_for(map, src("maps/tiny8.los"));

  const std::uint64_t seeds[] = {1, 2, 3};
  std::vector<TinyRun> runs;
  int successes = 0;
  for (std::uint64_t seed : seeds) {
    if (successes >= 2) break;  // criterion already met
    runs.push_back(train_tiny(base, map, los, seed));
    if (runs.back().success) ++successes;
  }

  std::string per_seed;
  for (const TinyRun& r : runs)
    per_seed += fmt(" [seed %llu: product %.3f over %d scenarios at %lld steps]",
                    (unsigned long long)r.seed, r.product, kC8EvalEpisodes,
                    (long long)r.steps);
  const double el = sw.seconds();
  report(8, successes >= 2 && el <= kC8TimeLimitS,
         fmt("greedy mean product >= %.2f within %lld steps for %d of %zu seeds:%s, %.0f s "
             "(limit %.0f s)",
             kC8ProductBar, (long long)base.hyper.max_steps, successes,
             sizeof(seeds) / sizeof(seeds[0]), per_seed.c_str(), el, kC8TimeLimitS));
}

// ---------------------------------------------------------------------------
// criterion 9: full-scale reference performance (optional long job)
// ---------------------------------------------------------------------------
void criterion9() {
  const char* dir = std::getenv("AERHARVEST_TABLE_MODELS");
  if (!dir) {
    report_skip(9,
                "full-scale manhattan32/urban50 targets need multi-day training; run "
                "scripts/table_runs.sh and set AERHARVEST_TABLE_MODELS to its output directory "
                "to evaluate against the reference numbers (not part of the default suite)");
    return;
  }

  struct Target {
    const char* config;
    const char* map;
    const char* model;
    double landed_pct, ratio_pct, product_pct;
  };
  const Target targets[] = {
      {"configs/manhattan32.json", "maps/manhattan32.json", "manhattan32.ahnet", 99.4, 88.0, 87.5},
      {"configs/urban50.json", "maps/urban50.json", "urban50.ahnet", 98.8, 82.1, 81.1},
  };

  Stopwatch sw;
  bool pass = true;
  std::string detail;
  for (const Target& t : targets) {
    const RunConfig cfg = RunConfig::load(src(t.config));
    const CityMap map = CityMap::load(src(t.map));
    const LosTable los = los_for(map, src(std::string(t.map).substr(0, std::string(t.map).size() - 5) + ".los"));
    const QNetwork net = QNetwork::load(std::string(dir) + "/" + t.model);
    const EpisodeConfig ec = episode_config_for(cfg, map);
    const EvalSummary s =
        summarize(monte_carlo(net, map, los, cfg.scenario, ec, kC9Episodes, Rng(909)));
    const double landed = 100.0 * s.landing_rate;
    const double ratio = 100.0 * s.mean_collection_ratio;
    const double product = 100.0 * s.mean_product;
    const bool ok = std::abs(landed - t.landed_pct) <= kC9TolPp &&
                    std::abs(ratio - t.ratio_pct) <= kC9TolPp &&
                    std::abs(product - t.product_pct) <= kC9TolPp;
    pass = pass && ok;
    detail += fmt(" [%s: landed %.1f%% (ref %.1f), ratio %.1f%% (ref %.1f), product %.1f%% "
                  "(ref %.1f) -> %s]",
                  t.model, landed, t.landed_pct, ratio, t.ratio_pct, product, t.product_pct,
                  ok ? "ok" : "off");
  }
  report(9, pass,
         fmt("%d-episode evaluations within +-%.0f pp of the reference table:%s, %.0f s",
             kC9Episodes, kC9TolPp, detail.c_str(), sw.seconds()));
}

// ---------------------------------------------------------------------------
// criterion 10: combined experience replay sampling distribution
// ---------------------------------------------------------------------------
void criterion10() {
  const std::size_t n = 64;
  const int m = 8;
  ReplayMemory mem(n);
  Rng fill(1);
  for (int a = 0; a < int(n); ++a) {
    Experience e;
    e.obs = {float(a)};
    e.next_obs = {float(a)};
    e.action = a;
    mem.push(std::move(e));
  }

  Rng rng(1010);
  std::vector<long> count(n, 0);
  long latest_present = 0;
  for (int b = 0; b < kC10Batches; ++b) {
    const std::vector<std::size_t> idx = mem.sample_cer(m, rng);
    if (mem.at(idx[m - 1]).action == int(n) - 1) ++latest_present;
    for (int i = 0; i + 1 < m; ++i) ++count[idx[i]];
  }

  const double total = double(kC10Batches) * (m - 1);
  const double p = 1.0 / double(n);
  const double mean = total * p;
  const double sigma = std::sqrt(total * p * (1.0 - p));
  double worst = 0.0;
  for (long c : count) worst = std::max(worst, std::abs(double(c) - mean) / sigma);

  report(10, latest_present == kC10Batches && worst <= 3.0,
         fmt("%d minibatches of %d: latest transition present in %ld, uniform draws worst slot "
             "deviation %.2f sigma (limit 3)",
             kC10Batches, m, latest_present, worst));
}

// ---------------------------------------------------------------------------
// criterion 11: bitwise-reproducible training
// ---------------------------------------------------------------------------
std::string file_bytes(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) return "<missing " + p.string() + ">";
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void criterion11() {
  Stopwatch sw;
  RunConfig cfg = RunConfig::load(src("configs/tiny8.json"));
  cfg.hyper.max_steps = kC11Steps;
  const CityMap map = CityMap::load(src("maps/tiny8.json"));
  const LosTable los = los_for(map, src("maps/tiny8.los"));

  const std::filesystem::path dirs[] = {"acceptance_rep_a", "acceptance_rep_b"};
  for (const auto& d : dirs) {
    cfg.out_dir = d.string();
    (void)train(cfg, map, los, nullptr);
  }

  const std::string log_a = file_bytes(dirs[0] / "training_log.csv");
  const std::string log_b = file_bytes(dirs[1] / "training_log.csv");
  const std::string model_a = file_bytes(dirs[0] / "model.ahnet");
  const std::string model_b = file_bytes(dirs[1] / "model.ahnet");
  for (const auto& d : dirs) std::filesystem::remove_all(d);

  report(11, log_a == log_b && model_a == model_b && !log_a.empty(),
         fmt("two %lld-step runs, same seed and config, %d thread(s): training logs %s "
             "(%zu bytes), models %s (%zu bytes), %.0f s",
             (long long)kC11Steps, thread_count(),
             log_a == log_b ? "byte-identical" : "DIFFER", log_a.size(),
             model_a == model_b ? "byte-identical" : "DIFFER", model_a.size(), sw.seconds()));
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  auto want = [&](int c) { return selected.empty() || selected.count(c) > 0; };

  std::printf("acceptance suite, %d thread(s)\n", thread_count());
  if (want(1)) criterion1();
  if (want(2)) criterion2();
  if (want(3)) criterion3();
  if (want(4)) criterion4();
  if (want(5)) criterion5();
  if (want(6)) criterion6();
  if (want(7)) criterion7();
  if (want(8)) criterion8();
  if (want(9)) criterion9();
  if (want(10)) criterion10();
  if (want(11)) criterion11();

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all selected criteria passed\n");
  return 0;
}
