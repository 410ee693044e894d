// Timings for the kernels that have both a serial reference and an OpenMP
// path: the LoS table, the batched network passes, and Monte Carlo
// evaluation. Set AERHARVEST_THREADS to compare thread counts; parallel and
// serial results are checked for bitwise equality while timing.
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "aerharvest/config.hpp"
#include "aerharvest/evalharness.hpp"
#include "aerharvest/net.hpp"
#include "aerharvest/threads.hpp"
#include "aerharvest/world.hpp"

using namespace aerharvest;

namespace {

template <class F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

void report(const char* name, double serial_s, double parallel_s, bool identical) {
  std::printf("%-28s serial %8.3f ms   parallel %8.3f ms   speedup %5.2fx   identical %s\n", name,
              serial_s * 1e3, parallel_s * 1e3, serial_s / parallel_s, identical ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
  const std::string root = AH_SOURCE_DIR;
  const std::string map_path = argc > 1 ? argv[1] : root + "/maps/manhattan32.json";
  std::printf("threads: %d (AERHARVEST_THREADS)\n", thread_count());

  const CityMap map = CityMap::load(map_path);
  std::printf("map: %s (%dx%d)\n\n", map.name().c_str(), map.size(), map.size());

  // --- line-of-sight table -------------------------------------------------
  LosTable serial_table = LosTable::compute_serial(map);
  LosTable parallel_table = LosTable::compute(map);
  {
    const double ts = time_best_of(3, [&] { serial_table = LosTable::compute_serial(map); });
    const double tp = time_best_of(3, [&] { parallel_table = LosTable::compute(map); });
    report("los_table", ts, tp, serial_table == parallel_table);
  }

  // --- batched network passes ----------------------------------------------
  {
    NetConfig nc;  // full-scale 32-map geometry, independent of the map argument
    QNetwork net(nc);
    Rng rng(1);
    net.init(rng);

    const int batch = 128;
    std::vector<double> inputs(std::size_t(batch) * nc.input_size());
    for (double& v : inputs) v = rng.uniform(-1.0, 1.0);
    std::vector<double> dq(std::size_t(batch) * nc.actions);
    for (double& v : dq) v = rng.uniform(-1.0, 1.0);

    std::vector<double> q_s(dq.size()), q_p(dq.size());
    NetWorkspace ws_s, ws_p;
    const double fs =
        time_best_of(3, [&] { net.forward_batch(inputs.data(), batch, q_s.data(), false, &ws_s); });
    const double fp =
        time_best_of(3, [&] { net.forward_batch(inputs.data(), batch, q_p.data(), true, &ws_p); });
    report("net_forward_batch128", fs, fp, q_s == q_p);

    std::vector<double> g_s, g_p;
    const double bs =
        time_best_of(3, [&] { net.backward_batch(inputs.data(), dq.data(), ws_s, g_s, false); });
    const double bp =
        time_best_of(3, [&] { net.backward_batch(inputs.data(), dq.data(), ws_p, g_p, true); });
    report("net_backward_batch128", bs, bp, g_s == g_p);
  }

  // --- Monte Carlo episodes --------------------------------------------------
  // episode parallelism follows AERHARVEST_THREADS; rerun the binary with a
  // different value to compare, results are thread-count independent
  {
    RunConfig cfg = RunConfig::load(root + "/configs/tiny8.json");
    const CityMap tiny = CityMap::load(root + "/maps/tiny8.json");
    const LosTable los = LosTable::compute(tiny);
    const EpisodeConfig ec = episode_config_for(cfg, tiny);
    QNetwork net(net_config_for(cfg, tiny));
    Rng rng(2);
    net.init(rng);

    const int episodes = 64;
    std::vector<EvalRow> rows;
    const double t = time_best_of(3, [&] {
      rows = monte_carlo(net, tiny, los, cfg.scenario, ec, episodes, Rng(42));
    });
    std::printf("%-28s %8.3f ms  (%.0f episodes/s, %d threads)\n", "monte_carlo_tiny8x64", t * 1e3,
                episodes / t, thread_count());
  }
  return 0;
}
