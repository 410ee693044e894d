#include "aerharvest/comms.hpp"

#include <cmath>

namespace aerharvest {

Vec3 interpolate_position(const Cell& p_t, const Cell& p_t1, int slot_offset,
                          const ChannelParams& params, const CityMap& map) {
  const double c = map.cell_size();
  const double f = static_cast<double>(slot_offset) / params.lambda;
  return Vec3{(p_t.x + f * (p_t1.x - p_t.x)) * c,
              (p_t.y + f * (p_t1.y - p_t.y)) * c,
              map.uav_altitude()};
}

Vec3 device_position_m(const Cell& device_cell, const CityMap& map) {
  const double c = map.cell_size();
  return Vec3{device_cell.x * c, device_cell.y * c, 0.0};
}

Cell nearest_cell(const Vec3& pos_m, const CityMap& map) {
  const double c = map.cell_size();
  return Cell{static_cast<int>(std::lround(pos_m.x / c)),
              static_cast<int>(std::lround(pos_m.y / c))};
}

void schedule_slot(const std::vector<UavCommPose>& uavs, int slot_offset, int global_slot,
                   std::vector<DeviceState>& devices, const LosTable& los_table,
                   const ChannelParams& params, const CityMap& map, Rng& rng, CommLog& log) {
  for (const UavCommPose& pose : uavs) {
    const Vec3 uav_pos = interpolate_position(pose.from, pose.to, slot_offset, params, map);
    const Cell uav_cell = nearest_cell(uav_pos, map);

    // One shadowing draw per (slot, uav, device) triple, in device order, so
    // the stream is independent of which devices still hold data.
    int best = -1;
    double best_snr = 0.0;
    bool best_los = false;
    for (int k = 0; k < static_cast<int>(devices.size()); ++k) {
      const bool los = los_table.los(uav_cell, devices[k].position);
      const double shadow_db = rng.normal(0.0, params.shadow_sigma(los));
      if (!devices[k].has_data()) continue;
      const double snr =
          link_snr(uav_pos, device_position_m(devices[k].position, map), los, params, shadow_db);
      if (best < 0 || snr > best_snr) {
        best = k;
        best_snr = snr;
        best_los = los;
      }
    }

    CommEntry entry;
    entry.slot = global_slot;
    entry.uav = pose.uav;
    if (best >= 0) {
      DeviceState& dev = devices[best];
      const double rate = effective_rate(max_rate(best_snr), dev.remaining, params.delta_n());
      const double moved = rate * params.delta_n();
      dev.remaining -= moved;
      if (dev.remaining < 0.0) dev.remaining = 0.0;
      if (pose.uav >= static_cast<int>(dev.collected_by.size()))
        dev.collected_by.resize(pose.uav + 1, 0.0);
      dev.collected_by[pose.uav] += moved;
      entry.device = best;
      entry.rate = rate;
      entry.los = best_los;
    }
    log.push_back(entry);
  }
}

double mission_slot_throughput(const CommLog& log, int uav, bool operational_at_slot_start,
                               int first_global_slot, const ChannelParams& params) {
  if (!operational_at_slot_start) return 0.0;
  double total = 0.0;
  for (const CommEntry& e : log) {
    if (e.uav != uav) continue;
    if (e.slot < first_global_slot || e.slot >= first_global_slot + params.lambda) continue;
    total += e.rate * params.delta_n();
  }
  return total;
}

}  // namespace aerharvest
