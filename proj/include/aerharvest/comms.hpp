#pragma once

#include <vector>

#include "aerharvest/channel.hpp"
#include "aerharvest/rng.hpp"
#include "aerharvest/world.hpp"

namespace aerharvest {

struct DeviceState {
  Cell position;        // ground level
  double remaining = 0.0;
  double initial = 0.0;
  std::vector<double> collected_by;  // cumulative per UAV

  bool has_data() const { return remaining > 0.0; }
};

// One scheduling decision: UAV `uav` served device `device` during
// communication slot `slot` at the effective rate `rate`.
struct CommEntry {
  int slot = 0;    // global communication slot index n
  int uav = 0;
  int device = -1;  // -1: no device with data reachable
  double rate = 0.0;
  bool los = false;
};

using CommLog = std::vector<CommEntry>;

// UAV position during communication sub-slot `slot_offset` of a mission slot,
// linearly interpolated between the cell centers of p_t and p_t1, in meters
// at flying altitude.
Vec3 interpolate_position(const Cell& p_t, const Cell& p_t1, int slot_offset,
                          const ChannelParams& params, const CityMap& map);

Vec3 device_position_m(const Cell& device_cell, const CityMap& map);

// Round an interpolated position back to the nearest grid cell for the LoS
// table lookup.
Cell nearest_cell(const Vec3& pos_m, const CityMap& map);

struct UavCommPose {
  int uav = 0;
  Cell from;
  Cell to;
};

// One communication slot: every listed UAV independently picks the device
// with the highest SNR among those with remaining data (max-rate rule,
// orthogonal subchannels). UAVs are processed in ascending index order and
// see the device drain caused by lower-indexed UAVs within the same slot;
// SNR ties break toward the lower device index. Shadowing draws come from
// `rng`, one per (UAV, device) pair in scan order whether or not the device
// still holds data, so the stream does not depend on drain state.
void schedule_slot(const std::vector<UavCommPose>& uavs, int slot_offset, int global_slot,
                   std::vector<DeviceState>& devices, const LosTable& los_table,
                   const ChannelParams& params, const CityMap& map, Rng& rng, CommLog& log);

// Throughput of one UAV over one mission slot: sum of rate * delta_n over the
// slot's lambda communication slots, gated by the operational flag at slot
// start (Eq-12 style prefactor).
double mission_slot_throughput(const CommLog& log, int uav, bool operational_at_slot_start,
                               int first_global_slot, const ChannelParams& params);

}  // namespace aerharvest
