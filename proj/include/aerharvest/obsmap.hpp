#pragma once

#include <vector>

#include "aerharvest/comms.hpp"
#include "aerharvest/dynamics.hpp"
#include "aerharvest/world.hpp"

namespace aerharvest {

// Channel-major stack of square map layers, indexed (channel, row, col) with
// row = y and col = x.
struct MapStack {
  int rows = 0;
  int cols = 0;
  int channels = 0;
  std::vector<double> data;

  MapStack() = default;
  MapStack(int r, int c, int ch) : rows(r), cols(c), channels(ch), data(size_t(r) * c * ch, 0.0) {}

  double& at(int c, int i, int j) { return data[(size_t(c) * rows + i) * cols + j]; }
  double at(int c, int i, int j) const { return data[(size_t(c) * rows + i) * cols + j]; }
};

// Static map channels: [landing zones, NFZ incl. tall buildings, obstacles].
MapStack env_layers(const CityMap& map);

// Dynamic channels: [device data, flying times, operational flags]. Entries
// sharing a cell overwrite in ascending index order (last wins).
MapStack build_layers(const std::vector<DeviceState>& devices,
                      const std::vector<UavState>& uavs, int map_size);

// Pad-and-recenter so the ego cell lands at index (M-1, M-1) of the
// (2M-1) x (2M-1) output; `pad` supplies the off-map value per channel.
MapStack center(const MapStack& layers, const Cell& ego, const std::vector<double>& pad);

// Central l x l crop, l odd.
MapStack local_crop(const MapStack& centered, int l);

// Non-overlapping g x g average pooling; trailing rows/cols beyond
// g*floor(M_c/g) are dropped.
MapStack global_pool(const MapStack& centered, int g);

struct ObsConfig {
  int local_size = 17;  // l, odd
  int global_pooling = 3;  // g

  void validate(int map_size) const;
  int centered_size(int map_size) const { return 2 * map_size - 1; }
  int global_size(int map_size) const { return centered_size(map_size) / global_pooling; }
};

struct Observation {
  MapStack local;       // l x l x 6
  MapStack global_map;  // g_bar x g_bar x 6
  double scalar_b = 0.0;
};

Observation observe(const CityMap& map, const std::vector<DeviceState>& devices,
                    const std::vector<UavState>& uavs, int ego, const ObsConfig& config);

}  // namespace aerharvest
