#include "aerharvest/obsmap.hpp"

#include <algorithm>

#include "aerharvest/errors.hpp"

namespace aerharvest {

MapStack env_layers(const CityMap& map) {
  const int m = map.size();
  MapStack out(m, m, 3);
  for (int y = 0; y < m; ++y)
    for (int x = 0; x < m; ++x) {
      out.at(0, y, x) = map.is_landing(x, y) ? 1.0 : 0.0;
      out.at(1, y, x) = map.is_nfz_or_tall(x, y) ? 1.0 : 0.0;
      out.at(2, y, x) = map.is_building(x, y) ? 1.0 : 0.0;
    }
  return out;
}

MapStack build_layers(const std::vector<DeviceState>& devices,
                      const std::vector<UavState>& uavs, int map_size) {
  MapStack out(map_size, map_size, 3);
  for (const DeviceState& d : devices) out.at(0, d.position.y, d.position.x) = d.remaining;
  for (const UavState& u : uavs) {
    out.at(1, u.position.y, u.position.x) = u.flying_time;
    out.at(2, u.position.y, u.position.x) = u.operational ? 1.0 : 0.0;
  }
  return out;
}

MapStack center(const MapStack& layers, const Cell& ego, const std::vector<double>& pad) {
  const int m = layers.rows;
  const int mc = 2 * m - 1;
  MapStack out(mc, mc, layers.channels);
  for (int c = 0; c < layers.channels; ++c) {
    const double fill = pad[c];
    for (int i = 0; i < mc; ++i) {
      const int si = i + ego.y - m + 1;
      for (int j = 0; j < mc; ++j) {
        const int sj = j + ego.x - m + 1;
        out.at(c, i, j) = (si >= 0 && si < m && sj >= 0 && sj < m) ? layers.at(c, si, sj) : fill;
      }
    }
  }
  return out;
}

MapStack local_crop(const MapStack& centered, int l) {
  if (l % 2 == 0 || l > centered.rows)
    throw UsageError("local observation size must be odd and at most 2M-1");
  const int off = (centered.rows - l) / 2;
  MapStack out(l, l, centered.channels);
  for (int c = 0; c < centered.channels; ++c)
    for (int i = 0; i < l; ++i)
      for (int j = 0; j < l; ++j) out.at(c, i, j) = centered.at(c, i + off, j + off);
  return out;
}

MapStack global_pool(const MapStack& centered, int g) {
  const int n = centered.rows / g;
  MapStack out(n, n, centered.channels);
  const double inv = 1.0 / (g * g);
  for (int c = 0; c < centered.channels; ++c)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double sum = 0.0;
        for (int di = 0; di < g; ++di)
          for (int dj = 0; dj < g; ++dj) sum += centered.at(c, g * i + di, g * j + dj);
        out.at(c, i, j) = sum * inv;
      }
  return out;
}

void ObsConfig::validate(int map_size) const {
  if (local_size % 2 == 0 || local_size < 1 || local_size > centered_size(map_size))
    throw UsageError("local observation size must be odd, positive, and at most 2M-1");
  if (global_pooling < 1 || global_size(map_size) < 1)
    throw UsageError("global pooling must be at least 1 and leave a nonempty grid");
}

static MapStack concat_channels(const MapStack& a, const MapStack& b) {
  MapStack out(a.rows, a.cols, a.channels + b.channels);
  std::copy(a.data.begin(), a.data.end(), out.data.begin());
  std::copy(b.data.begin(), b.data.end(), out.data.begin() + a.data.size());
  return out;
}

Observation observe(const CityMap& map, const std::vector<DeviceState>& devices,
                    const std::vector<UavState>& uavs, int ego, const ObsConfig& config) {
  const MapStack env = env_layers(map);
  const MapStack dyn = build_layers(devices, uavs, map.size());
  const Cell p = uavs[ego].position;
  const MapStack env_c = center(env, p, {0.0, 1.0, 1.0});
  const MapStack dyn_c = center(dyn, p, {0.0, 0.0, 0.0});

  Observation obs;
  obs.local = concat_channels(local_crop(env_c, config.local_size),
                              local_crop(dyn_c, config.local_size));
  obs.global_map = concat_channels(global_pool(env_c, config.global_pooling),
                                   global_pool(dyn_c, config.global_pooling));
  obs.scalar_b = uavs[ego].flying_time;
  return obs;
}

}  // namespace aerharvest
