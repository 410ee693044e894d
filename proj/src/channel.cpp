#include "aerharvest/channel.hpp"

#include <cmath>

namespace aerharvest {

double distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double ChannelParams::shadow_sigma(bool los) const {
  return std::sqrt(los ? sigma2_los : sigma2_nlos);
}

double normalize_power(const CityMap& map, double cell_edge_snr_db, double alpha_los) {
  const int m = map.size();
  const double c = map.cell_size();
  // Geometric center in cell coordinates; all four corner cell centers are
  // equidistant from it.
  const double half = (m - 1) / 2.0;
  const double d_edge = std::sqrt(2.0) * half * c;
  const double snr_lin = std::pow(10.0, cell_edge_snr_db / 10.0);
  return snr_lin * std::pow(d_edge, alpha_los);
}

void normalize_power(ChannelParams& params, const CityMap& map) {
  params.power_ratio = normalize_power(map, params.cell_edge_snr_db, params.alpha_los);
}

double link_snr(const Vec3& uav_pos, const Vec3& device_pos, bool los,
                const ChannelParams& params, double shadow_draw_db) {
  const double d = distance(uav_pos, device_pos);
  const double alpha = los ? params.alpha_los : params.alpha_nlos;
  return params.power_ratio * std::pow(d, -alpha) * std::pow(10.0, shadow_draw_db / 10.0);
}

double max_rate(double snr) { return std::log2(1.0 + snr); }

double effective_rate(double rate, double remaining, double delta_n) {
  if (remaining >= delta_n * rate) return rate;
  return remaining / delta_n;
}

}  // namespace aerharvest
