#pragma once

#include "aerharvest/world.hpp"

namespace aerharvest {

// 3D point in meters. Grid cell (x, y) maps to (x * c, y * c) with z either 0
// (ground, devices) or the shared UAV altitude h.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

double distance(const Vec3& a, const Vec3& b);

// Log-distance path loss with LoS/NLoS dependent exponent and shadowing.
// power_ratio is P/sigma^2 in linear units, fixed by the cell-edge SNR
// normalization below.
struct ChannelParams {
  double alpha_los = 2.27;
  double alpha_nlos = 3.64;
  double sigma2_los = 2.0;   // shadowing variance, dB^2
  double sigma2_nlos = 5.0;  // shadowing variance, dB^2
  double cell_edge_snr_db = -5.0;
  double power_ratio = 1.0;  // derived, linear

  int lambda = 4;      // communication slots per mission slot
  double delta_t = 1.0;  // mission slot length, seconds
  double delta_n() const { return delta_t / lambda; }

  double shadow_sigma(bool los) const;
};

// Fixes P/sigma^2 so that an unobstructed LoS link from the map's geometric
// center at ground level to the farthest grid corner cell center sees exactly
// cell_edge_snr_db (with zero shadowing).
double normalize_power(const CityMap& map, double cell_edge_snr_db, double alpha_los = 2.27);
void normalize_power(ChannelParams& params, const CityMap& map);

// SNR averaged over small-scale fading: power_ratio * d^-alpha * 10^(eta/10).
double link_snr(const Vec3& uav_pos, const Vec3& device_pos, bool los,
                const ChannelParams& params, double shadow_draw_db);

// Shannon rate, bits/s/Hz.
double max_rate(double snr);

// Caps the rate so a device with little data left does not go negative
// within one communication slot.
double effective_rate(double rate, double remaining, double delta_n);

}  // namespace aerharvest
