#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aerharvest/scenario.hpp"
#include "aerharvest/world.hpp"

namespace aerharvest {

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

  Image(int w, int h) : width(w), height(h), rgb(std::size_t(w) * h * 3, 255) {}

  void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    std::uint8_t* p = &rgb[(std::size_t(y) * width + x) * 3];
    p[0] = r, p[1] = g, p[2] = b;
  }
};

// 8-bit RGB PNG, zlib-compressed, no ancillary chunks; byte-identical output
// for identical input.
void write_png(const Image& img, const std::string& path);

// Map plus per-agent trajectories; movement arrows and hover marks are
// colored by the device the agent talked to most during that mission slot.
void render_trajectory(const EpisodeResult& result, const CityMap& map, const std::string& path);

}  // namespace aerharvest
