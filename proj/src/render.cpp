#include "aerharvest/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include <zlib.h>

namespace aerharvest {

namespace {

void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(std::uint8_t(v >> 24));
  out.push_back(std::uint8_t(v >> 16));
  out.push_back(std::uint8_t(v >> 8));
  out.push_back(std::uint8_t(v));
}

void put_chunk(std::vector<std::uint8_t>& out, const char type[4],
               const std::vector<std::uint8_t>& data) {
  put_u32_be(out, std::uint32_t(data.size()));
  const std::size_t crc_start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const std::uint32_t crc =
      std::uint32_t(crc32(0, out.data() + crc_start, uInt(out.size() - crc_start)));
  put_u32_be(out, crc);
}

struct Color {
  std::uint8_t r, g, b;
};

constexpr Color kDevicePalette[] = {
    {46, 204, 113}, {231, 76, 60},  {52, 152, 219}, {241, 196, 15}, {155, 89, 182},
    {26, 188, 156}, {230, 126, 34}, {236, 64, 122}, {121, 85, 72},  {0, 150, 136},
};

Color device_color(int k) {
  if (k < 0) return {40, 40, 40};
  return kDevicePalette[k % (sizeof(kDevicePalette) / sizeof(kDevicePalette[0]))];
}

constexpr int kScale = 16;

void fill_rect(Image& img, int x0, int y0, int x1, int y1, Color c) {
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) img.set(x, y, c.r, c.g, c.b);
}

void draw_disc(Image& img, int cx, int cy, int radius, Color c) {
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx)
      if (dx * dx + dy * dy <= radius * radius) img.set(cx + dx, cy + dy, c.r, c.g, c.b);
}

void draw_ring(Image& img, int cx, int cy, int radius, Color c) {
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx) {
      const int d2 = dx * dx + dy * dy;
      if (d2 <= radius * radius && d2 >= (radius - 2) * (radius - 2))
        img.set(cx + dx, cy + dy, c.r, c.g, c.b);
    }
}

void draw_line(Image& img, int x0, int y0, int x1, int y1, Color c, int thick) {
  const int dx = std::abs(x1 - x0), dy = std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  int err = dx - dy;
  int x = x0, y = y0;
  while (true) {
    for (int oy = -thick / 2; oy <= thick / 2; ++oy)
      for (int ox = -thick / 2; ox <= thick / 2; ++ox) img.set(x + ox, y + oy, c.r, c.g, c.b);
    if (x == x1 && y == y1) break;
    const int e2 = 2 * err;
    if (e2 > -dy) {
      err -= dy;
      x += sx;
    }
    if (e2 < dx) {
      err += dx;
      y += sy;
    }
  }
}

}  // namespace

void write_png(const Image& img, const std::string& path) {
  // raw scanlines, filter byte 0 per row
  std::vector<std::uint8_t> raw;
  raw.reserve(std::size_t(img.height) * (1 + std::size_t(img.width) * 3));
  for (int y = 0; y < img.height; ++y) {
    raw.push_back(0);
    const std::uint8_t* row = &img.rgb[std::size_t(y) * img.width * 3];
    raw.insert(raw.end(), row, row + std::size_t(img.width) * 3);
  }
  uLongf comp_len = compressBound(uLong(raw.size()));
  std::vector<std::uint8_t> comp(comp_len);
  if (compress2(comp.data(), &comp_len, raw.data(), uLong(raw.size()), 9) != Z_OK)
    throw std::runtime_error("PNG compression failed");
  comp.resize(comp_len);

  std::vector<std::uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  std::vector<std::uint8_t> ihdr;
  put_u32_be(ihdr, std::uint32_t(img.width));
  put_u32_be(ihdr, std::uint32_t(img.height));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(2);  // truecolor
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", comp);
  put_chunk(out, "IEND", {});

  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(out.data()), std::streamsize(out.size()));
  if (!f) throw std::runtime_error("failed writing " + path);
}

void render_trajectory(const EpisodeResult& result, const CityMap& map, const std::string& path) {
  const int m = map.size();
  Image img(m * kScale, m * kScale);

  // Row 0 of the image is the northern edge (y = M-1).
  auto px = [&](int cell_x) { return cell_x * kScale; };
  auto py = [&](int cell_y) { return (m - 1 - cell_y) * kScale; };
  auto cx = [&](int cell_x) { return px(cell_x) + kScale / 2; };
  auto cy = [&](int cell_y) { return py(cell_y) + kScale / 2; };

  for (int y = 0; y < m; ++y)
    for (int x = 0; x < m; ++x) {
      Color c{245, 245, 245};
      switch (map.kind(x, y)) {
        case CellKind::kFree: break;
        case CellKind::kLanding: c = {150, 196, 255}; break;
        case CellKind::kNfz: c = {255, 170, 160}; break;
        case CellKind::kTallBuilding: c = {80, 80, 92}; break;
        case CellKind::kSmallBuilding: c = {168, 168, 178}; break;
      }
      fill_rect(img, px(x), py(y), px(x) + kScale, py(y) + kScale, c);
      // light grid line on the south and west edges of each cell
      for (int i = 0; i < kScale; ++i) {
        img.set(px(x) + i, py(y) + kScale - 1, 214, 214, 214);
        img.set(px(x), py(y) + i, 214, 214, 214);
      }
    }

  for (std::size_t k = 0; k < result.devices.size(); ++k) {
    const Cell& c = result.devices[k].position;
    draw_disc(img, cx(c.x), cy(c.y), 5, device_color(int(k)));
  }

  // every mission slot advances the global comm-slot counter by lambda and
  // the last one always logs entries, so the log's maximum recovers lambda
  const int lambda = [&] {
    if (result.comm.empty() || result.slots == 0) return 0;
    int max_slot = 0;
    for (const CommEntry& e : result.comm) max_slot = std::max(max_slot, e.slot);
    return (max_slot + 1) / result.slots;
  }();

  // plurality device per (mission slot, agent); ties go to the earliest
  // sub-slot's device
  auto slot_device = [&](int slot, int uav) {
    std::map<int, int> count;
    std::vector<int> order;
    for (const CommEntry& e : result.comm) {
      if (e.uav != uav || e.device < 0) continue;
      if (lambda > 0 && (e.slot < slot * lambda || e.slot >= (slot + 1) * lambda)) continue;
      if (count.find(e.device) == count.end()) order.push_back(e.device);
      count[e.device]++;
    }
    int best = -1, best_n = 0;
    for (int d : order)
      if (count[d] > best_n) {
        best = d;
        best_n = count[d];
      }
    return best;
  };

  for (const StepRecord& s : result.steps) {
    const Color c = device_color(slot_device(s.slot, s.uav));
    // small per-agent offset so overlapping paths stay distinguishable
    const int off = (s.uav % 3 - 1) * 3;
    const int x0 = cx(s.from.x) + off, y0 = cy(s.from.y) + off;
    const int x1 = cx(s.to.x) + off, y1 = cy(s.to.y) + off;
    if (s.from.x == s.to.x && s.from.y == s.to.y) {
      if (s.landed)
        fill_rect(img, x1 - 4, y1 - 4, x1 + 5, y1 + 5, c);
      else
        draw_ring(img, x0, y0, 5, c);  // hover
      continue;
    }
    draw_line(img, x0, y0, x1, y1, c, 2);
    // arrowhead: two barbs against the movement direction
    const int dx = (x1 > x0) - (x1 < x0), dy = (y1 > y0) - (y1 < y0);
    draw_line(img, x1, y1, x1 - 5 * dx - 4 * dy, y1 - 5 * dy - 4 * dx, c, 1);
    draw_line(img, x1, y1, x1 - 5 * dx + 4 * dy, y1 - 5 * dy + 4 * dx, c, 1);
  }

  for (const UavState& u : result.uavs) {
    draw_ring(img, cx(u.start_position.x), cy(u.start_position.y), 7, {30, 30, 30});
    if (u.crashed) {
      const int x = cx(u.position.x), y = cy(u.position.y);
      draw_line(img, x - 5, y - 5, x + 5, y + 5, {180, 20, 20}, 2);
      draw_line(img, x - 5, y + 5, x + 5, y - 5, {180, 20, 20}, 2);
    }
  }

  write_png(img, path);
}

}  // namespace aerharvest
