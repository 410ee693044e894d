#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace aerharvest {

enum class CellKind : std::uint8_t {
  kFree = 0,
  kLanding,        // start/landing zone
  kNfz,            // regulatory no-fly zone
  kTallBuilding,   // blocks flight and wireless links
  kSmallBuilding,  // can be overflown, blocks wireless links
};

struct Cell {
  int x = 0;
  int y = 0;
  bool operator==(const Cell&) const = default;
};

// Square grid world. Cell (x, y) has x growing east and y growing north;
// in the map file the first row of "cells" is the northernmost (y = M-1).
//
// Derived sets follow the usual split: L = landing cells, Z = cells a UAV may
// never occupy (NFZ + tall buildings), B = cells that shadow wireless links
// (all buildings).
class CityMap {
 public:
  static CityMap load(const std::string& file_path);
  static CityMap from_json_text(const std::string& text);

  const std::string& name() const { return name_; }
  int size() const { return size_; }
  double cell_size() const { return cell_size_; }
  double uav_altitude() const { return uav_altitude_; }

  bool in_bounds(int x, int y) const { return x >= 0 && x < size_ && y >= 0 && y < size_; }
  CellKind kind(int x, int y) const { return cells_[index(x, y)]; }

  bool is_landing(int x, int y) const { return kind(x, y) == CellKind::kLanding; }
  bool is_nfz_or_tall(int x, int y) const {
    const CellKind k = kind(x, y);
    return k == CellKind::kNfz || k == CellKind::kTallBuilding;
  }
  bool is_building(int x, int y) const {
    const CellKind k = kind(x, y);
    return k == CellKind::kTallBuilding || k == CellKind::kSmallBuilding;
  }

  // Environment tensor channels, {0,1} valued: [landing, Z, B].
  double layer_landing(int x, int y) const { return is_landing(x, y) ? 1.0 : 0.0; }
  double layer_nfz(int x, int y) const { return is_nfz_or_tall(x, y) ? 1.0 : 0.0; }
  double layer_obstacle(int x, int y) const { return is_building(x, y) ? 1.0 : 0.0; }

  const std::vector<Cell>& landing_cells() const { return landing_cells_; }
  // Designated mission start cells; subset of the landing cells. Defaults to
  // all landing cells when the map file lists none.
  const std::vector<Cell>& start_cells() const { return start_cells_; }

  int index(int x, int y) const { return y * size_ + x; }
  Cell cell_at(int idx) const { return Cell{idx % size_, idx / size_}; }
  int num_cells() const { return size_ * size_; }

  // Digest of the canonical cell content; identifies the map in cache files.
  const std::array<std::uint8_t, 32>& hash() const { return hash_; }

 private:
  CityMap() = default;
  void validate_and_derive();

  std::string name_;
  int size_ = 0;
  double cell_size_ = 10.0;
  double uav_altitude_ = 10.0;
  std::vector<CellKind> cells_;
  std::vector<Cell> landing_cells_;
  std::vector<Cell> start_cells_;
  std::array<std::uint8_t, 32> hash_{};
};

// Visits every cell touched by the segment between the centers of (x0, y0)
// and (x1, y1), corner-cut cells included (supercover traversal). When the
// segment passes exactly through a cell corner, both side cells are visited.
// Templated so the LoS inner loop can inline the visitor.
template <class Visit>
inline void supercover_line(int x0, int y0, int x1, int y1, Visit&& visit) {
  int dx = x1 - x0;
  int dy = y1 - y0;
  const int xstep = dx >= 0 ? 1 : -1;
  const int ystep = dy >= 0 ? 1 : -1;
  dx = dx >= 0 ? dx : -dx;
  dy = dy >= 0 ? dy : -dy;

  int x = x0;
  int y = y0;
  visit(x, y);

  const int ddx = 2 * dx;
  const int ddy = 2 * dy;
  if (ddx >= ddy) {
    int error = dx;  // error terms scaled by 2*dx
    int errorprev = dx;
    for (int i = 0; i < dx; ++i) {
      x += xstep;
      error += ddy;
      if (error > ddx) {
        y += ystep;
        error -= ddx;
        if (error + errorprev < ddx) {
          visit(x, y - ystep);  // crossed the horizontal boundary first
        } else if (error + errorprev > ddx) {
          visit(x - xstep, y);  // crossed the vertical boundary first
        } else {
          visit(x, y - ystep);  // exact corner crossing touches both
          visit(x - xstep, y);
        }
      }
      visit(x, y);
      errorprev = error;
    }
  } else {
    int error = dy;
    int errorprev = dy;
    for (int i = 0; i < dy; ++i) {
      y += ystep;
      error += ddx;
      if (error > ddy) {
        x += xstep;
        error -= ddy;
        if (error + errorprev < ddy) {
          visit(x - xstep, y);
        } else if (error + errorprev > ddy) {
          visit(x, y - ystep);
        } else {
          visit(x - xstep, y);
          visit(x, y - ystep);
        }
      }
      visit(x, y);
      errorprev = error;
    }
  }
}

// Pairwise line-of-sight over all cell pairs. A pair is NLoS when the segment
// between the two cell centers touches any building cell other than the
// endpoints themselves.
class LosTable {
 public:
  static LosTable compute(const CityMap& map);         // OpenMP over source cells
  static LosTable compute_serial(const CityMap& map);  // reference, same walker

  bool los(int cell_a, int cell_b) const {
    const std::size_t k = static_cast<std::size_t>(cell_a) * num_cells_ + cell_b;
    return (bits_[k >> 6] >> (k & 63)) & 1u;
  }
  bool los(const Cell& a, const Cell& b) const {
    return los(a.y * map_size_ + a.x, b.y * map_size_ + b.x);
  }

  int map_size() const { return map_size_; }
  std::size_t num_cells() const { return num_cells_; }
  const std::array<std::uint8_t, 32>& map_hash() const { return map_hash_; }

  void save(const std::string& path) const;
  static LosTable load(const std::string& path, const CityMap& map);

  bool operator==(const LosTable& other) const {
    return map_size_ == other.map_size_ && map_hash_ == other.map_hash_ &&
           bits_ == other.bits_;
  }

 private:
  LosTable() = default;
  static LosTable compute_impl(const CityMap& map, bool parallel);

  int map_size_ = 0;
  std::size_t num_cells_ = 0;
  std::array<std::uint8_t, 32> map_hash_{};
  std::vector<std::uint64_t> bits_;
};

}  // namespace aerharvest
