#include "aerharvest/world.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "aerharvest/errors.hpp"
#include "aerharvest/jsonio.hpp"
#include "aerharvest/sha256.hpp"
#include "json.hpp"

namespace aerharvest {

using nlohmann::json;

namespace {

CellKind kind_from_code(char c) {
  switch (c) {
    case '.':
      return CellKind::kFree;
    case 'L':
      return CellKind::kLanding;
    case 'N':
      return CellKind::kNfz;
    case 'T':
      return CellKind::kTallBuilding;
    case 'S':
      return CellKind::kSmallBuilding;
    default:
      throw UsageError(std::string("unknown cell code '") + c + "' in map file");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

CityMap CityMap::load(const std::string& file_path) {
  return from_json_text(read_file(file_path));
}

CityMap CityMap::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw UsageError(std::string("map parse error: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("map parse error: top level must be an object");
  require_keys(j, {"name", "cell_size", "uav_altitude", "cells", "starts"}, "map file");

  CityMap m;
  try {
    m.name_ = j.at("name").get<std::string>();
    m.cell_size_ = j.value("cell_size", 10.0);
    m.uav_altitude_ = j.value("uav_altitude", 10.0);

    const auto& rows = j.at("cells");
    if (!rows.is_array()) throw UsageError("map parse error: \"cells\" must be an array");
    const int size = static_cast<int>(rows.size());
    if (size < 4 || size > 256) {
      throw UsageError("map validation error: grid side must be in [4, 256], got " +
                       std::to_string(size));
    }
    m.size_ = size;
    m.cells_.assign(static_cast<std::size_t>(size) * size, CellKind::kFree);

    std::string canonical;
    for (int r = 0; r < size; ++r) {
      const std::string row = rows[r].get<std::string>();
      if (static_cast<int>(row.size()) != size) {
        throw UsageError("map parse error: row " + std::to_string(r) + " has length " +
                         std::to_string(row.size()) + ", expected " + std::to_string(size));
      }
      // First row in the file is the northernmost (y = M-1).
      const int y = size - 1 - r;
      for (int x = 0; x < size; ++x) {
        m.cells_[m.index(x, y)] = kind_from_code(row[x]);
      }
      canonical += row;
      canonical += '\n';
    }
    m.hash_ = sha256(canonical);

    if (j.contains("starts")) {
      for (const auto& s : j.at("starts")) {
        if (!s.is_array() || s.size() != 2) {
          throw UsageError("map parse error: each start must be an [x, y] pair");
        }
        m.start_cells_.push_back(Cell{s[0].get<int>(), s[1].get<int>()});
      }
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("map parse error: ") + e.what());
  }

  m.validate_and_derive();
  return m;
}

void CityMap::validate_and_derive() {
  for (int y = 0; y < size_; ++y) {
    for (int x = 0; x < size_; ++x) {
      if (kind(x, y) == CellKind::kLanding) landing_cells_.push_back(Cell{x, y});
    }
  }
  if (landing_cells_.empty()) {
    throw UsageError("map validation error: no landing cell ('L') present");
  }
  for (const Cell& s : start_cells_) {
    if (!in_bounds(s.x, s.y)) {
      throw UsageError("map validation error: start cell out of bounds");
    }
    if (!is_landing(s.x, s.y)) {
      throw UsageError("map validation error: start cell (" + std::to_string(s.x) + ", " +
                       std::to_string(s.y) + ") is not a landing cell");
    }
  }
  if (start_cells_.empty()) start_cells_ = landing_cells_;
}

LosTable LosTable::compute(const CityMap& map) { return compute_impl(map, true); }

LosTable LosTable::compute_serial(const CityMap& map) { return compute_impl(map, false); }

LosTable LosTable::compute_impl(const CityMap& map, bool parallel) {
  LosTable t;
  t.map_size_ = map.size();
  t.num_cells_ = static_cast<std::size_t>(map.num_cells());
  t.map_hash_ = map.hash();
  const std::size_t n = t.num_cells_;
  t.bits_.assign((n * n + 63) / 64, 0);

  const int m = map.size();
  std::vector<std::uint8_t> building(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Cell c = map.cell_at(static_cast<int>(i));
    building[i] = map.is_building(c.x, c.y) ? 1 : 0;
  }

  // Upper triangle first; each iteration of the outer loop writes only into
  // its own row of the bit matrix, so rows can be traced independently.
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
  for (std::int64_t a = 0; a < static_cast<std::int64_t>(n); ++a) {
    const int xa = static_cast<int>(a) % m;
    const int ya = static_cast<int>(a) / m;
    for (std::size_t b = static_cast<std::size_t>(a); b < n; ++b) {
      const int xb = static_cast<int>(b) % m;
      const int yb = static_cast<int>(b) / m;
      bool blocked = false;
      supercover_line(xa, ya, xb, yb, [&](int cx, int cy) {
        if (blocked) return;
        if (!building[static_cast<std::size_t>(cy) * m + cx]) return;
        if ((cx == xa && cy == ya) || (cx == xb && cy == yb)) return;  // endpoints never occlude
        blocked = true;
      });
      if (!blocked) {
        const std::size_t k = static_cast<std::size_t>(a) * n + b;
        t.bits_[k >> 6] |= std::uint64_t(1) << (k & 63);
      }
    }
  }

  // Mirror into the lower triangle.
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t a = 1; a < static_cast<std::int64_t>(n); ++a) {
    for (std::size_t b = 0; b < static_cast<std::size_t>(a); ++b) {
      const std::size_t src = b * n + static_cast<std::size_t>(a);
      if ((t.bits_[src >> 6] >> (src & 63)) & 1u) {
        const std::size_t dst = static_cast<std::size_t>(a) * n + b;
        t.bits_[dst >> 6] |= std::uint64_t(1) << (dst & 63);
      }
    }
  }
  return t;
}

namespace {
constexpr char kLosMagic[8] = {'A', 'H', 'L', 'O', 'S', '\0', '\0', '\1'};
}

void LosTable::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write LoS cache: " + path);
  out.write(kLosMagic, 8);
  const std::uint16_t m16 = static_cast<std::uint16_t>(map_size_);
  const std::uint8_t mle[2] = {std::uint8_t(m16 & 0xff), std::uint8_t(m16 >> 8)};
  out.write(reinterpret_cast<const char*>(mle), 2);
  out.write(reinterpret_cast<const char*>(map_hash_.data()), 32);

  const std::size_t nbits = num_cells_ * num_cells_;
  const std::size_t nbytes = (nbits + 7) / 8;
  std::vector<std::uint8_t> packed(nbytes, 0);
  for (std::size_t j = 0; j < nbytes; ++j) {
    packed[j] = std::uint8_t((bits_[j >> 3] >> ((j & 7) * 8)) & 0xff);
  }
  out.write(reinterpret_cast<const char*>(packed.data()), static_cast<std::streamsize>(nbytes));
  if (!out) throw std::runtime_error("write failure on LoS cache: " + path);
}

LosTable LosTable::load(const std::string& path, const CityMap& map) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open LoS cache: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kLosMagic, 8) != 0) {
    throw UsageError("not a LoS cache file (bad magic): " + path);
  }
  std::uint8_t mle[2];
  in.read(reinterpret_cast<char*>(mle), 2);
  std::array<std::uint8_t, 32> hash{};
  in.read(reinterpret_cast<char*>(hash.data()), 32);
  if (!in) throw UsageError("truncated LoS cache: " + path);

  const int m = int(mle[0]) | (int(mle[1]) << 8);
  if (m != map.size()) {
    throw UsageError("LoS cache grid size " + std::to_string(m) + " does not match map size " +
                     std::to_string(map.size()));
  }
  if (hash != map.hash()) {
    throw UsageError("LoS cache is stale: map hash mismatch for " + path);
  }

  LosTable t;
  t.map_size_ = m;
  t.num_cells_ = static_cast<std::size_t>(map.num_cells());
  t.map_hash_ = hash;
  const std::size_t nbits = t.num_cells_ * t.num_cells_;
  const std::size_t nbytes = (nbits + 7) / 8;
  std::vector<std::uint8_t> packed(nbytes);
  in.read(reinterpret_cast<char*>(packed.data()), static_cast<std::streamsize>(nbytes));
  if (in.gcount() != static_cast<std::streamsize>(nbytes)) {
    throw UsageError("truncated LoS cache: " + path);
  }
  t.bits_.assign((nbits + 63) / 64, 0);
  for (std::size_t j = 0; j < nbytes; ++j) {
    t.bits_[j >> 3] |= std::uint64_t(packed[j]) << ((j & 7) * 8);
  }
  return t;
}

}  // namespace aerharvest
