#pragma once

// Synthetic dataset families (uniform/exponential squares and points,
// axis-parallel and sloped line segments), segment-file ingestion and the
// dataset CSV format `id,lx,ly,hx,hy`.
//
// Random draws go through Rng below rather than <random> distributions so a
// (seed, config) pair yields the same bytes with every standard library.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mqr/geometry.hpp"
#include "mqr/mqr_tree.hpp"

namespace mqr {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [lo, hi] by rejection (no modulo bias).
  Coord uniform(Coord lo, Coord hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return lo + static_cast<Coord>(next());
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return lo + static_cast<Coord>(v % span);
  }

  /// Uniform double in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform(0, static_cast<Coord>(i - 1)));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Derives independent stream seeds from one master seed (splitmix64).
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

enum class Family {
  uniform_squares,
  uniform_points,
  expo_squares,
  expo_points,
  hv_lines,
  sloped_lines,
  mixed_lines,
  external,
};

inline constexpr std::array<Family, 8> kAllFamilies = {
    Family::uniform_squares, Family::uniform_points, Family::expo_squares, Family::expo_points,
    Family::hv_lines,        Family::sloped_lines,   Family::mixed_lines,  Family::external};

constexpr std::string_view to_string(Family f) {
  switch (f) {
    case Family::uniform_squares: return "uniform_squares";
    case Family::uniform_points: return "uniform_points";
    case Family::expo_squares: return "expo_squares";
    case Family::expo_points: return "expo_points";
    case Family::hv_lines: return "hv_lines";
    case Family::sloped_lines: return "sloped_lines";
    case Family::mixed_lines: return "mixed_lines";
    case Family::external: return "external";
  }
  return "?";
}

inline Family parse_family(std::string_view s) {
  for (Family f : kAllFamilies) {
    if (to_string(f) == s) return f;
  }
  throw DatasetError("unknown dataset family '" + std::string(s) + "'");
}

struct DatasetItem {
  ObjectId id;
  MBR mbr;

  friend bool operator==(const DatasetItem&, const DatasetItem&) = default;
};

struct Dataset {
  std::string name;
  Family family = Family::external;
  std::vector<DatasetItem> items;

  /// Bounding box of all items.
  MBR extent() const {
    if (items.empty()) throw DatasetError("dataset '" + name + "' is empty");
    MBR m = items.front().mbr;
    for (const auto& it : items) m = merge_mbrs(m, it.mbr);
    return m;
  }
};

/// Side of the default square world for `count` objects: 100 * ceil(sqrt(N)).
inline Coord default_world_side(std::size_t count) {
  auto root = static_cast<Coord>(std::sqrt(static_cast<double>(count)));
  while (root * root < static_cast<Coord>(count)) ++root;
  return 100 * root;
}

struct GenConfig {
  std::uint64_t seed = 1;
  std::size_t count = 1000;
  std::optional<MBR> world;  // default: (0,0) .. default_world_side(count)
  Coord square_side = 10;
  Coord line_length = 10;

  MBR world_or_default() const {
    if (world) return *world;
    const Coord side = default_world_side(count);
    return {0, 0, side, side};
  }

  void check() const {
    if (count == 0) throw DatasetError("dataset size must be at least 1");
    const MBR w = world_or_default();
    if (std::max({std::abs(w.lx()), std::abs(w.ly()), std::abs(w.hx()), std::abs(w.hy())}) > kCoordLimit) {
      throw DatasetError("world extent exceeds the coordinate limit");
    }
    if (square_side < 0 || line_length < 0) throw DatasetError("shape sizes must be non-negative");
  }
};

namespace detail {

inline void require_fit(const MBR& world, Coord w, Coord h) {
  if (world.width() < w || world.height() < h) {
    throw DatasetError("world too small for " + std::to_string(w) + "x" + std::to_string(h) + " shapes");
  }
}

/// Exponential offset in [0, room], rate chosen so that the 99th percentile
/// lands at `room`; larger draws are clipped to the boundary.
inline Coord expo_offset(Rng& rng, Coord room) {
  if (room == 0) return 0;
  const double rate = std::log(100.0) / static_cast<double>(room);
  const double v = -std::log1p(-rng.unit()) / rate;
  return std::min(room, static_cast<Coord>(v));
}

struct Placement {
  enum class Kind { uniform, expo } kind;

  /// Low corner for a w x h shape inside `world`.
  Point low_corner(Rng& rng, const MBR& world, Coord w, Coord h) const {
    const Coord rx = world.width() - w;
    const Coord ry = world.height() - h;
    if (kind == Kind::uniform) {
      return {world.lx() + rng.uniform(0, rx), world.ly() + rng.uniform(0, ry)};
    }
    const Coord x = expo_offset(rng, rx);
    const Coord y = expo_offset(rng, ry);
    return {world.lx() + x, world.ly() + y};
  }
};

inline Dataset make_squares(const GenConfig& cfg, Placement place, Family fam) {
  cfg.check();
  const MBR world = cfg.world_or_default();
  require_fit(world, cfg.square_side, cfg.square_side);
  Rng rng(cfg.seed);
  Dataset d{std::string(to_string(fam)), fam, {}};
  d.items.reserve(cfg.count);
  for (std::size_t i = 0; i < cfg.count; ++i) {
    const Point p = place.low_corner(rng, world, cfg.square_side, cfg.square_side);
    d.items.push_back({i, MBR{p.x, p.y, p.x + cfg.square_side, p.y + cfg.square_side}});
  }
  return d;
}

inline Dataset make_points(const GenConfig& cfg, Placement place, Family fam) {
  cfg.check();
  const MBR world = cfg.world_or_default();
  const auto cells = static_cast<double>(world.width() + 1) * static_cast<double>(world.height() + 1);
  if (static_cast<double>(cfg.count) > cells) throw DatasetError("world has fewer lattice points than requested");
  Rng rng(cfg.seed);
  Dataset d{std::string(to_string(fam)), fam, {}};
  d.items.reserve(cfg.count);
  std::set<Point> taken;
  // Exponential draws cluster near the origin; cap retries so a dense
  // request fails loudly instead of spinning.
  std::size_t budget = cfg.count * 1000 + 1000;
  while (d.items.size() < cfg.count) {
    if (budget-- == 0) throw DatasetError("could not draw enough distinct points");
    const Point p = place.low_corner(rng, world, 0, 0);
    if (!taken.insert(p).second) continue;
    d.items.push_back({d.items.size(), MBR::point(p.x, p.y)});
  }
  return d;
}

struct Direction {
  Coord dx;
  Coord dy;  // signed; the MBR spans |dy|
};

inline Direction direction_for_slope(double slope, Coord length) {
  const double dx = static_cast<double>(length) / std::sqrt(1.0 + slope * slope);
  return {static_cast<Coord>(std::lround(dx)), static_cast<Coord>(std::lround(slope * dx))};
}

inline Dataset make_segments(const GenConfig& cfg, const std::vector<Direction>& classes, Family fam) {
  cfg.check();
  const MBR world = cfg.world_or_default();
  for (const auto& c : classes) require_fit(world, std::abs(c.dx), std::abs(c.dy));
  Rng rng(cfg.seed);
  const Placement uniform{Placement::Kind::uniform};
  Dataset d{std::string(to_string(fam)), fam, {}};
  d.items.reserve(cfg.count);
  for (std::size_t i = 0; i < cfg.count; ++i) {
    const Direction dir = classes[i % classes.size()];
    const Coord w = std::abs(dir.dx);
    const Coord h = std::abs(dir.dy);
    const Point p = uniform.low_corner(rng, world, w, h);
    d.items.push_back({i, MBR{p.x, p.y, p.x + w, p.y + h}});
  }
  return d;
}

}  // namespace detail

inline Dataset gen_uniform_squares(const GenConfig& cfg) {
  return detail::make_squares(cfg, {detail::Placement::Kind::uniform}, Family::uniform_squares);
}

inline Dataset gen_expo_squares(const GenConfig& cfg) {
  return detail::make_squares(cfg, {detail::Placement::Kind::expo}, Family::expo_squares);
}

/// Distinct points; duplicates are redrawn.
inline Dataset gen_uniform_points(const GenConfig& cfg) {
  return detail::make_points(cfg, {detail::Placement::Kind::uniform}, Family::uniform_points);
}

inline Dataset gen_expo_points(const GenConfig& cfg) {
  return detail::make_points(cfg, {detail::Placement::Kind::expo}, Family::expo_points);
}

/// Even indices horizontal, odd indices vertical.
inline Dataset gen_hv_lines(const GenConfig& cfg) {
  return detail::make_segments(cfg, {{cfg.line_length, 0}, {0, cfg.line_length}}, Family::hv_lines);
}

/// Equal shares of slopes 1/2, 1, 2, -1/2, -1, -2 (round-robin by index).
/// With `include_axis_parallel` the mix gains slope 0, horizontal and
/// vertical; slope 0 and horizontal are the same segment shape.
inline Dataset gen_sloped_lines(const GenConfig& cfg, bool include_axis_parallel) {
  std::vector<detail::Direction> classes;
  for (double s : {0.5, 1.0, 2.0, -0.5, -1.0, -2.0}) classes.push_back(detail::direction_for_slope(s, cfg.line_length));
  if (include_axis_parallel) {
    classes.push_back({cfg.line_length, 0});
    classes.push_back({cfg.line_length, 0});
    classes.push_back({0, cfg.line_length});
  }
  return detail::make_segments(cfg, classes,
                               include_axis_parallel ? Family::mixed_lines : Family::sloped_lines);
}

inline Dataset generate(Family f, const GenConfig& cfg) {
  switch (f) {
    case Family::uniform_squares: return gen_uniform_squares(cfg);
    case Family::uniform_points: return gen_uniform_points(cfg);
    case Family::expo_squares: return gen_expo_squares(cfg);
    case Family::expo_points: return gen_expo_points(cfg);
    case Family::hv_lines: return gen_hv_lines(cfg);
    case Family::sloped_lines: return gen_sloped_lines(cfg, false);
    case Family::mixed_lines: return gen_sloped_lines(cfg, true);
    case Family::external: break;
  }
  throw DatasetError("the external family is loaded from a segment file, not generated");
}

// --- ingestion ---------------------------------------------------------------

inline constexpr double kDefaultScale = 100.0;

/// Real coordinate to grid units, rounding halves up.
inline Coord quantize(double v, double scale, std::size_t line_no) {
  const double q = std::floor(v * scale + 0.5);
  if (!std::isfinite(q) || std::abs(q) > static_cast<double>(kCoordLimit)) {
    throw DatasetError("line " + std::to_string(line_no) + ": coordinate " + std::to_string(v) + " out of range");
  }
  return static_cast<Coord>(q);
}

/// Whitespace-separated `x1 y1 x2 y2` per line; `#` starts a comment.
inline Dataset read_segments(std::istream& in, std::string name, double scale = kDefaultScale) {
  Dataset d{std::move(name), Family::external, {}};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    double v[4];
    int got = 0;
    while (got < 4 && (ls >> v[got])) ++got;
    std::string rest;
    if (got != 4 || (ls >> rest)) {
      throw DatasetError("line " + std::to_string(line_no) + ": expected 'x1 y1 x2 y2'");
    }
    const Coord x1 = quantize(v[0], scale, line_no), y1 = quantize(v[1], scale, line_no);
    const Coord x2 = quantize(v[2], scale, line_no), y2 = quantize(v[3], scale, line_no);
    d.items.push_back(
        {d.items.size(), MBR{std::min(x1, x2), std::min(y1, y2), std::max(x1, x2), std::max(y1, y2)}});
  }
  if (d.items.empty()) throw DatasetError("segment file '" + d.name + "' contains no segments");
  return d;
}

inline Dataset load_segments(const std::filesystem::path& path, double scale = kDefaultScale) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open segment file " + path.string());
  return read_segments(in, path.stem().string(), scale);
}

inline void write_dataset_csv(std::ostream& out, const Dataset& d) {
  out << "id,lx,ly,hx,hy\n";
  for (const auto& it : d.items) {
    out << it.id << ',' << it.mbr.lx() << ',' << it.mbr.ly() << ',' << it.mbr.hx() << ',' << it.mbr.hy() << '\n';
  }
}

inline Dataset read_dataset_csv(std::istream& in, std::string name) {
  Dataset d{std::move(name), Family::external, {}};
  std::string line;
  std::size_t line_no = 0;
  std::set<ObjectId> ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("id,", 0) == 0) continue;
    std::istringstream ls(line);
    long long f[5];
    char comma;
    bool ok = static_cast<bool>(ls >> f[0]);
    for (int i = 1; ok && i < 5; ++i) ok = static_cast<bool>(ls >> comma >> f[i]) && comma == ',';
    std::string rest;
    if (!ok || (ls >> rest) || f[0] < 0) {
      throw DatasetError("line " + std::to_string(line_no) + ": expected 'id,lx,ly,hx,hy'");
    }
    for (int i = 1; i < 5; ++i) {
      if (std::abs(f[i]) > kCoordLimit) {
        throw DatasetError("line " + std::to_string(line_no) + ": coordinate out of range");
      }
    }
    if (f[1] > f[3] || f[2] > f[4]) throw DatasetError("line " + std::to_string(line_no) + ": inverted rectangle");
    const auto id = static_cast<ObjectId>(f[0]);
    if (!ids.insert(id).second) throw DatasetError("line " + std::to_string(line_no) + ": duplicate id");
    d.items.push_back({id, MBR{f[1], f[2], f[3], f[4]}});
  }
  if (d.items.empty()) throw DatasetError("dataset '" + d.name + "' is empty");
  return d;
}

inline void save_dataset_csv(const std::filesystem::path& path, const Dataset& d) {
  std::ofstream out(path);
  if (!out) throw DatasetError("cannot write " + path.string());
  write_dataset_csv(out, d);
}

inline Dataset load_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open dataset " + path.string());
  return read_dataset_csv(in, path.stem().string());
}

}  // namespace mqr
