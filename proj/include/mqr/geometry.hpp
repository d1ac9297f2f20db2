#pragma once

// Integer rectangle arithmetic shared by the mqr-tree, the R-tree baseline
// and the metrics. Coordinates are discrete: centroids use floor division and
// the quadrant-shift regions use +1/-1 offsets, so everything stays exact.

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mqr {

using Coord = std::int64_t;
using Area = std::int64_t;

/// Largest absolute coordinate accepted by loaders and generators. Keeps
/// per-rectangle areas well inside 64 bits and leaves headroom for sums.
inline constexpr Coord kCoordLimit = Coord{1} << 24;

struct Point {
  Coord x = 0;
  Coord y = 0;

  friend constexpr bool operator==(const Point&, const Point&) = default;
  friend constexpr auto operator<=>(const Point&, const Point&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const Point& p) {
  return os << '(' << p.x << ',' << p.y << ')';
}

namespace detail {
constexpr Coord floor_half(Coord s) { return s >= 0 ? s / 2 : -((-s + 1) / 2); }
}  // namespace detail

/// Axis-aligned closed rectangle [lx,hx] x [ly,hy] with a cached centroid.
/// Degenerate rectangles (points and axis-parallel segments) are valid.
class MBR {
 public:
  constexpr MBR() = default;

  constexpr MBR(Coord lx, Coord ly, Coord hx, Coord hy)
      : lx_(lx), ly_(ly), hx_(hx), hy_(hy) {
    if (lx > hx || ly > hy) {
      throw std::invalid_argument("MBR: low corner exceeds high corner");
    }
    cx_ = detail::floor_half(lx_ + hx_);
    cy_ = detail::floor_half(ly_ + hy_);
  }

  static constexpr MBR point(Coord x, Coord y) { return {x, y, x, y}; }

  constexpr Coord lx() const { return lx_; }
  constexpr Coord ly() const { return ly_; }
  constexpr Coord hx() const { return hx_; }
  constexpr Coord hy() const { return hy_; }
  constexpr Coord cx() const { return cx_; }
  constexpr Coord cy() const { return cy_; }

  constexpr Coord width() const { return hx_ - lx_; }
  constexpr Coord height() const { return hy_ - ly_; }
  constexpr Area area() const { return width() * height(); }

  constexpr bool contains(const MBR& o) const {
    return lx_ <= o.lx_ && ly_ <= o.ly_ && o.hx_ <= hx_ && o.hy_ <= hy_;
  }
  constexpr bool contains(const Point& p) const {
    return lx_ <= p.x && p.x <= hx_ && ly_ <= p.y && p.y <= hy_;
  }

  friend constexpr bool operator==(const MBR& a, const MBR& b) {
    return a.lx_ == b.lx_ && a.ly_ == b.ly_ && a.hx_ == b.hx_ && a.hy_ == b.hy_;
  }

  /// Lexicographic on (lx, ly, hx, hy).
  friend constexpr bool corner_less(const MBR& a, const MBR& b) {
    if (a.lx_ != b.lx_) return a.lx_ < b.lx_;
    if (a.ly_ != b.ly_) return a.ly_ < b.ly_;
    if (a.hx_ != b.hx_) return a.hx_ < b.hx_;
    return a.hy_ < b.hy_;
  }

 private:
  Coord lx_ = 0, ly_ = 0, hx_ = 0, hy_ = 0;
  Coord cx_ = 0, cy_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, const MBR& m) {
  return os << '(' << m.lx() << ',' << m.ly() << ',' << m.hx() << ',' << m.hy() << ')';
}

/// Node location label and orientation result. The numeric order is the
/// canonical slot order used by nodes and by the dump format.
enum class Quadrant : std::uint8_t { NE = 0, NW = 1, SW = 2, SE = 3, EQ = 4 };

inline constexpr std::size_t kQuadrantCount = 5;
inline constexpr std::array<Quadrant, kQuadrantCount> kAllQuadrants = {
    Quadrant::NE, Quadrant::NW, Quadrant::SW, Quadrant::SE, Quadrant::EQ};

constexpr std::size_t index_of(Quadrant q) { return static_cast<std::size_t>(q); }

constexpr std::string_view to_string(Quadrant q) {
  switch (q) {
    case Quadrant::NE: return "NE";
    case Quadrant::NW: return "NW";
    case Quadrant::SW: return "SW";
    case Quadrant::SE: return "SE";
    case Quadrant::EQ: return "EQ";
  }
  return "??";
}

inline std::ostream& operator<<(std::ostream& os, Quadrant q) { return os << to_string(q); }

constexpr Point centroid(const MBR& m) { return {m.cx(), m.cy()}; }

/// Orientation of `a` with respect to `b`. Points on the axes go to the
/// quadrant that is counter-clockwise next: E->NE, N->NW, W->SW, S->SE.
constexpr Quadrant orientation(const Point& a, const Point& b) {
  if (a.x == b.x && a.y == b.y) return Quadrant::EQ;
  if (a.x > b.x && a.y >= b.y) return Quadrant::NE;
  if (a.x <= b.x && a.y > b.y) return Quadrant::NW;
  if (a.x < b.x && a.y <= b.y) return Quadrant::SW;
  return Quadrant::SE;  // a.x >= b.x && a.y < b.y
}

/// Quadrant of the node that an entry with `new_mbr` belongs in.
constexpr Quadrant find_insert_quad(const MBR& new_mbr, const MBR& node_mbr) {
  return orientation(centroid(new_mbr), centroid(node_mbr));
}

constexpr MBR merge_mbrs(const MBR& a, const MBR& b) {
  return {std::min(a.lx(), b.lx()), std::min(a.ly(), b.ly()), std::max(a.hx(), b.hx()),
          std::max(a.hy(), b.hy())};
}

/// Closed-boundary intersection test; touching edges or corners count.
constexpr bool overlaps(const MBR& a, const MBR& b) {
  return a.lx() <= b.hx() && b.lx() <= a.hx() && a.ly() <= b.hy() && b.ly() <= a.hy();
}

constexpr bool centroid_within(const MBR& m, const MBR& region) {
  return region.contains(centroid(m));
}

/// Geometric intersection area; edge or corner contact contributes zero.
constexpr Area intersection_area(const MBR& a, const MBR& b) {
  const Coord w = std::min(a.hx(), b.hx()) - std::max(a.lx(), b.lx());
  const Coord h = std::min(a.hy(), b.hy()) - std::max(a.ly(), b.ly());
  if (w <= 0 || h <= 0) return 0;
  return w * h;
}

/// Exact area of the union of rectangles by coordinate compression.
inline Area union_area(std::span<const MBR> rects) {
  std::vector<Coord> xs, ys;
  xs.reserve(rects.size() * 2);
  ys.reserve(rects.size() * 2);
  for (const auto& r : rects) {
    if (r.area() == 0) continue;
    xs.push_back(r.lx());
    xs.push_back(r.hx());
    ys.push_back(r.ly());
    ys.push_back(r.hy());
  }
  if (xs.empty()) return 0;
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

  Area total = 0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
      const MBR cell{xs[i], ys[j], xs[i + 1], ys[j + 1]};
      const bool covered = std::any_of(rects.begin(), rects.end(), [&](const MBR& r) {
        return r.area() > 0 && r.contains(cell);
      });
      if (covered) total += cell.area();
    }
  }
  return total;
}

// --- quadrant-shift decomposition -------------------------------------------

/// A region whose occupants must move from `source` to `dest` after the node
/// centroid moved. `region` is empty (nullopt) when the arithmetic yields an
/// inverted interval; callers skip those.
struct ShiftedRegion {
  Quadrant source;
  Quadrant dest;
  std::optional<MBR> region;
};

namespace detail {

struct Box {
  Coord lx = std::numeric_limits<Coord>::min();
  Coord ly = std::numeric_limits<Coord>::min();
  Coord hx = std::numeric_limits<Coord>::max();
  Coord hy = std::numeric_limits<Coord>::max();

  constexpr Box intersect(const Box& o) const {
    return {std::max(lx, o.lx), std::max(ly, o.ly), std::min(hx, o.hx), std::min(hy, o.hy)};
  }
  constexpr std::optional<MBR> to_mbr() const {
    if (lx > hx || ly > hy) return std::nullopt;
    return MBR{lx, ly, hx, hy};
  }
};

constexpr Box box_of(const MBR& m) { return {m.lx(), m.ly(), m.hx(), m.hy()}; }

/// Integer cells whose orientation relative to `c` is `q`.
constexpr Box quadrant_box(Quadrant q, const Point& c) {
  constexpr Coord lo = std::numeric_limits<Coord>::min();
  constexpr Coord hi = std::numeric_limits<Coord>::max();
  switch (q) {
    case Quadrant::NE: return {c.x + 1, c.y, hi, hi};
    case Quadrant::NW: return {lo, c.y + 1, c.x, hi};
    case Quadrant::SW: return {lo, lo, c.x - 1, c.y};
    case Quadrant::SE: return {c.x, lo, hi, c.y - 1};
    case Quadrant::EQ: return {c.x, c.y, c.x, c.y};
  }
  return {};
}

constexpr Quadrant rotate_ccw(Quadrant q) {
  switch (q) {
    case Quadrant::NE: return Quadrant::NW;
    case Quadrant::NW: return Quadrant::SW;
    case Quadrant::SW: return Quadrant::SE;
    case Quadrant::SE: return Quadrant::NE;
    case Quadrant::EQ: return Quadrant::EQ;
  }
  return q;
}

struct ShiftPair {
  Quadrant source;
  Quadrant dest;
};

/// The seven (source, dest) moves of a NE centroid displacement, in the order
/// they are harvested: the EQ pickup first, then the NE expansion list.
inline constexpr std::array<ShiftPair, 7> kNorthEastShifts = {{
    {Quadrant::NE, Quadrant::EQ},
    {Quadrant::NE, Quadrant::SE},
    {Quadrant::NE, Quadrant::SW},
    {Quadrant::SE, Quadrant::SW},
    {Quadrant::NW, Quadrant::SW},
    {Quadrant::EQ, Quadrant::SW},
    {Quadrant::NE, Quadrant::NW},
}};

/// Moves for a centroid displacement in direction `dir`; the other three
/// directions are quarter-turn images of the NE list.
constexpr std::array<ShiftPair, 7> shift_pairs(Quadrant dir) {
  int turns = 0;
  switch (dir) {
    case Quadrant::NE: turns = 0; break;
    case Quadrant::NW: turns = 1; break;
    case Quadrant::SW: turns = 2; break;
    case Quadrant::SE: turns = 3; break;
    case Quadrant::EQ: turns = 0; break;
  }
  auto pairs = kNorthEastShifts;
  for (auto& p : pairs) {
    for (int t = 0; t < turns; ++t) {
      p.source = rotate_ccw(p.source);
      p.dest = rotate_ccw(p.dest);
    }
  }
  return pairs;
}

}  // namespace detail

/// Regions whose occupants change quadrant when a node MBR goes from `orig`
/// to `updated`. One MBR must contain the other. Regions are clipped to the
/// smaller of the two (where every resident centroid lies), except that the
/// EQ pickup is the new centroid itself and the EQ drain is the whole
/// smaller MBR. Returns an empty list when the centroid did not move.
inline std::vector<ShiftedRegion> shifted_subregions(const MBR& orig, const MBR& updated) {
  const Point c0 = centroid(orig);
  const Point c1 = centroid(updated);
  if (c0 == c1) return {};

  MBR bound;
  if (updated.contains(orig)) {
    bound = orig;  // expansion
  } else if (orig.contains(updated)) {
    bound = updated;  // contraction
  } else {
    throw std::invalid_argument("shifted_subregions: neither MBR contains the other");
  }

  const Quadrant dir = orientation(c1, c0);
  std::vector<ShiftedRegion> out;
  out.reserve(7);
  for (const auto& [source, dest] : detail::shift_pairs(dir)) {
    std::optional<MBR> region;
    if (dest == Quadrant::EQ) {
      region = MBR::point(c1.x, c1.y);
    } else if (source == Quadrant::EQ) {
      region = bound;
    } else {
      region = detail::quadrant_box(source, c0)
                   .intersect(detail::quadrant_box(dest, c1))
                   .intersect(detail::box_of(bound))
                   .to_mbr();
    }
    out.push_back({source, dest, region});
  }
  return out;
}

}  // namespace mqr
