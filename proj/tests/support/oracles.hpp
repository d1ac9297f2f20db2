#pragma once

// Brute-force reference implementations used by the tests. None of these
// call into the library beyond its value types.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mqr/geometry.hpp"

namespace oracle {

using mqr::Area;
using mqr::Coord;
using mqr::MBR;
using ObjectId = std::uint64_t;

struct Item {
  ObjectId id;
  MBR mbr;
};

inline bool closed_overlap(const MBR& a, const MBR& b) {
  return !(a.hx() < b.lx() || b.hx() < a.lx() || a.hy() < b.ly() || b.hy() < a.ly());
}

/// Every id whose rectangle touches the region, ascending.
template <class Items>
std::vector<ObjectId> linear_scan(const Items& items, const MBR& region) {
  std::vector<ObjectId> out;
  for (const auto& it : items) {
    if (closed_overlap(it.mbr, region)) out.push_back(it.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Union area by counting covered unit cells; only for small extents.
inline Area raster_union(const std::vector<MBR>& rects) {
  if (rects.empty()) return 0;
  Coord lx = rects[0].lx(), ly = rects[0].ly(), hx = rects[0].hx(), hy = rects[0].hy();
  for (const auto& r : rects) {
    lx = std::min(lx, r.lx());
    ly = std::min(ly, r.ly());
    hx = std::max(hx, r.hx());
    hy = std::max(hy, r.hy());
  }
  if ((hx - lx) * (hy - ly) > 4'000'000) throw std::invalid_argument("raster_union: extent too large");
  Area cells = 0;
  for (Coord x = lx; x < hx; ++x) {
    for (Coord y = ly; y < hy; ++y) {
      for (const auto& r : rects) {
        if (r.lx() <= x && x + 1 <= r.hx() && r.ly() <= y && y + 1 <= r.hy()) {
          ++cells;
          break;
        }
      }
    }
  }
  return cells;
}

/// Union area by inclusion-exclusion over all subsets; fine for node fan-out.
inline Area inclusion_exclusion_union(const std::vector<MBR>& rects) {
  const std::size_t n = rects.size();
  if (n > 20) throw std::invalid_argument("inclusion_exclusion_union: too many rectangles");
  Area total = 0;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    Coord lx = INT64_MIN, ly = INT64_MIN, hx = INT64_MAX, hy = INT64_MAX;
    int bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask & (1u << i))) continue;
      ++bits;
      lx = std::max(lx, rects[i].lx());
      ly = std::max(ly, rects[i].ly());
      hx = std::min(hx, rects[i].hx());
      hy = std::min(hy, rects[i].hy());
    }
    const Area a = (lx < hx && ly < hy) ? (hx - lx) * (hy - ly) : 0;
    total += (bits % 2 == 1) ? a : -a;
  }
  return total;
}

/// Quadrant name of a relative to b, written directly from the orientation
/// table (axis cases rotate counter-clockwise: E->NE, N->NW, W->SW, S->SE).
inline std::string table_orientation(Coord ax, Coord ay, Coord bx, Coord by) {
  if (ax == bx && ay == by) return "EQ";
  if (ax > bx && ay >= by) return "NE";
  if (ax <= bx && ay > by) return "NW";
  if (ax < bx && ay <= by) return "SW";
  return "SE";
}

// --- dump parsing ------------------------------------------------------------

struct DumpNode {
  std::size_t depth = 0;
  std::string kind;
  MBR mbr;
  std::vector<Item> objects;
  std::size_t child_slots = 0;  // occupied slots holding a subtree
  bool has_next = false;
  std::vector<std::size_t> children;  // indices of child lines, NEXT link included
};

/// Parses the canonical dump into a flat node list with parent/child links
/// rebuilt from indentation.
inline std::vector<DumpNode> parse_dump(const std::string& text) {
  std::vector<DumpNode> nodes;
  if (text == "(empty)\n") return nodes;
  std::istringstream in(text);
  std::string line;
  std::vector<std::size_t> stack;  // index of the open node at each depth
  while (std::getline(in, line)) {
    std::size_t spaces = line.find_first_not_of(' ');
    if (spaces == std::string::npos || spaces % 2 != 0) throw std::runtime_error("bad indentation: " + line);
    DumpNode n;
    n.depth = spaces / 2;
    std::istringstream ls(line.substr(spaces));
    Coord c[4];
    ls >> n.kind >> c[0] >> c[1] >> c[2] >> c[3];
    if (!ls || (n.kind != "NORMAL" && n.kind != "CENTER")) throw std::runtime_error("bad node header: " + line);
    n.mbr = MBR{c[0], c[1], c[2], c[3]};
    std::string tok;
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) throw std::runtime_error("bad slot token: " + tok);
      const std::string label = tok.substr(0, colon);
      const std::string rest = tok.substr(colon + 1);
      if (rest == "(node)") {
        if (label == "NEXT") {
          n.has_next = true;
        } else {
          ++n.child_slots;
        }
      } else if (rest == "(obj") {
        Item it{};
        Coord o[4];
        std::string tail;
        ls >> it.id >> o[0] >> o[1] >> o[2] >> tail;
        if (!ls || tail.empty() || tail.back() != ')') throw std::runtime_error("bad object token in: " + line);
        o[3] = std::stoll(tail.substr(0, tail.size() - 1));
        it.mbr = MBR{o[0], o[1], o[2], o[3]};
        n.objects.push_back(it);
      } else {
        throw std::runtime_error("bad slot payload: " + tok);
      }
    }
    const std::size_t idx = nodes.size();
    if (n.depth == 0) {
      if (!nodes.empty()) throw std::runtime_error("second root line");
    } else {
      if (stack.size() < n.depth) throw std::runtime_error("indentation jumps: " + line);
      nodes[stack[n.depth - 1]].children.push_back(idx);
    }
    stack.resize(n.depth);
    stack.push_back(idx);
    nodes.push_back(std::move(n));
  }
  for (const auto& n : nodes) {
    if (n.children.size() != n.child_slots + (n.has_next ? 1 : 0)) {
      throw std::runtime_error("child line count disagrees with slot tokens");
    }
  }
  return nodes;
}

/// Metrics recomputed from the dump text alone.
struct DumpMetrics {
  std::size_t node_count = 0;
  std::size_t max_height = 0;
  double avg_path_length = 0.0;
  double space_utilization = 0.0;
  Area coverage = 0;
  Area overcoverage = 0;
  Area overlap = 0;
};

inline DumpMetrics metrics_from_dump(const std::string& text) {
  const auto nodes = parse_dump(text);
  DumpMetrics m;
  m.node_count = nodes.size();
  std::size_t occupied = 0, objects = 0, path_sum = 0;
  for (const auto& n : nodes) {
    std::vector<MBR> entries;
    for (const auto& o : n.objects) entries.push_back(o.mbr);
    for (std::size_t c : n.children) entries.push_back(nodes[c].mbr);
    occupied += n.objects.size() + n.child_slots;
    objects += n.objects.size();
    path_sum += n.objects.size() * (n.depth + 1);
    if (!n.objects.empty()) m.max_height = std::max(m.max_height, n.depth + 1);
    m.coverage += n.mbr.area();
    m.overcoverage += n.mbr.area() - inclusion_exclusion_union(entries);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      for (std::size_t j = i + 1; j < entries.size(); ++j) {
        const Coord w = std::min(entries[i].hx(), entries[j].hx()) - std::max(entries[i].lx(), entries[j].lx());
        const Coord h = std::min(entries[i].hy(), entries[j].hy()) - std::max(entries[i].ly(), entries[j].ly());
        if (w > 0 && h > 0) m.overlap += w * h;
      }
    }
  }
  if (objects) m.avg_path_length = static_cast<double>(path_sum) / static_cast<double>(objects);
  if (!nodes.empty()) m.space_utilization = static_cast<double>(occupied) / (5.0 * static_cast<double>(nodes.size()));
  return m;
}

/// Multiset of (id, mbr) objects present in a dump.
inline std::map<ObjectId, std::vector<Coord>> objects_in_dump(const std::string& text) {
  std::map<ObjectId, std::vector<Coord>> out;
  for (const auto& n : parse_dump(text)) {
    for (const auto& o : n.objects) {
      if (out.count(o.id)) throw std::runtime_error("object listed twice in dump");
      out[o.id] = {o.mbr.lx(), o.mbr.ly(), o.mbr.hx(), o.mbr.hy()};
    }
  }
  return out;
}

}  // namespace oracle
