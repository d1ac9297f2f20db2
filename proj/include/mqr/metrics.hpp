#pragma once

// Tree-quality metrics computed identically for both index types through
// their visit_nodes() walk:
//   coverage      sum of node MBR areas
//   overcoverage  per node, node MBR area minus the union of its entry MBRs
//   overlap       per node, pairwise intersection area of sibling entries

#include <concepts>
#include <ostream>

#include "mqr/geometry.hpp"
#include "mqr/mqr_tree.hpp"

namespace mqr {

template <class T>
concept IndexTree = requires(const T& t) {
  { t.stats() } -> std::same_as<TreeStats>;
  t.visit_nodes([](const NodeView&) {});
};

struct MetricsReport {
  std::size_t node_count = 0;
  std::size_t max_height = 0;
  double avg_path_length = 0.0;
  double space_utilization = 0.0;
  Area coverage = 0;
  Area overcoverage = 0;
  Area overlap = 0;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const MetricsReport& r) {
  return os << "nodes=" << r.node_count << " height=" << r.max_height << " avg_path=" << r.avg_path_length
            << " util=" << r.space_utilization << " coverage=" << r.coverage << " overcoverage=" << r.overcoverage
            << " overlap=" << r.overlap;
}

inline Area node_overcoverage(const MBR& node, std::span<const MBR> entries) {
  return node.area() - union_area(entries);
}

inline Area node_overlap(std::span<const MBR> entries) {
  Area total = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (std::size_t j = i + 1; j < entries.size(); ++j) total += intersection_area(entries[i], entries[j]);
  }
  return total;
}

template <IndexTree Tree>
Area coverage(const Tree& t) {
  Area total = 0;
  t.visit_nodes([&](const NodeView& v) { total += v.mbr.area(); });
  return total;
}

template <IndexTree Tree>
Area overcoverage(const Tree& t) {
  Area total = 0;
  t.visit_nodes([&](const NodeView& v) { total += node_overcoverage(v.mbr, v.entries); });
  return total;
}

template <IndexTree Tree>
Area overlap(const Tree& t) {
  Area total = 0;
  t.visit_nodes([&](const NodeView& v) { total += node_overlap(v.entries); });
  return total;
}

template <IndexTree Tree>
MetricsReport report(const Tree& t) {
  const TreeStats s = t.stats();
  MetricsReport r;
  r.node_count = s.node_count;
  r.max_height = s.max_height;
  r.avg_path_length = s.avg_path_length;
  r.space_utilization = s.space_utilization;
  t.visit_nodes([&](const NodeView& v) {
    r.coverage += v.mbr.area();
    r.overcoverage += node_overcoverage(v.mbr, v.entries);
    r.overlap += node_overlap(v.entries);
  });
  return r;
}

}  // namespace mqr
