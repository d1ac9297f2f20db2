#pragma once

// Structural checks for the mqr-tree. validate() returns every violation it
// finds instead of stopping at the first, so injected faults can be counted.

#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "mqr/geometry.hpp"
#include "mqr/mqr_tree.hpp"

namespace mqr {

enum class ViolationKind {
  enclosure,        // an entry MBR sticks out of the node MBR
  loose_mbr,        // node MBR larger than the merge of its entries
  quadrant,         // NORMAL entry in the wrong location
  center_centroid,  // CENTER resident off the node centroid, or a subtree in a CENTER node
  center_order,     // CENTER residents not packed into the leading slots
  fanout,           // too few entries
  parent_link,      // broken back-reference
  entry_mbr,        // subtree entry MBR differs from the child node MBR
  count,            // object/node counters disagree with the structure
  duplicate_id,
};

struct Violation {
  ViolationKind kind;
  std::string where;  // path of slot labels from the root, "/" for the root
  std::string detail;
};

inline std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::enclosure: return "enclosure";
    case ViolationKind::loose_mbr: return "loose_mbr";
    case ViolationKind::quadrant: return "quadrant";
    case ViolationKind::center_centroid: return "center_centroid";
    case ViolationKind::center_order: return "center_order";
    case ViolationKind::fanout: return "fanout";
    case ViolationKind::parent_link: return "parent_link";
    case ViolationKind::entry_mbr: return "entry_mbr";
    case ViolationKind::count: return "count";
    case ViolationKind::duplicate_id: return "duplicate_id";
  }
  return "?";
}

inline std::string format_violations(const std::vector<Violation>& vs) {
  std::ostringstream os;
  for (const auto& v : vs) os << to_string(v.kind) << " at " << v.where << ": " << v.detail << '\n';
  return os.str();
}

namespace detail {

class MqrValidator {
 public:
  std::vector<Violation> run(const MqrTree& tree) {
    if (const Node* root = tree.root()) {
      if (root->parent != nullptr) add(ViolationKind::parent_link, "/", "root has a parent");
      check(*root, "/", true);
    }
    if (objects_ != tree.object_count()) {
      add(ViolationKind::count, "/",
          "object_count " + std::to_string(tree.object_count()) + " but " + std::to_string(objects_) +
              " reachable");
    }
    if (nodes_ != tree.node_count()) {
      add(ViolationKind::count, "/",
          "node_count " + std::to_string(tree.node_count()) + " but " + std::to_string(nodes_) +
              " reachable");
    }
    const Node* root = tree.root();
    if (root && tree.object_count() > 1 && root->num_entries() < 2 && !root->next_center) {
      add(ViolationKind::fanout, "/", "root holds a single entry with more than one object indexed");
    }
    return std::move(out_);
  }

 private:
  void add(ViolationKind k, const std::string& where, std::string detail) {
    out_.push_back({k, where, std::move(detail)});
  }

  void check(const Node& n, const std::string& where, bool is_root) {
    ++nodes_;
    const auto merged = n.entries_mbr();
    if (!merged) {
      add(ViolationKind::fanout, where, "node has no entries");
    } else {
      bool enclosed = true;
      for (const auto& e : n.loc) {
        if (e && !n.mbr.contains(e->mbr)) enclosed = false;
      }
      if (n.next_center && !n.mbr.contains(n.next_center->mbr)) enclosed = false;
      if (!enclosed) {
        std::ostringstream os;
        os << "node MBR " << n.mbr << " does not enclose its entries " << *merged;
        add(ViolationKind::enclosure, where, os.str());
      } else if (!(*merged == n.mbr)) {
        std::ostringstream os;
        os << "node MBR " << n.mbr << " but entries merge to " << *merged;
        add(ViolationKind::loose_mbr, where, os.str());
      }
    }

    if (!is_root && !n.is_chain_link() && n.num_entries() + (n.next_center ? 1 : 0) < 2) {
      add(ViolationKind::fanout, where, "non-root node with " + std::to_string(n.num_entries()) + " entries");
    }
    if (n.next_center && n.kind != NodeKind::center) {
      add(ViolationKind::center_centroid, where, "NORMAL node carries a CENTER list link");
    }

    bool gap = false;
    for (std::size_t s = 0; s < kQuadrantCount; ++s) {
      const auto& e = n.loc[s];
      const std::string child_where = where + MqrTree::slot_label(n, s) + "/";
      if (!e) {
        gap = true;
        continue;
      }
      if (n.kind == NodeKind::normal) {
        const Quadrant want = find_insert_quad(e->mbr, n.mbr);
        if (want != static_cast<Quadrant>(s)) {
          std::ostringstream os;
          os << "entry " << e->mbr << " stored at " << static_cast<Quadrant>(s) << " belongs at " << want;
          add(ViolationKind::quadrant, where, os.str());
        }
      } else {
        if (gap) add(ViolationKind::center_order, where, "resident after an empty slot");
        if (!e->is_object()) {
          add(ViolationKind::center_centroid, where, "CENTER node references a subtree");
        } else if (!(centroid(e->mbr) == centroid(n.mbr))) {
          std::ostringstream os;
          os << "resident centroid " << centroid(e->mbr) << " differs from node centroid " << centroid(n.mbr);
          add(ViolationKind::center_centroid, where, os.str());
        }
      }

      if (e->is_object()) {
        ++objects_;
        if (++seen_[e->object()] == 2) {
          add(ViolationKind::duplicate_id, where, "object " + std::to_string(e->object()) + " indexed twice");
        }
        continue;
      }
      const Node& child = e->child();
      if (child.parent != &n || child.parent_slot != s) {
        add(ViolationKind::parent_link, child_where, "child does not point back at its parent slot");
      }
      if (!(child.mbr == e->mbr)) {
        std::ostringstream os;
        os << "entry MBR " << e->mbr << " but child MBR " << child.mbr;
        add(ViolationKind::entry_mbr, where, os.str());
      }
      check(child, child_where, false);
    }

    if (n.next_center) {
      const Node& link = *n.next_center;
      const std::string link_where = where + "NEXT/";
      if (link.parent != &n || link.parent_slot != kChainSlot) {
        add(ViolationKind::parent_link, link_where, "CENTER link does not point back at its head");
      }
      if (link.kind != NodeKind::center) {
        add(ViolationKind::center_centroid, link_where, "CENTER list link is not a CENTER node");
      } else if (!(centroid(link.mbr) == centroid(n.mbr))) {
        add(ViolationKind::center_centroid, link_where, "CENTER list link centroid differs from head");
      }
      check(link, link_where, false);
    }
  }

  std::vector<Violation> out_;
  std::size_t objects_ = 0;
  std::size_t nodes_ = 0;
  std::unordered_map<ObjectId, int> seen_;
};

}  // namespace detail

/// Every structural violation in `tree`; empty means valid.
inline std::vector<Violation> validate(const MqrTree& tree) { return detail::MqrValidator{}.run(tree); }

/// A NORMAL entry whose MBR has more than half of its area outside the closed
/// quarter-plane of its location. Reported as a warning only.
struct QuadrantMajorityWarning {
  Quadrant quad;
  MBR entry;
  Point node_centroid;
  Area inside;
};

inline std::vector<QuadrantMajorityWarning> quadrant_majority_warnings(const MqrTree& tree) {
  std::vector<QuadrantMajorityWarning> out;
  if (!tree.root()) return out;
  MqrTree::walk(*tree.root(), 1, [&](const Node& n, std::size_t) {
    if (n.kind != NodeKind::normal) return;
    const Point c = centroid(n.mbr);
    for (Quadrant q : {Quadrant::NE, Quadrant::NW, Quadrant::SW, Quadrant::SE}) {
      const auto& e = n.at(q);
      if (!e) continue;
      const MBR& m = e->mbr;
      // Closed quarter-plane at c, clipped to the entry itself.
      Coord lx = m.lx(), ly = m.ly(), hx = m.hx(), hy = m.hy();
      if (q == Quadrant::NE || q == Quadrant::SE) lx = std::max(lx, c.x);
      if (q == Quadrant::NW || q == Quadrant::SW) hx = std::min(hx, c.x);
      if (q == Quadrant::NE || q == Quadrant::NW) ly = std::max(ly, c.y);
      if (q == Quadrant::SW || q == Quadrant::SE) hy = std::min(hy, c.y);
      const Area inside = (lx <= hx && ly <= hy) ? (hx - lx) * (hy - ly) : 0;
      if (2 * inside < m.area()) out.push_back({q, m, c, inside});
    }
  });
  return out;
}

}  // namespace mqr
