#pragma once

// The mqr-tree: five-location nodes (NE, NW, SW, SE, EQ) whose entries are
// placed by the orientation of their centroid relative to the node MBR
// centroid. Insertion keeps every node on the insertion path valid by pulling
// out the objects whose quadrant changed when the node centroid moved and
// re-inserting them into the same node.

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "mqr/geometry.hpp"

namespace mqr {

using ObjectId = std::uint64_t;

class DuplicateObjectError : public std::invalid_argument {
 public:
  explicit DuplicateObjectError(ObjectId id)
      : std::invalid_argument("object id " + std::to_string(id) + " is already indexed"),
        id_(id) {}
  ObjectId id() const { return id_; }

 private:
  ObjectId id_;
};

enum class NodeKind : std::uint8_t { normal, center };

class Node;

/// (MBR, object) or (MBR, subtree). For a subtree the MBR always equals the
/// child's node MBR.
struct Entry {
  MBR mbr;
  std::variant<ObjectId, std::unique_ptr<Node>> payload;

  bool is_object() const { return std::holds_alternative<ObjectId>(payload); }
  ObjectId object() const { return std::get<ObjectId>(payload); }
  Node& child() const { return *std::get<std::unique_ptr<Node>>(payload); }
};

/// Slot index used in Node::parent_slot for a CENTER overflow link.
inline constexpr std::size_t kChainSlot = kQuadrantCount;

class Node {
 public:
  NodeKind kind = NodeKind::normal;
  /// Indexed by Quadrant for NORMAL nodes; filled linearly for CENTER nodes.
  std::array<std::optional<Entry>, kQuadrantCount> loc;
  MBR mbr;
  Node* parent = nullptr;
  std::size_t parent_slot = 0;
  /// Next node of a CENTER list; only CENTER nodes carry one.
  std::unique_ptr<Node> next_center;

  std::optional<Entry>& at(Quadrant q) { return loc[index_of(q)]; }
  const std::optional<Entry>& at(Quadrant q) const { return loc[index_of(q)]; }

  std::size_t num_entries() const {
    return static_cast<std::size_t>(
        std::count_if(loc.begin(), loc.end(), [](const auto& e) { return e.has_value(); }));
  }
  bool is_chain_link() const { return parent_slot == kChainSlot && parent != nullptr; }

  /// Merge of all entry MBRs plus the CENTER list tail, if any.
  std::optional<MBR> entries_mbr() const {
    std::optional<MBR> out;
    for (const auto& e : loc) {
      if (e) out = out ? merge_mbrs(*out, e->mbr) : e->mbr;
    }
    if (next_center) out = out ? merge_mbrs(*out, next_center->mbr) : next_center->mbr;
    return out;
  }
};

/// One queued (re)insertion: an object and the quadrant it is headed for.
struct InsertItem {
  Quadrant quad;
  ObjectId id;
  MBR mbr;
};

using InsertQueue = std::deque<InsertItem>;

struct SearchResult {
  std::vector<ObjectId> ids;  // ascending
  std::size_t disk_accesses = 0;
};

struct TreeStats {
  std::size_t node_count = 0;
  std::size_t max_height = 0;
  double avg_path_length = 0.0;
  double space_utilization = 0.0;

  friend bool operator==(const TreeStats&, const TreeStats&) = default;
};

/// Flattened view of one node for metric computations shared with the R-tree.
struct NodeView {
  const MBR& mbr;
  std::span<const MBR> entries;
};

class MqrTree {
 public:
  MqrTree() = default;
  MqrTree(MqrTree&&) noexcept = default;
  MqrTree& operator=(MqrTree&&) noexcept = default;

  /// Takes ownership of a hand-built structure; counts are recomputed from it
  /// and parent links are rewired. Used by tests and tools that need a
  /// specific shape.
  static MqrTree adopt(std::unique_ptr<Node> root) {
    MqrTree t;
    t.root_ = std::move(root);
    if (t.root_) {
      t.root_->parent = nullptr;
      t.relink(*t.root_);
    }
    return t;
  }

  void insert(ObjectId id, const MBR& mbr) {
    if (!ids_.insert(id).second) throw DuplicateObjectError(id);
    if (!root_) {
      root_ = std::make_unique<Node>();
      node_count_ = 1;
    }
    insert_at(*root_, id, mbr);
    ++object_count_;
  }

  std::size_t object_count() const { return object_count_; }
  std::size_t node_count() const { return node_count_; }
  bool empty() const { return root_ == nullptr; }
  bool contains(ObjectId id) const { return ids_.count(id) != 0; }

  const Node* root() const { return root_.get(); }
  Node* root() { return root_.get(); }

  // --- insertion pipeline ----------------------------------------------------

  /// Insert one object into the subtree rooted at `n`.
  void insert_at(Node& n, ObjectId id, const MBR& mbr) {
    if (n.num_entries() == 0 && !n.next_center) {
      n.kind = NodeKind::normal;
      n.mbr = mbr;
      n.at(Quadrant::EQ) = Entry{mbr, id};
      return;
    }
    const MBR orig = n.mbr;
    n.mbr = merge_mbrs(n.mbr, mbr);

    InsertQueue q;
    q.push_back({find_insert_quad(mbr, n.mbr), id, mbr});
    find_shifted_objs(q, n, orig);
    insert_queue(n, q);
  }

  /// Queue every object of `n` that no longer sits in its proper quadrant
  /// now that n.mbr has changed from `orig_mbr`.
  void find_shifted_objs(InsertQueue& q, Node& n, const MBR& orig_mbr) {
    if (n.kind == NodeKind::center) {
      // A CENTER node splits as soon as a queued object has another
      // centroid, even if floor rounding keeps the node centroid in place.
      const Point c0 = centroid(orig_mbr);
      const bool foreign = std::any_of(q.begin(), q.end(),
                                       [&](const InsertItem& i) { return !(centroid(i.mbr) == c0); });
      if (!foreign) return;
      const Quadrant quad = find_insert_quad(orig_mbr, n.mbr);
      for (std::size_t s = 0; s < kQuadrantCount; ++s) {
        remove_and_q_objects(q, quad, n, s, n.mbr);
      }
      if (n.next_center) {
        Node& link = *n.next_center;
        drain_into(q, quad, link, n.mbr);
        adjust_node(link);
      }
      n.kind = NodeKind::normal;
      return;
    }

    if (find_insert_quad(n.mbr, orig_mbr) == Quadrant::EQ) return;
    for (const auto& shift : shifted_subregions(orig_mbr, n.mbr)) {
      if (!shift.region) continue;
      remove_and_q_objects(q, shift.dest, n, index_of(shift.source), *shift.region);
    }
  }

  /// Detach every object reachable from `owner.loc[slot]` whose centroid lies
  /// in `region`, queueing it toward `dest`. Subtrees that lose entries are
  /// repaired (shrunk, collapsed or deleted) on the way back up.
  void remove_and_q_objects(InsertQueue& q, Quadrant dest, Node& owner, std::size_t slot,
                            const MBR& region) {
    auto& loc = owner.loc[slot];
    if (!loc) return;
    if (loc->is_object()) {
      if (centroid_within(loc->mbr, region)) {
        q.push_back({dest, loc->object(), loc->mbr});
        loc.reset();
      }
      return;
    }
    Node& child = loc->child();
    if (!overlaps(child.mbr, region)) return;
    drain_into(q, dest, child, region);
    adjust_node(child);
  }

  /// Bring `n` back in line after entries were detached below it: delete it
  /// if empty, splice it out if only one entry is left, otherwise recompute
  /// its MBR and relocate residents whose quadrant changed because the node
  /// contracted. The parent's entry MBR is refreshed; the parent itself is
  /// repaired by its own caller.
  void adjust_node(Node& n) {
    Node* parent = n.parent;
    const std::size_t slot = n.parent_slot;

    if (n.num_entries() == 0 && n.next_center) {
      // Promote the CENTER list tail into this node.
      std::unique_ptr<Node> tail = std::move(n.next_center);
      n.loc = std::move(tail->loc);
      n.next_center = std::move(tail->next_center);
      relink_children(n);
      --node_count_;
    }

    if (n.num_entries() == 0) {
      if (parent == nullptr) return;  // root; refilled by the caller
      --node_count_;
      if (slot == kChainSlot) {
        parent->next_center.reset();
      } else {
        parent->loc[slot].reset();
      }
      return;
    }

    if (n.num_entries() == 1 && !n.next_center && parent != nullptr && slot != kChainSlot) {
      auto it = std::find_if(n.loc.begin(), n.loc.end(), [](const auto& e) { return e.has_value(); });
      Entry single = std::move(**it);
      it->reset();
      if (!single.is_object()) {
        single.child().parent = parent;
        single.child().parent_slot = slot;
      }
      --node_count_;
      parent->loc[slot] = std::move(single);  // destroys n
      return;
    }

    const MBR before = n.mbr;
    n.mbr = *n.entries_mbr();
    if (parent != nullptr && slot != kChainSlot) parent->loc[slot]->mbr = n.mbr;
    if (n.mbr == before || n.kind == NodeKind::center) return;
    if (centroid(n.mbr) == centroid(before)) return;

    InsertQueue q;
    for (const auto& shift : shifted_subregions(before, n.mbr)) {
      if (!shift.region) continue;
      remove_and_q_objects(q, shift.dest, n, index_of(shift.source), *shift.region);
    }
    insert_queue(n, q);
  }

  /// Place every queued object into `n` according to its destination.
  void insert_queue(Node& n, InsertQueue& q) {
    while (!q.empty()) {
      InsertItem item = q.front();
      q.pop_front();

      if (n.kind == NodeKind::center) {
        insert_center(n, item);
        continue;
      }

      auto& loc = n.at(item.quad);
      if (!loc) {
        loc = Entry{item.mbr, item.id};
        continue;
      }
      if (!loc->is_object()) {
        Node& child = loc->child();
        insert_at(child, item.id, item.mbr);
        loc->mbr = child.mbr;
        continue;
      }
      // Converting is only sound when nothing else still waits for a
      // quadrant of this node.
      if (item.quad == Quadrant::EQ && n.num_entries() == 1 &&
          std::all_of(q.begin(), q.end(), [](const InsertItem& i) { return i.quad == Quadrant::EQ; })) {
        n.kind = NodeKind::center;
        q.push_back(item);
        continue;
      }
      // Two objects collide in one location: push both down into a new node.
      const ObjectId resident_id = loc->object();
      const MBR resident_mbr = loc->mbr;
      auto fresh = std::make_unique<Node>();
      ++node_count_;
      insert_at(*fresh, item.id, item.mbr);
      insert_at(*fresh, resident_id, resident_mbr);
      fresh->parent = &n;
      fresh->parent_slot = index_of(item.quad);
      const MBR fresh_mbr = fresh->mbr;
      loc = Entry{fresh_mbr, std::move(fresh)};
    }
  }

  /// First unoccupied slot of a CENTER node in linear order.
  static std::optional<std::size_t> next_ctr_loc(const Node& n) {
    for (std::size_t s = 0; s < kQuadrantCount; ++s) {
      if (!n.loc[s]) return s;
    }
    return std::nullopt;
  }

  /// Compact CENTER residents to the front ordered by area (largest first),
  /// then corners, then object id.
  static void sort_ctr(Node& n) {
    std::vector<Entry> residents;
    for (auto& e : n.loc) {
      if (e) residents.push_back(std::move(*e));
      e.reset();
    }
    std::sort(residents.begin(), residents.end(), [](const Entry& a, const Entry& b) {
      if (a.mbr.area() != b.mbr.area()) return a.mbr.area() > b.mbr.area();
      if (!(a.mbr == b.mbr)) return corner_less(a.mbr, b.mbr);
      return a.object() < b.object();
    });
    for (std::size_t i = 0; i < residents.size(); ++i) n.loc[i] = std::move(residents[i]);
  }

  // --- queries -------------------------------------------------------------

  /// Objects whose MBR overlaps `region`, plus the number of nodes examined.
  /// The root is always examined on a nonempty tree.
  SearchResult region_search(const MBR& region) const {
    SearchResult out;
    if (!root_) return out;
    search_node(*root_, region, out);
    std::sort(out.ids.begin(), out.ids.end());
    return out;
  }

  /// Heights count nodes: a single-node tree has height 1. CENTER list links
  /// count as one level each.
  TreeStats stats() const {
    TreeStats s;
    if (!root_) return s;
    std::size_t occupied = 0;
    std::size_t path_sum = 0;
    std::size_t objects = 0;
    walk(*root_, 1, [&](const Node& n, std::size_t depth) {
      ++s.node_count;
      occupied += n.num_entries();
      for (const auto& e : n.loc) {
        if (e && e->is_object()) {
          ++objects;
          path_sum += depth;
          s.max_height = std::max(s.max_height, depth);
        }
      }
    });
    s.avg_path_length = objects ? static_cast<double>(path_sum) / static_cast<double>(objects) : 0.0;
    s.space_utilization = static_cast<double>(occupied) /
                          (static_cast<double>(s.node_count) * static_cast<double>(kQuadrantCount));
    return s;
  }

  /// Calls f(NodeView) for every node, pre-order. A CENTER list link is an
  /// entry of the node it hangs off.
  template <class F>
  void visit_nodes(F&& f) const {
    if (!root_) return;
    std::vector<MBR> entries;
    walk(*root_, 1, [&](const Node& n, std::size_t) {
      entries.clear();
      for (const auto& e : n.loc) {
        if (e) entries.push_back(e->mbr);
      }
      if (n.next_center) entries.push_back(n.next_center->mbr);
      f(NodeView{n.mbr, entries});
    });
  }

  /// Pre-order traversal with 1-based depth.
  template <class F>
  static void walk(const Node& n, std::size_t depth, F&& f) {
    f(n, depth);
    for (const auto& e : n.loc) {
      if (e && !e->is_object()) walk(e->child(), depth + 1, f);
    }
    if (n.next_center) walk(*n.next_center, depth + 1, f);
  }

  /// Canonical line-per-node rendering. Indentation (two spaces) is depth;
  /// each line is `KIND lx ly hx hy` followed by the occupied locations in
  /// NE,NW,SW,SE,EQ order (C0..C4 for CENTER nodes) and `NEXT:(node)` for a
  /// CENTER list link. Child lines follow their parent in the same order.
  std::string dump() const {
    if (!root_) return "(empty)\n";
    std::ostringstream os;
    walk(*root_, 0, [&](const Node& n, std::size_t depth) {
      os << std::string(depth * 2, ' ') << (n.kind == NodeKind::center ? "CENTER" : "NORMAL") << ' '
         << n.mbr.lx() << ' ' << n.mbr.ly() << ' ' << n.mbr.hx() << ' ' << n.mbr.hy();
      for (std::size_t s = 0; s < kQuadrantCount; ++s) {
        const auto& e = n.loc[s];
        if (!e) continue;
        os << ' ' << slot_label(n, s) << ":(";
        if (e->is_object()) {
          os << "obj " << e->object() << ' ' << e->mbr.lx() << ' ' << e->mbr.ly() << ' '
             << e->mbr.hx() << ' ' << e->mbr.hy() << ')';
        } else {
          os << "node)";
        }
      }
      if (n.next_center) os << " NEXT:(node)";
      os << '\n';
    });
    return os.str();
  }

  static std::string slot_label(const Node& n, std::size_t slot) {
    if (n.kind == NodeKind::center) return "C" + std::to_string(slot);
    return std::string(to_string(static_cast<Quadrant>(slot)));
  }

 private:
  void drain_into(InsertQueue& q, Quadrant dest, Node& n, const MBR& region) {
    for (std::size_t s = 0; s < kQuadrantCount; ++s) remove_and_q_objects(q, dest, n, s, region);
    if (n.next_center && overlaps(n.next_center->mbr, region)) {
      Node& link = *n.next_center;
      drain_into(q, dest, link, region);
      adjust_node(link);
    }
  }

  void insert_center(Node& n, const InsertItem& item) {
    if (auto s = next_ctr_loc(n)) {
      n.loc[*s] = Entry{item.mbr, item.id};
      sort_ctr(n);
      return;
    }
    if (!n.next_center) {
      auto link = std::make_unique<Node>();
      ++node_count_;
      link->kind = NodeKind::center;
      link->mbr = item.mbr;
      link->loc[0] = Entry{item.mbr, item.id};
      link->parent = &n;
      link->parent_slot = kChainSlot;
      n.next_center = std::move(link);
    } else {
      Node& link = *n.next_center;
      link.mbr = merge_mbrs(link.mbr, item.mbr);
      insert_center(link, item);
    }
    n.mbr = merge_mbrs(n.mbr, n.next_center->mbr);
  }

  void search_node(const Node& n, const MBR& region, SearchResult& out) const {
    ++out.disk_accesses;
    for (const auto& e : n.loc) {
      if (!e || !overlaps(e->mbr, region)) continue;
      if (e->is_object()) {
        out.ids.push_back(e->object());
      } else {
        search_node(e->child(), region, out);
      }
    }
    if (n.next_center && overlaps(n.next_center->mbr, region)) search_node(*n.next_center, region, out);
  }

  static void relink_children(Node& n) {
    for (std::size_t s = 0; s < kQuadrantCount; ++s) {
      if (n.loc[s] && !n.loc[s]->is_object()) {
        n.loc[s]->child().parent = &n;
        n.loc[s]->child().parent_slot = s;
      }
    }
    if (n.next_center) {
      n.next_center->parent = &n;
      n.next_center->parent_slot = kChainSlot;
    }
  }

  void relink(Node& n) {
    ++node_count_;
    relink_children(n);
    for (auto& e : n.loc) {
      if (!e) continue;
      if (e->is_object()) {
        ids_.insert(e->object());
        ++object_count_;
      } else {
        relink(e->child());
      }
    }
    if (n.next_center) relink(*n.next_center);
  }

  std::unique_ptr<Node> root_;
  std::size_t object_count_ = 0;
  std::size_t node_count_ = 0;
  std::unordered_set<ObjectId> ids_;
};

}  // namespace mqr
