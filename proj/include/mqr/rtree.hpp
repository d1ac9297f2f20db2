#pragma once

// Guttman R-tree used as the comparison baseline: ChooseLeaf by least
// enlargement, quadratic split, AdjustTree. Search and node-visit accounting
// follow the same contract as MqrTree::region_search.

#include <algorithm>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "mqr/geometry.hpp"
#include "mqr/mqr_tree.hpp"
#include "mqr/validate.hpp"

namespace mqr {

struct RTreeParams {
  std::size_t max_entries = 5;  // M
  std::size_t min_entries = 2;  // m

  void check() const {
    if (max_entries < 2 || min_entries < 1 || min_entries > max_entries / 2) {
      throw std::invalid_argument("R-tree parameters need M >= 2 and 1 <= m <= M/2");
    }
  }
};

struct RNode;

struct REntry {
  MBR mbr;
  ObjectId id = 0;                // leaf entries
  std::unique_ptr<RNode> child;  // internal entries
};

struct RNode {
  bool is_leaf = true;
  std::vector<REntry> entries;
  RNode* parent = nullptr;

  MBR cover() const {
    MBR m = entries.front().mbr;
    for (const auto& e : entries) m = merge_mbrs(m, e.mbr);
    return m;
  }
};

class RTree {
 public:
  explicit RTree(RTreeParams params = {}) : params_(params) { params_.check(); }
  RTree(RTree&&) noexcept = default;
  RTree& operator=(RTree&&) noexcept = default;

  const RTreeParams& params() const { return params_; }
  std::size_t object_count() const { return object_count_; }
  std::size_t node_count() const { return node_count_; }
  const RNode* root() const { return root_.get(); }

  /// Levels from root to leaves, counting nodes (a lone leaf root is 1).
  std::size_t height() const {
    std::size_t h = 0;
    for (const RNode* n = root_.get(); n; n = n->is_leaf ? nullptr : n->entries.front().child.get()) ++h;
    return h;
  }

  void insert(ObjectId id, const MBR& mbr) {
    if (!ids_.insert(id).second) throw DuplicateObjectError(id);
    if (!root_) {
      root_ = std::make_unique<RNode>();
      node_count_ = 1;
    }
    RNode* leaf = choose_leaf(mbr);
    leaf->entries.push_back(REntry{mbr, id, nullptr});
    std::unique_ptr<RNode> split;
    if (leaf->entries.size() > params_.max_entries) split = split_node(*leaf);
    adjust_tree(leaf, std::move(split));
    ++object_count_;
  }

  SearchResult region_search(const MBR& region) const {
    SearchResult out;
    if (!root_) return out;
    search_node(*root_, region, out);
    std::sort(out.ids.begin(), out.ids.end());
    return out;
  }

  /// For a balanced tree max height and average path length coincide.
  TreeStats stats() const {
    TreeStats s;
    if (!root_) return s;
    std::size_t total = 0;
    walk(*root_, [&](const RNode& n) {
      ++s.node_count;
      total += n.entries.size();
    });
    s.max_height = height();
    s.avg_path_length = static_cast<double>(s.max_height);
    s.space_utilization = static_cast<double>(total) /
                          (static_cast<double>(s.node_count) * static_cast<double>(params_.max_entries));
    return s;
  }

  template <class F>
  void visit_nodes(F&& f) const {
    if (!root_) return;
    std::vector<MBR> entries;
    walk(*root_, [&](const RNode& n) {
      entries.clear();
      for (const auto& e : n.entries) entries.push_back(e.mbr);
      const MBR cover = n.cover();
      f(NodeView{cover, entries});
    });
  }

  template <class F>
  static void walk(const RNode& n, F&& f) {
    f(n);
    if (n.is_leaf) return;
    for (const auto& e : n.entries) walk(*e.child, f);
  }

 private:
  static Area enlargement(const MBR& base, const MBR& add) { return merge_mbrs(base, add).area() - base.area(); }

  RNode* choose_leaf(const MBR& mbr) {
    RNode* n = root_.get();
    while (!n->is_leaf) {
      std::size_t best = 0;
      Area best_growth = std::numeric_limits<Area>::max();
      Area best_area = std::numeric_limits<Area>::max();
      for (std::size_t i = 0; i < n->entries.size(); ++i) {
        const MBR& m = n->entries[i].mbr;
        const Area growth = enlargement(m, mbr);
        if (growth < best_growth || (growth == best_growth && m.area() < best_area)) {
          best = i;
          best_growth = growth;
          best_area = m.area();
        }
      }
      n = n->entries[best].child.get();
    }
    return n;
  }

  /// Quadratic split: moves part of `n`'s entries into a new sibling.
  std::unique_ptr<RNode> split_node(RNode& n) {
    std::vector<REntry> pool = std::move(n.entries);
    n.entries.clear();

    // PickSeeds: the pair wasting the most area if grouped together.
    std::size_t s1 = 0, s2 = 1;
    Area worst = std::numeric_limits<Area>::min();
    for (std::size_t i = 0; i < pool.size(); ++i) {
      for (std::size_t j = i + 1; j < pool.size(); ++j) {
        const Area d = merge_mbrs(pool[i].mbr, pool[j].mbr).area() - pool[i].mbr.area() - pool[j].mbr.area();
        if (d > worst) {
          worst = d;
          s1 = i;
          s2 = j;
        }
      }
    }

    auto sibling = std::make_unique<RNode>();
    sibling->is_leaf = n.is_leaf;
    ++node_count_;
    std::vector<REntry>* groups[2] = {&n.entries, &sibling->entries};
    MBR cover[2] = {pool[s1].mbr, pool[s2].mbr};
    groups[0]->push_back(std::move(pool[s1]));
    groups[1]->push_back(std::move(pool[s2]));
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(s2));
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(s1));

    const std::size_t m = params_.min_entries;
    while (!pool.empty()) {
      // If one group needs every remaining entry to reach m, hand them over.
      for (int g = 0; g < 2; ++g) {
        if (groups[g]->size() + pool.size() == m) {
          for (auto& e : pool) {
            cover[g] = merge_mbrs(cover[g], e.mbr);
            groups[g]->push_back(std::move(e));
          }
          pool.clear();
          break;
        }
      }
      if (pool.empty()) break;

      // PickNext: strongest preference for one group.
      std::size_t next = 0;
      Area best_diff = -1;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        const Area d0 = enlargement(cover[0], pool[i].mbr);
        const Area d1 = enlargement(cover[1], pool[i].mbr);
        const Area diff = d0 > d1 ? d0 - d1 : d1 - d0;
        if (diff > best_diff) {
          best_diff = diff;
          next = i;
        }
      }
      const Area d0 = enlargement(cover[0], pool[next].mbr);
      const Area d1 = enlargement(cover[1], pool[next].mbr);
      int g;
      if (d0 != d1) {
        g = d0 < d1 ? 0 : 1;
      } else if (cover[0].area() != cover[1].area()) {
        g = cover[0].area() < cover[1].area() ? 0 : 1;
      } else {
        g = groups[0]->size() <= groups[1]->size() ? 0 : 1;
      }
      cover[g] = merge_mbrs(cover[g], pool[next].mbr);
      groups[g]->push_back(std::move(pool[next]));
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(next));
    }

    if (!n.is_leaf) {
      for (auto& e : n.entries) e.child->parent = &n;
      for (auto& e : sibling->entries) e.child->parent = sibling.get();
    }
    return sibling;
  }

  void adjust_tree(RNode* n, std::unique_ptr<RNode> split) {
    while (n->parent) {
      RNode* parent = n->parent;
      for (auto& e : parent->entries) {
        if (e.child.get() == n) {
          e.mbr = n->cover();
          break;
        }
      }
      std::unique_ptr<RNode> parent_split;
      if (split) {
        split->parent = parent;
        const MBR cover = split->cover();
        parent->entries.push_back(REntry{cover, 0, std::move(split)});
        if (parent->entries.size() > params_.max_entries) parent_split = split_node(*parent);
      }
      n = parent;
      split = std::move(parent_split);
    }
    if (split) {
      auto new_root = std::make_unique<RNode>();
      new_root->is_leaf = false;
      ++node_count_;
      const MBR left = root_->cover();
      const MBR right = split->cover();
      root_->parent = new_root.get();
      split->parent = new_root.get();
      new_root->entries.push_back(REntry{left, 0, std::move(root_)});
      new_root->entries.push_back(REntry{right, 0, std::move(split)});
      root_ = std::move(new_root);
    }
  }

  void search_node(const RNode& n, const MBR& region, SearchResult& out) const {
    ++out.disk_accesses;
    for (const auto& e : n.entries) {
      if (!overlaps(e.mbr, region)) continue;
      if (n.is_leaf) {
        out.ids.push_back(e.id);
      } else {
        search_node(*e.child, region, out);
      }
    }
  }

  RTreeParams params_;
  std::unique_ptr<RNode> root_;
  std::size_t object_count_ = 0;
  std::size_t node_count_ = 0;
  std::unordered_set<ObjectId> ids_;
};

namespace detail {

inline void check_rnode(const RTree& tree, const RNode& n, const std::string& where, std::size_t depth,
                        std::optional<std::size_t>& leaf_depth, std::size_t& objects, std::size_t& nodes,
                        std::vector<Violation>& out) {
  ++nodes;
  const auto& p = tree.params();
  const bool is_root = (&n == tree.root());
  if (n.entries.size() > p.max_entries) {
    out.push_back({ViolationKind::fanout, where, "node over capacity"});
  }
  if (is_root) {
    if (!n.is_leaf && n.entries.size() < 2) out.push_back({ViolationKind::fanout, where, "internal root with < 2 entries"});
    if (n.entries.empty()) out.push_back({ViolationKind::fanout, where, "empty root"});
  } else if (n.entries.size() < p.min_entries) {
    out.push_back({ViolationKind::fanout, where, "node below minimum fill"});
  }
  if (n.is_leaf) {
    objects += n.entries.size();
    if (!leaf_depth) {
      leaf_depth = depth;
    } else if (*leaf_depth != depth) {
      out.push_back({ViolationKind::fanout, where, "leaves at unequal depth"});
    }
    return;
  }
  for (std::size_t i = 0; i < n.entries.size(); ++i) {
    const auto& e = n.entries[i];
    const std::string child_where = where + std::to_string(i) + "/";
    if (!e.child) {
      out.push_back({ViolationKind::entry_mbr, where, "internal entry without child"});
      continue;
    }
    if (e.child->parent != &n) out.push_back({ViolationKind::parent_link, child_where, "bad parent pointer"});
    if (!e.child->entries.empty() && !(e.child->cover() == e.mbr)) {
      out.push_back({ViolationKind::entry_mbr, where, "entry MBR differs from child cover"});
    }
    check_rnode(tree, *e.child, child_where, depth + 1, leaf_depth, objects, nodes, out);
  }
}

}  // namespace detail

/// Balance, fan-out bounds, parent links, entry/child MBR agreement, counts.
inline std::vector<Violation> validate(const RTree& tree) {
  std::vector<Violation> out;
  std::size_t objects = 0, nodes = 0;
  std::optional<std::size_t> leaf_depth;
  if (tree.root()) detail::check_rnode(tree, *tree.root(), "/", 1, leaf_depth, objects, nodes, out);
  if (objects != tree.object_count()) out.push_back({ViolationKind::count, "/", "object count mismatch"});
  if (nodes != tree.node_count()) out.push_back({ViolationKind::count, "/", "node count mismatch"});
  return out;
}

}  // namespace mqr
