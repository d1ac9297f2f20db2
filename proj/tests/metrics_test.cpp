#include <gtest/gtest.h>

#include <random>

#include "mqr/datagen.hpp"
#include "mqr/metrics.hpp"
#include "mqr/mqr_tree.hpp"
#include "mqr/rtree.hpp"
#include "support/oracles.hpp"

using namespace mqr;

namespace {

MqrTree single_node() {
  auto root = std::make_unique<Node>();
  root->mbr = MBR(0, 0, 10, 10);
  root->loc[index_of(Quadrant::SW)] = Entry{MBR(0, 0, 5, 10), ObjectId{1}};
  return MqrTree::adopt(std::move(root));
}

// Same shape as the worked insertion example, assembled by hand.
MqrTree worked_example() {
  auto leaf = std::make_unique<Node>();
  leaf->mbr = MBR(12, -10, 14, -4);
  leaf->loc[index_of(Quadrant::NW)] = Entry{MBR(12, -6, 14, -4), ObjectId{5}};
  leaf->loc[index_of(Quadrant::SE)] = Entry{MBR(12, -10, 14, -8), ObjectId{6}};
  auto root = std::make_unique<Node>();
  root->mbr = MBR(0, -12, 16, 16);
  root->loc[index_of(Quadrant::NW)] = Entry{MBR(0, 12, 4, 16), ObjectId{1}};
  root->loc[index_of(Quadrant::NE)] = Entry{MBR(12, 12, 16, 16), ObjectId{2}};
  root->loc[index_of(Quadrant::EQ)] = Entry{MBR(6, 0, 10, 4), ObjectId{3}};
  root->loc[index_of(Quadrant::SW)] = Entry{MBR(0, -12, 4, -8), ObjectId{4}};
  root->loc[index_of(Quadrant::SE)] = Entry{MBR(12, -10, 14, -4), std::move(leaf)};
  return MqrTree::adopt(std::move(root));
}

}  // namespace

TEST(Coverage, SumsNodeAreas) {
  EXPECT_EQ(coverage(single_node()), 100);
  auto leaf = std::make_unique<Node>();
  leaf->mbr = MBR(6, 6, 10, 10);
  leaf->loc[0] = Entry{MBR(9, 9, 10, 10), ObjectId{1}};
  leaf->loc[2] = Entry{MBR(6, 6, 7, 7), ObjectId{2}};
  auto root = std::make_unique<Node>();
  root->mbr = MBR(0, 0, 10, 10);
  root->loc[0] = Entry{MBR(6, 6, 10, 10), std::move(leaf)};
  root->loc[2] = Entry{MBR(0, 0, 1, 1), ObjectId{3}};
  EXPECT_EQ(coverage(MqrTree::adopt(std::move(root))), 116);
}

TEST(Overcoverage, Examples) {
  EXPECT_EQ(overcoverage(single_node()), 50);
  EXPECT_EQ(node_overcoverage(MBR(0, 0, 4, 4), std::vector<MBR>{MBR(0, 0, 2, 4), MBR(2, 0, 4, 4)}), 0);
  EXPECT_EQ(node_overcoverage(MBR(0, 0, 4, 4), std::vector<MBR>{MBR(0, 0, 4, 4)}), 0);
}

TEST(Overlap, Examples) {
  EXPECT_EQ(node_overlap(std::vector<MBR>{MBR(0, 0, 4, 4), MBR(2, 2, 6, 6)}), 4);
  EXPECT_EQ(node_overlap(std::vector<MBR>{MBR(0, 0, 4, 4), MBR(4, 0, 8, 4)}), 0);
}

TEST(Report, EmptyTree) {
  EXPECT_EQ(report(MqrTree{}), MetricsReport{});
  EXPECT_EQ(report(RTree{}), MetricsReport{});
}

TEST(Report, WorkedExampleByHand) {
  const MqrTree t = worked_example();
  const auto r = report(t);
  EXPECT_EQ(r.node_count, 2u);
  EXPECT_EQ(r.max_height, 2u);
  EXPECT_DOUBLE_EQ(r.avg_path_length, 8.0 / 6.0);
  EXPECT_DOUBLE_EQ(r.space_utilization, 0.7);
  EXPECT_EQ(r.coverage, 448 + 12);
  EXPECT_EQ(r.overcoverage, (448 - 76) + (12 - 8));
  EXPECT_EQ(r.overlap, 0);
  EXPECT_EQ(report(t), r);
}

TEST(Report, MatchesDumpRecomputation) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    GenConfig cfg;
    cfg.seed = seed;
    cfg.count = 500;
    const auto d = seed % 2 ? gen_uniform_squares(cfg) : gen_sloped_lines(cfg, true);
    MqrTree t;
    for (const auto& it : d.items) t.insert(it.id, it.mbr);
    const auto direct = report(t);
    const auto from_dump = oracle::metrics_from_dump(t.dump());
    EXPECT_EQ(direct.node_count, from_dump.node_count);
    EXPECT_EQ(direct.max_height, from_dump.max_height);
    EXPECT_EQ(direct.avg_path_length, from_dump.avg_path_length);
    EXPECT_EQ(direct.space_utilization, from_dump.space_utilization);
    EXPECT_EQ(direct.coverage, from_dump.coverage);
    EXPECT_EQ(direct.overcoverage, from_dump.overcoverage);
    EXPECT_EQ(direct.overlap, from_dump.overlap);
  }
}

TEST(Overcoverage, MatchesRasterOnSmallTrees) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<Coord> p(0, 60), s(0, 12);
  for (int trial = 0; trial < 20; ++trial) {
    MqrTree t;
    for (ObjectId i = 0; i < 60; ++i) {
      const Coord x = p(rng), y = p(rng);
      t.insert(i, MBR(x, y, x + s(rng), y + s(rng)));
    }
    Area raster = 0;
    t.visit_nodes([&](const NodeView& v) {
      raster += v.mbr.area() - oracle::raster_union(std::vector<MBR>(v.entries.begin(), v.entries.end()));
    });
    EXPECT_EQ(overcoverage(t), raster);
  }
}

TEST(Invariants, NonNegativeAndBounded) {
  GenConfig cfg;
  cfg.count = 700;
  for (Family f : {Family::uniform_squares, Family::expo_squares, Family::mixed_lines}) {
    const auto d = generate(f, cfg);
    MqrTree m;
    RTree r;
    for (const auto& it : d.items) {
      m.insert(it.id, it.mbr);
      r.insert(it.id, it.mbr);
    }
    for (const auto& rep : {report(m), report(r)}) {
      EXPECT_GE(rep.overlap, 0);
      EXPECT_GE(rep.overcoverage, 0);
      EXPECT_LE(rep.overcoverage, rep.coverage);
      EXPECT_GE(rep.space_utilization, 0.0);
      EXPECT_LE(rep.space_utilization, 1.0);
    }
  }
}
