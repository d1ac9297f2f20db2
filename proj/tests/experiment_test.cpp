#include <gtest/gtest.h>

#include <sstream>

#include "mqr/datagen.hpp"
#include "mqr/experiment.hpp"
#include "support/oracles.hpp"

using namespace mqr;

namespace {

Dataset points(std::size_t n, std::uint64_t seed = 1) {
  GenConfig c;
  c.count = n;
  c.seed = seed;
  return gen_uniform_points(c);
}

Dataset squares(std::size_t n, std::uint64_t seed = 1) {
  GenConfig c;
  c.count = n;
  c.seed = seed;
  return gen_uniform_squares(c);
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  write_results_csv(os, rows);
  return os.str();
}

std::vector<ResultRow> only(const std::vector<ResultRow>& rows, IndexKind k) {
  std::vector<ResultRow> out;
  for (const auto& r : rows) {
    if (r.index == k) out.push_back(r);
  }
  return out;
}

}  // namespace

TEST(Spec, Checks) {
  ExperimentSpec s;
  s.orders = 0;
  EXPECT_THROW(s.check(), std::invalid_argument);
  s.orders = 1;
  s.query_extent_fraction = 0.0;
  EXPECT_THROW(s.check(), std::invalid_argument);
  s.query_extent_fraction = 1.5;
  EXPECT_THROW(s.check(), std::invalid_argument);
  s.query_extent_fraction = 1.0;
  EXPECT_NO_THROW(s.check());
  EXPECT_THROW(parse_index_choice("kd"), std::invalid_argument);
}

TEST(Experiment, DistinctPointOrdersGiveIdenticalMqrMetrics) {
  ExperimentSpec s;
  s.orders = 2;
  s.searches = 5;
  s.index = IndexChoice::mqr;
  const auto rows = run_experiment(points(400), s);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].metrics, rows[1].metrics);
  EXPECT_EQ(rows[0].avg_disk_hits, rows[1].avg_disk_hits);
}

TEST(Experiment, NoSearchesStillReportsMetrics) {
  ExperimentSpec s;
  s.orders = 1;
  s.searches = 0;
  const auto rows = run_experiment(squares(200), s);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.avg_found, 0.0);
    EXPECT_EQ(r.avg_disk_hits, 0.0);
    EXPECT_GT(r.metrics.node_count, 0u);
  }
}

TEST(Experiment, SameSpecSameBytes) {
  ExperimentSpec s;
  s.orders = 3;
  s.searches = 10;
  const auto d = squares(300);
  EXPECT_EQ(to_csv(run_experiment(d, s)), to_csv(run_experiment(d, s)));
  s.seed = 2;
  EXPECT_NE(to_csv(run_experiment(d, s)), to_csv(run_experiment(d, ExperimentSpec{.orders = 3, .searches = 10})));
}

TEST(Experiment, ThreadCountDoesNotChangeOutput) {
  ExperimentSpec s;
  s.orders = 5;
  s.searches = 8;
  const auto d = squares(300, 4);
  const auto serial = to_csv(run_experiment(d, s));
  s.threads = 3;
  EXPECT_EQ(to_csv(run_experiment(d, s)), serial);
}

TEST(Experiment, RowsAreOrderedAndFoundCountsAgree) {
  ExperimentSpec s;
  s.orders = 3;
  s.searches = 20;
  const auto rows = run_experiment(squares(500), s);
  ASSERT_EQ(rows.size(), 6u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(rows[2 * k].index, IndexKind::mqr);
    EXPECT_EQ(rows[2 * k + 1].index, IndexKind::rtree);
    EXPECT_EQ(rows[2 * k].order, k);
    EXPECT_EQ(rows[2 * k].avg_found, rows[2 * k + 1].avg_found);
  }
}

TEST(Experiment, QueriesFollowTheExtentFraction) {
  const auto d = squares(400);
  const auto qs = make_queries(d, 50, 0.1, 3);
  const MBR world = d.extent();
  for (const auto& q : qs) {
    EXPECT_TRUE(world.contains(q));
    EXPECT_EQ(q.width(), std::llround(0.1 * static_cast<double>(world.width())));
  }
  EXPECT_EQ(qs, make_queries(d, 50, 0.1, 3));
}

TEST(Experiment, AverageFoundMatchesOracle) {
  const auto d = squares(300, 6);
  ExperimentSpec s;
  s.orders = 1;
  s.searches = 12;
  s.query_extent_fraction = 0.2;
  const auto rows = run_experiment(d, s);
  const auto qs = make_queries(d, 12, 0.2, s.seed);
  double total = 0;
  for (const auto& q : qs) total += static_cast<double>(oracle::linear_scan(d.items, q).size());
  EXPECT_DOUBLE_EQ(rows[0].avg_found, total / 12.0);
}

TEST(ResultsCsv, RoundTrip) {
  ExperimentSpec s;
  s.orders = 2;
  s.searches = 7;
  const auto rows = run_experiment(squares(250), s);
  const std::string text = to_csv(rows);
  EXPECT_EQ(text.substr(0, text.find('\n')), kResultsHeader);
  std::istringstream in(text);
  EXPECT_EQ(read_results_csv(in), rows);

  std::istringstream bad("nope\n");
  EXPECT_THROW(read_results_csv(bad), std::runtime_error);
  std::istringstream short_row(std::string(kResultsHeader) + "\nx,mqr,0\n");
  EXPECT_THROW(read_results_csv(short_row), std::runtime_error);
}

TEST(Compare, SelfComparisonIsAllOnes) {
  ExperimentSpec s;
  s.orders = 3;
  s.searches = 5;
  s.index = IndexChoice::rtree;
  const auto rows = run_experiment(squares(300), s);
  const auto c = compare(rows, rows);
  EXPECT_EQ(c.pairs, 3u);
  for (const auto& m : c.metrics) {
    EXPECT_DOUBLE_EQ(m.mean_ratio, 1.0) << m.metric;
    EXPECT_DOUBLE_EQ(m.min_ratio, 1.0) << m.metric;
    EXPECT_DOUBLE_EQ(m.max_ratio, 1.0) << m.metric;
  }
  EXPECT_NE(render_comparison(c).find("coverage"), std::string::npos);
}

TEST(Compare, PointOverlapRatioIsZero) {
  ExperimentSpec s;
  s.orders = 2;
  s.searches = 5;
  const auto rows = run_experiment(points(1000), s);
  const auto c = compare(only(rows, IndexKind::mqr), only(rows, IndexKind::rtree));
  ASSERT_GT(c.at("overlap").mean_b, 0.0);
  EXPECT_EQ(c.at("overlap").mean_ratio, 0.0);
}

TEST(Compare, UniformSquaresCoverageBelowRTree) {
  ExperimentSpec s;
  s.orders = 2;
  s.searches = 5;
  const auto rows = run_experiment(squares(2000), s);
  const auto c = compare(only(rows, IndexKind::mqr), only(rows, IndexKind::rtree));
  EXPECT_LT(c.at("coverage").mean_ratio, 1.0);
}

TEST(Compare, Mismatches) {
  ExperimentSpec s;
  s.orders = 2;
  s.searches = 0;
  auto a = only(run_experiment(squares(100), s), IndexKind::mqr);
  auto b = a;
  for (auto& r : b) r.dataset = "other";
  EXPECT_THROW(compare(a, b), std::invalid_argument);
  auto c = a;
  c.pop_back();
  EXPECT_THROW(compare(a, c), std::invalid_argument);
  auto mixed = run_experiment(squares(100), s);
  EXPECT_THROW(compare(mixed, a), std::invalid_argument);
  EXPECT_THROW(compare({}, a), std::invalid_argument);
}

TEST(Compare, ZeroOverZeroCountsAsEqual) {
  EXPECT_EQ(paired_ratio(0, 0), 1.0);
  EXPECT_EQ(paired_ratio(3, 6), 0.5);
  EXPECT_TRUE(std::isinf(paired_ratio(1, 0)));
}
