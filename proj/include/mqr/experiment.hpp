#pragma once

// Benchmark protocol: build each index over many seeded insertion orders of
// one dataset, validate, measure, and run a shared battery of region queries.
// Also the results CSV format and the paired mqr/R-tree comparison.

#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "mqr/datagen.hpp"
#include "mqr/metrics.hpp"
#include "mqr/mqr_tree.hpp"
#include "mqr/rtree.hpp"
#include "mqr/validate.hpp"

namespace mqr {

class ValidationFailure : public std::runtime_error {
 public:
  ValidationFailure(const std::string& what, std::vector<Violation> violations)
      : std::runtime_error(what + "\n" + format_violations(violations)), violations_(std::move(violations)) {}
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

enum class IndexKind { mqr, rtree };
enum class IndexChoice { mqr, rtree, both };

constexpr std::string_view to_string(IndexKind k) { return k == IndexKind::mqr ? "mqr" : "rtree"; }

inline IndexChoice parse_index_choice(std::string_view s) {
  if (s == "mqr") return IndexChoice::mqr;
  if (s == "rtree") return IndexChoice::rtree;
  if (s == "both") return IndexChoice::both;
  throw std::invalid_argument("index must be mqr, rtree or both, got '" + std::string(s) + "'");
}

struct ExperimentSpec {
  IndexChoice index = IndexChoice::both;
  std::size_t orders = 100;
  std::size_t searches = 20;
  double query_extent_fraction = 0.05;
  std::uint64_t seed = 1;
  RTreeParams rtree{};
  unsigned threads = 1;

  void check() const {
    if (orders < 1) throw std::invalid_argument("orders must be at least 1");
    if (!(query_extent_fraction > 0.0 && query_extent_fraction <= 1.0)) {
      throw std::invalid_argument("query extent fraction must lie in (0, 1]");
    }
    if (threads < 1) throw std::invalid_argument("threads must be at least 1");
    rtree.check();
  }
};

struct ResultRow {
  std::string dataset;
  IndexKind index = IndexKind::mqr;
  std::size_t order = 0;
  MetricsReport metrics;
  double avg_found = 0.0;
  double avg_disk_hits = 0.0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

namespace detail {
inline constexpr std::uint64_t kQueryStream = 0x5155455259ULL;
}

/// The query battery for a dataset: each query is an axis-aligned box whose
/// sides are `fraction` of the dataset extent's sides, placed uniformly.
inline std::vector<MBR> make_queries(const Dataset& d, std::size_t count, double fraction, std::uint64_t seed) {
  std::vector<MBR> out;
  if (count == 0) return out;
  const MBR world = d.extent();
  const auto w = static_cast<Coord>(std::llround(fraction * static_cast<double>(world.width())));
  const auto h = static_cast<Coord>(std::llround(fraction * static_cast<double>(world.height())));
  Rng rng(mix_seed(seed, detail::kQueryStream));
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Coord x = rng.uniform(world.lx(), world.hx() - w);
    const Coord y = rng.uniform(world.ly(), world.hy() - h);
    out.emplace_back(x, y, x + w, y + h);
  }
  return out;
}

/// Insertion order `k` of the dataset (k = 0 is also shuffled).
inline std::vector<DatasetItem> insertion_order(const Dataset& d, std::size_t k, std::uint64_t seed) {
  std::vector<DatasetItem> items = d.items;
  Rng rng(mix_seed(seed, k));
  rng.shuffle(items);
  return items;
}

template <class Tree>
Tree build_index(const std::vector<DatasetItem>& items, Tree tree) {
  for (const auto& it : items) tree.insert(it.id, it.mbr);
  return tree;
}

inline MqrTree build_mqr(const std::vector<DatasetItem>& items) { return build_index(items, MqrTree{}); }

inline RTree build_rtree(const std::vector<DatasetItem>& items, RTreeParams p = {}) {
  return build_index(items, RTree{p});
}

namespace detail {

template <class Tree>
ResultRow measure(const Tree& tree, IndexKind kind, const std::string& name, std::size_t order,
                  const std::vector<MBR>& queries, std::vector<std::vector<ObjectId>>* hits) {
  if (auto v = validate(tree); !v.empty()) {
    throw ValidationFailure(std::string(to_string(kind)) + " tree for order " + std::to_string(order) +
                                " of '" + name + "' is invalid",
                            std::move(v));
  }
  ResultRow row{name, kind, order, report(tree), 0.0, 0.0};
  if (queries.empty()) return row;
  std::size_t found = 0, disk = 0;
  for (const auto& q : queries) {
    auto r = tree.region_search(q);
    found += r.ids.size();
    disk += r.disk_accesses;
    if (hits) hits->push_back(std::move(r.ids));
  }
  row.avg_found = static_cast<double>(found) / static_cast<double>(queries.size());
  row.avg_disk_hits = static_cast<double>(disk) / static_cast<double>(queries.size());
  return row;
}

inline std::vector<ResultRow> run_order(const Dataset& d, const ExperimentSpec& spec,
                                        const std::vector<MBR>& queries, std::size_t k) {
  const auto items = insertion_order(d, k, spec.seed);
  std::vector<ResultRow> rows;
  std::vector<std::vector<ObjectId>> mqr_hits, rtree_hits;
  const bool both = spec.index == IndexChoice::both;
  if (spec.index != IndexChoice::rtree) {
    rows.push_back(measure(build_mqr(items), IndexKind::mqr, d.name, k, queries, both ? &mqr_hits : nullptr));
  }
  if (spec.index != IndexChoice::mqr) {
    rows.push_back(measure(build_rtree(items, spec.rtree), IndexKind::rtree, d.name, k, queries,
                           both ? &rtree_hits : nullptr));
  }
  if (both && mqr_hits != rtree_hits) {
    throw std::logic_error("mqr and R-tree answered a query differently for order " + std::to_string(k));
  }
  return rows;
}

}  // namespace detail

/// Rows ordered by (order, index) no matter how many threads run.
inline std::vector<ResultRow> run_experiment(const Dataset& d, const ExperimentSpec& spec) {
  spec.check();
  if (d.items.empty()) throw DatasetError("dataset '" + d.name + "' is empty");
  const auto queries = make_queries(d, spec.searches, spec.query_extent_fraction, spec.seed);

  std::vector<std::vector<ResultRow>> per_order(spec.orders);
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(spec.threads, spec.orders));
  if (workers <= 1) {
    for (std::size_t k = 0; k < spec.orders; ++k) per_order[k] = detail::run_order(d, spec, queries, k);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t k = t; k < spec.orders; k += workers) {
            per_order[k] = detail::run_order(d, spec, queries, k);
          }
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  std::vector<ResultRow> rows;
  for (auto& batch : per_order) {
    for (auto& r : batch) rows.push_back(std::move(r));
  }
  return rows;
}

// --- results CSV ---------------------------------------------------------------

inline constexpr std::string_view kResultsHeader =
    "dataset,index,order,nodes,max_height,avg_path,space_util,coverage,overcoverage,overlap,avg_found,"
    "avg_disk_hits";

/// Shortest text that reads back to the same double.
inline std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultsHeader << '\n';
  for (const auto& r : rows) {
    if (r.dataset.find_first_of(",\n") != std::string::npos) {
      throw std::invalid_argument("dataset name may not contain commas or newlines");
    }
    const auto& m = r.metrics;
    out << r.dataset << ',' << to_string(r.index) << ',' << r.order << ',' << m.node_count << ','
        << m.max_height << ',' << format_real(m.avg_path_length) << ',' << format_real(m.space_utilization) << ','
        << m.coverage << ',' << m.overcoverage << ',' << m.overlap << ',' << format_real(r.avg_found) << ','
        << format_real(r.avg_disk_hits) << '\n';
  }
}

inline std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::vector<ResultRow> rows;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    return std::runtime_error("results line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != kResultsHeader) throw fail("unexpected header");
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    if (f.size() != 12) throw fail("expected 12 fields");
    try {
      ResultRow r;
      r.dataset = f[0];
      if (f[1] == "mqr") {
        r.index = IndexKind::mqr;
      } else if (f[1] == "rtree") {
        r.index = IndexKind::rtree;
      } else {
        throw fail("unknown index '" + f[1] + "'");
      }
      r.order = std::stoull(f[2]);
      r.metrics.node_count = std::stoull(f[3]);
      r.metrics.max_height = std::stoull(f[4]);
      r.metrics.avg_path_length = std::stod(f[5]);
      r.metrics.space_utilization = std::stod(f[6]);
      r.metrics.coverage = std::stoll(f[7]);
      r.metrics.overcoverage = std::stoll(f[8]);
      r.metrics.overlap = std::stoll(f[9]);
      r.avg_found = std::stod(f[10]);
      r.avg_disk_hits = std::stod(f[11]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw fail("malformed number");
    }
  }
  return rows;
}

// --- comparison ----------------------------------------------------------------

struct RatioSummary {
  std::string metric;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double mean_ratio = 0.0;  // mean over paired orders of a/b
  double min_ratio = 0.0;
  double max_ratio = 0.0;
};

struct Comparison {
  std::string dataset;
  std::string label_a;
  std::string label_b;
  std::size_t pairs = 0;
  std::vector<RatioSummary> metrics;

  const RatioSummary& at(std::string_view metric) const {
    for (const auto& m : metrics) {
      if (m.metric == metric) return m;
    }
    throw std::out_of_range("no metric '" + std::string(metric) + "' in comparison");
  }
};

/// a/b, with 0/0 read as "no difference".
inline double paired_ratio(double a, double b) {
  if (b == 0.0) return a == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return a / b;
}

/// Pairs rows by order index. Both sides must cover the same dataset and the
/// same set of orders, and each side must hold a single index kind.
inline Comparison compare(const std::vector<ResultRow>& a, const std::vector<ResultRow>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("compare needs rows on both sides");
  auto by_order = [](const std::vector<ResultRow>& rows, const char* side) {
    std::map<std::size_t, const ResultRow*> m;
    for (const auto& r : rows) {
      if (r.dataset != rows.front().dataset) throw std::invalid_argument(std::string(side) + " mixes datasets");
      if (r.index != rows.front().index) throw std::invalid_argument(std::string(side) + " mixes index types");
      if (!m.emplace(r.order, &r).second) throw std::invalid_argument(std::string(side) + " repeats an order");
    }
    return m;
  };
  const auto ma = by_order(a, "first input");
  const auto mb = by_order(b, "second input");
  if (a.front().dataset != b.front().dataset) {
    throw std::invalid_argument("datasets differ: '" + a.front().dataset + "' vs '" + b.front().dataset + "'");
  }
  if (ma.size() != mb.size()) throw std::invalid_argument("inputs cover different insertion orders");
  for (const auto& [k, _] : ma) {
    if (!mb.count(k)) throw std::invalid_argument("order " + std::to_string(k) + " missing from second input");
  }

  using Getter = double (*)(const ResultRow&);
  const std::pair<const char*, Getter> fields[] = {
      {"nodes", [](const ResultRow& r) { return static_cast<double>(r.metrics.node_count); }},
      {"max_height", [](const ResultRow& r) { return static_cast<double>(r.metrics.max_height); }},
      {"avg_path", [](const ResultRow& r) { return r.metrics.avg_path_length; }},
      {"space_util", [](const ResultRow& r) { return r.metrics.space_utilization; }},
      {"coverage", [](const ResultRow& r) { return static_cast<double>(r.metrics.coverage); }},
      {"overcoverage", [](const ResultRow& r) { return static_cast<double>(r.metrics.overcoverage); }},
      {"overlap", [](const ResultRow& r) { return static_cast<double>(r.metrics.overlap); }},
      {"avg_found", [](const ResultRow& r) { return r.avg_found; }},
      {"avg_disk_hits", [](const ResultRow& r) { return r.avg_disk_hits; }},
  };

  Comparison c{a.front().dataset, std::string(to_string(a.front().index)),
               std::string(to_string(b.front().index)), ma.size(), {}};
  const auto n = static_cast<double>(ma.size());
  for (const auto& [name, get] : fields) {
    RatioSummary s{name, 0, 0, 0, std::numeric_limits<double>::infinity(),
                   -std::numeric_limits<double>::infinity()};
    for (const auto& [k, ra] : ma) {
      const ResultRow* rb = mb.at(k);
      const double va = get(*ra), vb = get(*rb);
      const double ratio = paired_ratio(va, vb);
      s.mean_a += va / n;
      s.mean_b += vb / n;
      s.mean_ratio += ratio / n;
      s.min_ratio = std::min(s.min_ratio, ratio);
      s.max_ratio = std::max(s.max_ratio, ratio);
    }
    c.metrics.push_back(s);
  }
  return c;
}

inline std::string render_comparison(const Comparison& c) {
  std::ostringstream os;
  os << "dataset " << c.dataset << ", " << c.pairs << " paired orders, ratio = " << c.label_a << " / "
     << c.label_b << "\n";
  os << std::left << std::setw(14) << "metric" << std::right << std::setw(16) << ("mean " + c.label_a)
     << std::setw(16) << ("mean " + c.label_b) << std::setw(12) << "ratio" << std::setw(10) << "min"
     << std::setw(10) << "max" << '\n';
  os << std::fixed;
  for (const auto& m : c.metrics) {
    os << std::left << std::setw(14) << m.metric << std::right << std::setprecision(2) << std::setw(16)
       << m.mean_a << std::setw(16) << m.mean_b << std::setprecision(3) << std::setw(12) << m.mean_ratio
       << std::setw(10) << m.min_ratio << std::setw(10) << m.max_ratio << '\n';
  }
  return os.str();
}

}  // namespace mqr
