// bench: dataset generation, experiment runs, comparison, validation and
// tree dumps for the mqr-tree and the R-tree baseline.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "mqr/datagen.hpp"
#include "mqr/experiment.hpp"
#include "mqr/metrics.hpp"
#include "mqr/mqr_tree.hpp"
#include "mqr/rtree.hpp"
#include "mqr/validate.hpp"

namespace {

constexpr int kExitError = 1;
constexpr int kExitInvalid = 2;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

struct GenArgs {
  std::string family = "uniform_squares";
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  std::string out;
  mqr::Coord world_side = 0;
  std::string segments;
  double scale = mqr::kDefaultScale;
};

int cmd_gen(const GenArgs& a) {
  const mqr::Family f = mqr::parse_family(a.family);
  mqr::Dataset d;
  if (f == mqr::Family::external) {
    if (a.segments.empty()) throw std::runtime_error("--family external needs --segments FILE");
    d = mqr::load_segments(a.segments, a.scale);
  } else {
    mqr::GenConfig cfg;
    cfg.count = a.n;
    cfg.seed = a.seed;
    if (a.world_side > 0) cfg.world = mqr::MBR(0, 0, a.world_side, a.world_side);
    d = mqr::generate(f, cfg);
  }
  auto out = open_out(a.out);
  mqr::write_dataset_csv(out, d);
  std::cerr << "wrote " << d.items.size() << " objects to " << a.out << '\n';
  return 0;
}

struct RunArgs {
  std::string data;
  std::string index = "both";
  std::size_t orders = 100;
  std::size_t searches = 20;
  double qfrac = 0.05;
  std::uint64_t seed = 1;
  std::string out;
  unsigned threads = 1;
  std::size_t rtree_max = 5;
  std::size_t rtree_min = 2;
};

int cmd_run(const RunArgs& a) {
  const auto d = mqr::load_dataset_csv(a.data);
  mqr::ExperimentSpec spec;
  spec.index = mqr::parse_index_choice(a.index);
  spec.orders = a.orders;
  spec.searches = a.searches;
  spec.query_extent_fraction = a.qfrac;
  spec.seed = a.seed;
  spec.threads = a.threads;
  spec.rtree = {a.rtree_max, a.rtree_min};
  const auto rows = mqr::run_experiment(d, spec);
  if (a.out.empty() || a.out == "-") {
    mqr::write_results_csv(std::cout, rows);
  } else {
    auto out = open_out(a.out);
    mqr::write_results_csv(out, rows);
  }
  return 0;
}

std::vector<mqr::ResultRow> read_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return mqr::read_results_csv(in);
}

int cmd_compare(const std::string& a_path, const std::string& b_path) {
  auto a = read_rows(a_path);
  std::vector<mqr::ResultRow> b;
  if (b_path.empty()) {
    // One file from `run --index both`: split it by index.
    std::vector<mqr::ResultRow> m;
    for (auto& r : a) (r.index == mqr::IndexKind::mqr ? m : b).push_back(std::move(r));
    a = std::move(m);
  } else {
    b = read_rows(b_path);
  }
  std::cout << mqr::render_comparison(mqr::compare(a, b));
  return 0;
}

int cmd_validate(const std::string& data, const std::string& index, bool every, std::size_t rmax,
                 std::size_t rmin) {
  const auto d = mqr::load_dataset_csv(data);
  const auto choice = mqr::parse_index_choice(index);
  int status = 0;
  auto check = [&](const auto& tree, const char* name, std::size_t after) {
    const auto v = mqr::validate(tree);
    if (v.empty()) return true;
    std::cerr << name << ": " << v.size() << " violation(s) after " << after << " insert(s)\n"
              << mqr::format_violations(v);
    status = kExitInvalid;
    return false;
  };
  if (choice != mqr::IndexChoice::rtree) {
    mqr::MqrTree t;
    for (std::size_t i = 0; i < d.items.size(); ++i) {
      t.insert(d.items[i].id, d.items[i].mbr);
      if (every && !check(t, "mqr", i + 1)) break;
    }
    if (!every) check(t, "mqr", d.items.size());
    if (status == 0) std::cout << "mqr: valid (" << mqr::report(t) << ")\n";
  }
  if (choice != mqr::IndexChoice::mqr) {
    const int before = status;
    status = 0;
    mqr::RTree t({rmax, rmin});
    for (std::size_t i = 0; i < d.items.size(); ++i) {
      t.insert(d.items[i].id, d.items[i].mbr);
      if (every && !check(t, "rtree", i + 1)) break;
    }
    if (!every) check(t, "rtree", d.items.size());
    if (status == 0) std::cout << "rtree: valid (" << mqr::report(t) << ")\n";
    status = std::max(status, before);
  }
  return status;
}

int cmd_dump(const std::string& data, const std::string& out_path) {
  const auto d = mqr::load_dataset_csv(data);
  mqr::MqrTree t;
  for (const auto& it : d.items) t.insert(it.id, it.mbr);
  if (const auto v = mqr::validate(t); !v.empty()) {
    std::cerr << mqr::format_violations(v);
    return kExitInvalid;
  }
  if (out_path.empty() || out_path == "-") {
    std::cout << t.dump();
  } else {
    auto out = open_out(out_path);
    out << t.dump();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mqr-tree / R-tree benchmark harness"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "generate a synthetic dataset, or convert a segment file");
  g->add_option("--family", gen.family,
                "uniform_squares | uniform_points | expo_squares | expo_points | hv_lines | sloped_lines | "
                "mixed_lines | external")
      ->capture_default_str();
  g->add_option("--n", gen.n, "number of objects")->capture_default_str()->check(CLI::PositiveNumber);
  g->add_option("--seed", gen.seed, "random seed")->capture_default_str();
  g->add_option("--out", gen.out, "dataset CSV to write")->required();
  g->add_option("--world", gen.world_side, "world side (default 100*ceil(sqrt(n)))");
  g->add_option("--segments", gen.segments, "segment file for --family external")->check(CLI::ExistingFile);
  g->add_option("--scale", gen.scale, "grid units per segment-file unit")->capture_default_str();

  RunArgs run;
  auto* r = app.add_subcommand("run", "build trees over shuffled insertion orders and measure them");
  r->add_option("--data", run.data, "dataset CSV")->required()->check(CLI::ExistingFile);
  r->add_option("--index", run.index, "mqr | rtree | both")->capture_default_str();
  r->add_option("--orders", run.orders, "insertion orders")->capture_default_str();
  r->add_option("--searches", run.searches, "region queries per tree")->capture_default_str();
  r->add_option("--qfrac", run.qfrac, "query side as a fraction of the dataset extent")->capture_default_str();
  r->add_option("--seed", run.seed, "master seed")->capture_default_str();
  r->add_option("--out", run.out, "results CSV (default stdout)");
  r->add_option("--threads", run.threads, "worker threads")->capture_default_str();
  r->add_option("--rtree-max", run.rtree_max, "R-tree node capacity M")->capture_default_str();
  r->add_option("--rtree-min", run.rtree_min, "R-tree minimum fill m")->capture_default_str();

  std::string cmp_a, cmp_b;
  auto* c = app.add_subcommand("compare", "mean per-order ratios a/b of two result files");
  c->add_option("--a", cmp_a, "results CSV (numerator)")->required()->check(CLI::ExistingFile);
  c->add_option("--b", cmp_b, "results CSV (denominator); omit to split --a by index")
      ->check(CLI::ExistingFile);

  std::string val_data, val_index = "mqr";
  bool val_every = false;
  std::size_t val_rmax = 5, val_rmin = 2;
  auto* v = app.add_subcommand("validate", "build and check structural invariants");
  v->add_option("--data", val_data, "dataset CSV")->required()->check(CLI::ExistingFile);
  v->add_option("--index", val_index, "mqr | rtree | both")->capture_default_str();
  v->add_flag("--every", val_every, "validate after every insert");
  v->add_option("--rtree-max", val_rmax, "R-tree node capacity M")->capture_default_str();
  v->add_option("--rtree-min", val_rmin, "R-tree minimum fill m")->capture_default_str();

  std::string dump_data, dump_out;
  auto* dmp = app.add_subcommand("dump", "write the canonical text form of the mqr-tree");
  dmp->add_option("--data", dump_data, "dataset CSV")->required()->check(CLI::ExistingFile);
  dmp->add_option("--out", dump_out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*g) return cmd_gen(gen);
    if (*r) return cmd_run(run);
    if (*c) return cmd_compare(cmp_a, cmp_b);
    if (*v) return cmd_validate(val_data, val_index, val_every, val_rmax, val_rmin);
    if (*dmp) return cmd_dump(dump_data, dump_out);
  } catch (const mqr::ValidationFailure& e) {
    std::cerr << "validation failed: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
