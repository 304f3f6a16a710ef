#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "tgp/io.hpp"
#include "tgp/metrics.hpp"
#include "tgp/pipeline.hpp"
#include "tgp/rcl.hpp"
#include "tgp/sbm.hpp"
#include "tgp/solver.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

tgp::SelectorConfig selector_from_flags(const std::string& pooler, double ratio,
                                        std::size_t k, std::size_t clusters,
                                        std::size_t nmf_max_iters, double nmf_tol,
                                        std::uint64_t seed) {
  tgp::SelectorConfig cfg;
  cfg.kind = tgp::parse_selector_kind(pooler);
  cfg.ratio = ratio;
  cfg.k = k;
  cfg.num_clusters = clusters;
  cfg.nmf_max_iters = nmf_max_iters;
  cfg.nmf_tol = nmf_tol;
  cfg.seed = seed;
  return cfg;
}

std::vector<tgp::Graph> load_dataset(const std::string& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<tgp::Graph> graphs;
  for (const auto& f : files) graphs.push_back(tgp::read_graph_file(f.string()));
  if (graphs.empty()) throw tgp::IoError("no graph files in " + dir);
  return graphs;
}

struct Timing {
  double mean{0.0};
  double stddev{0.0};
};

Timing summarize(const std::vector<double>& samples) {
  Timing t;
  for (double s : samples) t.mean += s;
  t.mean /= static_cast<double>(samples.size());
  if (samples.size() > 1) {
    double acc = 0.0;
    for (double s : samples) acc += (s - t.mean) * (s - t.mean);
    t.stddev = std::sqrt(acc / static_cast<double>(samples.size() - 1));
  }
  return t;
}

int run_gen(const tgp::SbmConfig& cfg, const std::string& out) {
  const tgp::Graph g = tgp::generate_sbm(cfg);
  tgp::write_graph_file(out, g);
  std::cout << "wrote " << out << ": N=" << g.num_nodes() << " M=" << g.num_edges()
            << " F=" << g.feature_dim() << "\n";
  return 0;
}

int run_coarsen(const std::string& input, const std::string& output,
                const std::string& cache_path, const tgp::SelectorConfig& sel,
                tgp::ConnectorKind conn, bool no_self_loops) {
  const tgp::Graph g = tgp::read_graph_file(input);
  const tgp::PoolingOutput out =
      tgp::pool_graph(g, sel, conn, tgp::ReduceOp::Mean, no_self_loops);

  std::vector<tgp::Edge> edges;
  for (const auto& t : out.adj_pooled.entries) {
    edges.push_back({t.row, t.col, t.value});
  }
  const tgp::Graph pooled(out.select.num_clusters, std::move(edges), out.x_pooled);
  tgp::write_graph_file(output, pooled);

  tgp::CacheRecord rec;
  rec.graph_id = 0;
  rec.pooler_fingerprint = tgp::pooler_fingerprint(sel, conn);
  rec.select = out.select;
  rec.adj_pooled = out.adj_pooled;
  tgp::write_cache_file(cache_path, {rec});

  std::cout << "pooled " << g.num_nodes() << " -> " << out.select.num_clusters
            << " nodes; wrote " << output << " and " << cache_path << "\n";
  return 0;
}

int run_cluster(const std::string& input, const std::string& labels_path,
                const std::string& report_path, bool want_metrics,
                const tgp::SolverConfig& cfg) {
  tgp::Graph g = tgp::read_graph_file(input);

  std::optional<std::vector<std::size_t>> truth;
  if (!labels_path.empty()) {
    std::ifstream in(labels_path);
    if (!in) throw tgp::IoError("cannot open " + labels_path);
    std::vector<std::size_t> v;
    long long x;
    while (in >> x) v.push_back(static_cast<std::size_t>(x));
    truth = std::move(v);
  } else if (g.labels()) {
    std::vector<std::size_t> v;
    for (int l : *g.labels()) v.push_back(static_cast<std::size_t>(l));
    truth = std::move(v);
  }
  if (want_metrics && !truth) {
    throw tgp::MissingLabels("metrics requested but no labels available");
  }

  const tgp::SolveResult res = tgp::cluster(g, cfg);

  nlohmann::json report;
  report["schema"] = 1;
  report["config"] = {{"objective", cfg.objective.to_string()},
                      {"k", cfg.num_clusters},
                      {"iters", cfg.max_iters},
                      {"lr", cfg.lr},
                      {"patience", cfg.patience},
                      {"seed", cfg.seed},
                      {"feature_smoothing_steps", cfg.feature_smoothing_steps}};
  report["loss"] = {{"initial", res.history.front().total},
                    {"final", res.history.back().total},
                    {"best", res.best_loss},
                    {"best_iter", res.converged_at},
                    {"iterations", res.history.size()}};
  nlohmann::json terms = nlohmann::json::object();
  for (const auto& [name, value] : res.history.back().per_term) terms[name] = value;
  report["loss"]["final_terms"] = terms;

  if (truth) {
    if (truth->size() != res.labels.size()) {
      throw tgp::LengthMismatch("label file length != node count");
    }
    report["metrics"] = {{"nmi", tgp::nmi(*truth, res.labels)},
                         {"clust_acc", tgp::clust_acc(*truth, res.labels)},
                         {"macro_f1", tgp::macro_f1(*truth, res.labels)}};
  }

  const std::string text = report.dump(2);
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) throw tgp::IoError("cannot open " + report_path + " for writing");
    out << text << "\n";
  }
  std::cout << text << "\n";
  return 0;
}

int run_bench(const std::string& input, const std::string& mode,
              const tgp::SelectorConfig& sel, tgp::ConnectorKind conn,
              std::size_t repeat, std::size_t batch_size, std::size_t jobs,
              const std::string& cache_path) {
  if (mode == "cached") {
    const tgp::Graph g = tgp::read_graph_file(
        std::filesystem::is_directory(input)
            ? std::filesystem::directory_iterator(input)->path().string()
            : input);
    tgp::CachedPooler pooler(sel, conn);
    try {
      auto t0 = Clock::now();
      (void)pooler.pool(g);
      const double first = seconds_since(t0);
      std::vector<double> later;
      for (std::size_t r = 0; r < repeat; ++r) {
        auto t1 = Clock::now();
        (void)pooler.pool(g);
        later.push_back(seconds_since(t1));
      }
      const Timing t = summarize(later);
      std::cout << "first-call: " << first << " s\n";
      std::cout << "cached-call: " << t.mean << " s (std " << t.stddev << ")\n";
      std::cout << "speedup: " << first / t.mean << "x\n";
    } catch (const tgp::NoConvergence&) {
      std::cout << "first-call: N/C\n";
    }
    return 0;
  }

  const std::vector<tgp::Graph> graphs = load_dataset(input);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t i = 0; i < graphs.size(); i += batch_size) {
    std::vector<std::size_t> ids;
    for (std::size_t j = i; j < std::min(i + batch_size, graphs.size()); ++j) {
      ids.push_back(j);
    }
    batches.push_back(std::move(ids));
  }

  auto direct_pass = [&](const std::vector<std::size_t>& ids) {
    for (std::size_t id : ids) {
      (void)tgp::pool_graph(graphs[id], sel, conn, tgp::ReduceOp::Mean);
    }
  };

  bool direct_nc = false;
  Timing direct{};
  try {
    direct_pass(batches.front());  // warm-up
    std::vector<double> samples;
    for (std::size_t r = 0; r < repeat; ++r) {
      for (const auto& ids : batches) {
        auto t0 = Clock::now();
        direct_pass(ids);
        samples.push_back(seconds_since(t0));
      }
    }
    direct = summarize(samples);
    std::cout << "direct: " << direct.mean << " s/batch (std " << direct.stddev
              << ")\n";
  } catch (const tgp::NoConvergence&) {
    direct_nc = true;
    std::cout << "direct: N/C\n";
  }
  if (mode == "direct") return 0;

  // pre-coarsen once (excluded from the timed path, as in training loops)
  const std::string cache =
      cache_path.empty() ? (input + "/.bench-cache.tgpc") : cache_path;
  try {
    tgp::precoarsen_dataset(graphs, sel, conn, cache, jobs);
  } catch (const tgp::NoConvergence&) {
    std::cout << "precoarsen: N/C\n";
    return 0;
  }
  const auto records = tgp::read_cache_file(cache);
  const std::uint64_t fp = tgp::pooler_fingerprint(sel, conn);
  for (const auto& r : records) {
    if (!r.converged) {
      std::cout << "precoarsen: N/C\n";
      return 0;
    }
  }

  auto pre_pass = [&](const std::vector<std::size_t>& ids) {
    const tgp::PooledBatch pb = tgp::load_and_collate(records, graphs, ids, fp);
    (void)tgp::reduce(pb.base.union_graph.features(), pb.select_block,
                      tgp::ReduceOp::Mean);
  };
  pre_pass(batches.front());  // warm-up
  std::vector<double> samples;
  for (std::size_t r = 0; r < repeat; ++r) {
    for (const auto& ids : batches) {
      auto t0 = Clock::now();
      pre_pass(ids);
      samples.push_back(seconds_since(t0));
    }
  }
  const Timing pre = summarize(samples);
  std::cout << "precoarsen: " << pre.mean << " s/batch (std " << pre.stddev << ")\n";
  if (!direct_nc) {
    std::cout << "speedup: " << direct.mean / pre.mean << "x\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical graph pooling toolkit"};
  app.require_subcommand(1);

  // ---- gen sbm ----
  auto* gen = app.add_subcommand("gen", "Generate synthetic datasets");
  gen->require_subcommand(1);
  auto* sbm = gen->add_subcommand("sbm", "Stochastic block model graph");
  tgp::SbmConfig sbm_cfg;
  std::string gen_out = "graph.txt";
  sbm->add_option("--nodes", sbm_cfg.nodes, "Number of nodes");
  sbm->add_option("--classes", sbm_cfg.classes, "Number of communities");
  sbm->add_option("--p-in", sbm_cfg.p_in, "Intra-community edge probability");
  sbm->add_option("--p-out", sbm_cfg.p_out, "Inter-community edge probability");
  sbm->add_option("--feature-dim", sbm_cfg.feature_dim, "Feature dimension");
  sbm->add_option("--feature-shift", sbm_cfg.feature_shift, "Per-class mean shift");
  sbm->add_option("--seed", sbm_cfg.seed, "RNG seed");
  sbm->add_option("--out", gen_out, "Output graph file");

  // ---- shared selector flags ----
  std::string pooler = "graclus", connect = "sparse";
  double ratio = 0.5;
  std::size_t khop = 1, clusters = 2, nmf_max_iters = 500;
  double nmf_tol = 1e-6;
  std::uint64_t sel_seed = 0;

  auto add_selector_flags = [&](CLI::App* cmd) {
    cmd->add_option("--pooler", pooler, "ndp|graclus|kmis|nmf|topk");
    cmd->add_option("--ratio", ratio, "Top-K keep ratio");
    cmd->add_option("--k", khop, "KMIS hop radius");
    cmd->add_option("--clusters", clusters, "NMF cluster count");
    cmd->add_option("--nmf-max-iters", nmf_max_iters, "NMF iteration cap");
    cmd->add_option("--nmf-tol", nmf_tol, "NMF relative-improvement tolerance");
    cmd->add_option("--seed", sel_seed, "Selector seed");
  };

  // ---- coarsen ----
  auto* coarsen = app.add_subcommand("coarsen", "Pool a single graph");
  std::string co_in, co_out = "pooled.txt", co_cache;
  bool no_self_loops = false;
  coarsen->add_option("--input", co_in, "Input graph file")->required();
  coarsen->add_option("--output", co_out, "Pooled graph file");
  coarsen->add_option("--cache", co_cache, "TGPC record path (default output + .tgpc)");
  coarsen->add_option("--connect", connect, "sparse|kron");
  coarsen->add_flag("--no-self-loops", no_self_loops, "Drop the pooled diagonal");
  add_selector_flags(coarsen);

  // ---- cluster ----
  auto* clusterc = app.add_subcommand("cluster", "Unsupervised node clustering");
  std::string cl_in, cl_labels, cl_report;
  bool want_metrics = false;
  tgp::SolverConfig solver_cfg;
  std::string objective = "mincut-cut:1.0,mincut-ortho:1.0";
  clusterc->add_option("--input", cl_in, "Input graph file")->required();
  clusterc->add_option("--objective", objective, "Comma list name:weight");
  clusterc->add_option("--k", solver_cfg.num_clusters, "Cluster count");
  clusterc->add_option("--iters", solver_cfg.max_iters, "Max iterations");
  clusterc->add_option("--lr", solver_cfg.lr, "Learning rate");
  clusterc->add_option("--patience", solver_cfg.patience, "Early-stop patience");
  clusterc->add_option("--seed", solver_cfg.seed, "RNG seed");
  clusterc->add_option("--feature-smoothing", solver_cfg.feature_smoothing_steps,
                       "Feature propagation steps for the init");
  clusterc->add_option("--labels", cl_labels, "Ground-truth label file");
  clusterc->add_option("--report", cl_report, "JSON report output path");
  clusterc->add_flag("--metrics", want_metrics, "Fail if no labels are available");

  // ---- bench ----
  auto* bench = app.add_subcommand("bench", "Efficiency benchmark");
  std::string be_in, be_mode = "direct", be_cache;
  std::size_t repeat = 5, batch_size = 32, jobs = 1;
  bench->add_option("--input", be_in, "Dataset directory (or graph file for cached)")
      ->required();
  bench->add_option("--mode", be_mode, "direct|cached|precoarsen");
  bench->add_option("--connect", connect, "sparse|kron");
  bench->add_option("--repeat", repeat, "Repetitions");
  bench->add_option("--batch-size", batch_size, "Graphs per batch");
  bench->add_option("--jobs", jobs, "Pre-coarsening parallelism");
  bench->add_option("--cache", be_cache, "TGPC cache path");
  add_selector_flags(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  try {
    if (sbm->parsed()) return run_gen(sbm_cfg, gen_out);
    const tgp::SelectorConfig sel = selector_from_flags(
        pooler, ratio, khop, clusters, nmf_max_iters, nmf_tol, sel_seed);
    if (coarsen->parsed()) {
      return run_coarsen(co_in, co_out, co_cache.empty() ? co_out + ".tgpc" : co_cache,
                         sel, tgp::parse_connector(connect), no_self_loops);
    }
    if (clusterc->parsed()) {
      solver_cfg.objective = tgp::ObjectiveSpec::parse(objective);
      return run_cluster(cl_in, cl_labels, cl_report, want_metrics, solver_cfg);
    }
    if (bench->parsed()) {
      if (be_mode != "direct" && be_mode != "cached" && be_mode != "precoarsen") {
        throw tgp::InvalidConfig("unknown bench mode: " + be_mode);
      }
      return run_bench(be_in, be_mode, sel, tgp::parse_connector(connect), repeat,
                       batch_size, jobs, be_cache);
    }
  } catch (const tgp::InvalidConfig& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const tgp::InvalidProbability& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const tgp::UnknownLoss& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const tgp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
