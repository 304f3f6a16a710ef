#include <doctest.h>

#include "tgp/metrics.hpp"
#include "tgp/solver.hpp"

using namespace tgp;

namespace {

// two disjoint cliques of size `m` with 1-d features separating the halves
Graph two_cliques(std::size_t m) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i != j) {
        edges.push_back({i, j, 1.0});
        edges.push_back({i + m, j + m, 1.0});
      }
    }
  }
  Eigen::MatrixXd feat(static_cast<Eigen::Index>(2 * m), 1);
  for (std::size_t i = 0; i < m; ++i) {
    feat(static_cast<Eigen::Index>(i), 0) = 1.0;
    feat(static_cast<Eigen::Index>(i + m), 0) = -1.0;
  }
  return build_graph(2 * m, edges, feat);
}

}  // namespace

TEST_CASE("solver separates two cliques with a mincut objective") {
  const Graph g = two_cliques(10);
  std::vector<std::size_t> truth(20, 0);
  for (std::size_t i = 10; i < 20; ++i) truth[i] = 1;

  SolverConfig cfg;
  cfg.objective = ObjectiveSpec::parse("mincut-cut:1.0,mincut-ortho:1.0");
  cfg.num_clusters = 2;
  cfg.max_iters = 500;
  cfg.seed = 0;
  const SolveResult res = cluster(g, cfg);
  CHECK(nmi(truth, res.labels) == doctest::Approx(1.0));
  CHECK(res.best_loss <= res.history.front().total);
}

TEST_CASE("solver is deterministic under a fixed seed") {
  const Graph g = two_cliques(5);
  SolverConfig cfg;
  cfg.objective = ObjectiveSpec::parse("dmon-mod:1.0,dmon-collapse:1.0");
  cfg.num_clusters = 2;
  cfg.max_iters = 100;
  cfg.seed = 42;
  const SolveResult a = cluster(g, cfg);
  const SolveResult b = cluster(g, cfg);
  CHECK(a.labels == b.labels);
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].total == b.history[i].total);  // bitwise
  }
  CHECK(a.best_loss == b.best_loss);
}

TEST_CASE("solver history tracks every weighted term") {
  const Graph g = two_cliques(4);
  SolverConfig cfg;
  cfg.objective = ObjectiveSpec::parse("mincut-cut:2.0,diff-ent:0.5");
  cfg.num_clusters = 2;
  cfg.max_iters = 20;
  const SolveResult res = cluster(g, cfg);
  REQUIRE(!res.history.empty());
  const HistoryEntry& h = res.history.front();
  REQUIRE(h.per_term.size() == 2);
  CHECK(h.per_term[0].first == "mincut-cut");
  CHECK(h.total ==
        doctest::Approx(2.0 * h.per_term[0].second + 0.5 * h.per_term[1].second));
  CHECK(res.soft.rows() == 8);
  CHECK(res.soft.cols() == 2);
  for (Eigen::Index i = 0; i < res.soft.rows(); ++i) {
    CHECK(res.soft.row(i).sum() == doctest::Approx(1.0));
  }
}

TEST_CASE("patience stops early on a flat objective") {
  const Graph g = two_cliques(4);
  SolverConfig cfg;
  cfg.objective = ObjectiveSpec::parse("mincut-cut:1.0,mincut-ortho:1.0");
  cfg.num_clusters = 2;
  cfg.max_iters = 2000;
  cfg.patience = 10;
  const SolveResult res = cluster(g, cfg);
  CHECK(res.history.size() < 2000);
}

TEST_CASE("solver config validation") {
  SolverConfig cfg;
  cfg.objective = ObjectiveSpec::parse("mincut-cut");
  cfg.num_clusters = 1;
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
  cfg.num_clusters = 2;
  cfg.lr = -1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
}
