#include "tgp/select.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>
#include <limits>
#include <numeric>
#include <random>

namespace tgp {

namespace {

constexpr std::size_t kNoOwner = std::numeric_limits<std::size_t>::max();

// Level-synchronous multi-source BFS. sources[i] carries (node, owner id);
// on ties in hop distance the smallest owner id wins. Returns per-node
// owner ids (kNoOwner where unreachable) and distances.
struct BfsAssignment {
  std::vector<std::size_t> owner;
  std::vector<std::size_t> dist;
};

BfsAssignment nearest_source(const Graph& g,
                             const std::vector<std::pair<std::size_t, std::size_t>>& sources,
                             std::size_t max_depth = std::numeric_limits<std::size_t>::max()) {
  const std::size_t n = g.num_nodes();
  BfsAssignment r{std::vector<std::size_t>(n, kNoOwner),
                  std::vector<std::size_t>(n, std::numeric_limits<std::size_t>::max())};
  std::vector<std::size_t> frontier;
  for (const auto& [node, owner] : sources) {
    if (r.owner[node] > owner) {
      if (r.dist[node] != 0) frontier.push_back(node);
      r.owner[node] = std::min(r.owner[node], owner);
      r.dist[node] = 0;
    }
  }
  std::sort(frontier.begin(), frontier.end());
  frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());

  std::size_t depth = 0;
  while (!frontier.empty() && depth < max_depth) {
    ++depth;
    std::vector<std::size_t> next;
    for (std::size_t u : frontier) {
      for (const auto& e : g.neighbors(u)) {
        const std::size_t v = e.dst;
        if (v == u) continue;
        if (r.dist[v] > depth) {
          if (r.dist[v] == std::numeric_limits<std::size_t>::max()) next.push_back(v);
          r.dist[v] = depth;
          r.owner[v] = r.owner[u];
        } else if (r.dist[v] == depth) {
          r.owner[v] = std::min(r.owner[v], r.owner[u]);
        }
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    frontier = std::move(next);
  }
  return r;
}

SelectOutput one_hot_from_kept(std::size_t n, std::vector<std::size_t> kept) {
  SelectOutput so;
  so.num_nodes = n;
  so.num_clusters = kept.size();
  SparseAssign sa;
  for (std::size_t c = 0; c < kept.size(); ++c) {
    sa.entries.push_back({kept[c], c, 1.0});
  }
  std::sort(sa.entries.begin(), sa.entries.end(),
            [](const AssignEntry& a, const AssignEntry& b) { return a.node < b.node; });
  so.repr = std::move(sa);
  so.kept_nodes = std::move(kept);
  return so;
}

}  // namespace

Eigen::MatrixXd SelectOutput::to_dense() const {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(num_nodes),
                                            static_cast<Eigen::Index>(num_clusters));
  if (is_sparse()) {
    for (const auto& e : sparse().entries) {
      s(static_cast<Eigen::Index>(e.node), static_cast<Eigen::Index>(e.cluster)) = e.value;
    }
  } else {
    s = dense().s;
  }
  return s;
}

void SelectOutput::validate() const {
  if (num_clusters < 1) throw InvalidConfig("SelectOutput: K < 1");
  if (is_sparse()) {
    std::vector<char> seen(num_nodes, 0);
    for (const auto& e : sparse().entries) {
      if (e.node >= num_nodes || e.cluster >= num_clusters) {
        throw IndexOutOfRange("SelectOutput entry out of range");
      }
      if (seen[e.node]) throw InvalidConfig("node assigned twice");
      if (e.value == 0.0) throw InvalidConfig("zero-valued assignment entry");
      seen[e.node] = 1;
    }
  } else {
    const auto& s = dense().s;
    if (static_cast<std::size_t>(s.rows()) != num_nodes ||
        static_cast<std::size_t>(s.cols()) != num_clusters) {
      throw InvalidConfig("DenseAssign shape mismatch");
    }
    if ((s.array() < 0.0).any()) throw InvalidConfig("negative dense assignment");
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
      if (std::abs(s.row(i).sum() - 1.0) > 1e-9) {
        throw InvalidConfig("dense assignment row does not sum to 1");
      }
    }
  }
}

void SelectorConfig::validate() const {
  if (ratio <= 0.0 || ratio > 1.0) throw InvalidConfig("ratio must be in (0,1]");
  if (k < 1) throw InvalidConfig("k must be >= 1");
  if (nmf_tol < 0.0 || eig_tol <= 0.0) throw InvalidConfig("tolerances must be > 0");
}

SelectorKind parse_selector_kind(const std::string& name) {
  if (name == "ndp") return SelectorKind::Ndp;
  if (name == "graclus") return SelectorKind::Graclus;
  if (name == "kmis") return SelectorKind::Kmis;
  if (name == "nmf") return SelectorKind::Nmf;
  if (name == "topk") return SelectorKind::Topk;
  if (name == "dense-logits") return SelectorKind::DenseLogits;
  throw InvalidConfig("unknown selector: " + name);
}

std::string selector_kind_name(SelectorKind kind) {
  switch (kind) {
    case SelectorKind::Ndp: return "ndp";
    case SelectorKind::Graclus: return "graclus";
    case SelectorKind::Kmis: return "kmis";
    case SelectorKind::Nmf: return "nmf";
    case SelectorKind::Topk: return "topk";
    case SelectorKind::DenseLogits: return "dense-logits";
  }
  return "?";
}

SelectOutput select_topk(const std::vector<double>& scores, double ratio) {
  if (ratio <= 0.0 || ratio > 1.0) throw InvalidConfig("ratio must be in (0,1]");
  const std::size_t n = scores.size();
  if (n == 0) throw InvalidConfig("empty score vector");
  for (double s : scores) {
    if (!std::isfinite(s)) throw NonFiniteScore();
  }
  const auto keep = static_cast<std::size_t>(
      std::ceil(ratio * static_cast<double>(n)) + 0.5);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  std::vector<std::size_t> kept(order.begin(),
                                order.begin() + static_cast<std::ptrdiff_t>(keep));
  std::sort(kept.begin(), kept.end());

  SelectOutput so;
  so.num_nodes = n;
  so.num_clusters = keep;
  SparseAssign sa;
  for (std::size_t c = 0; c < kept.size(); ++c) {
    sa.entries.push_back({kept[c], c, std::tanh(scores[kept[c]])});
  }
  so.repr = std::move(sa);
  so.kept_nodes = std::move(kept);
  std::vector<double> gates(n);
  for (std::size_t i = 0; i < n; ++i) gates[i] = std::tanh(scores[i]);
  so.extra = std::move(gates);
  return so;
}

SelectOutput select_ndp(const Graph& g, const SelectorConfig& cfg) {
  if (!g.symmetric()) throw AsymmetricInput("ndp requires a symmetric graph");
  const std::size_t n = g.num_nodes();
  const auto ni = static_cast<Eigen::Index>(n);

  if (g.num_edges() == 0) {
    // Edgeless graph: Laplacian is zero, keep everything.
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    return one_hot_from_kept(n, std::move(all));
  }

  // L is PSD, so its dominant eigenvalue in magnitude is the largest one and
  // plain power iteration targets exactly the eigenpair we need.
  auto apply_laplacian = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out(ni);
    for (std::size_t i = 0; i < n; ++i) {
      out(static_cast<Eigen::Index>(i)) = g.degree(i) * v(static_cast<Eigen::Index>(i));
    }
    for (const auto& e : g.edges()) {
      out(static_cast<Eigen::Index>(e.src)) -=
          e.weight * v(static_cast<Eigen::Index>(e.dst));
    }
    return out;
  };

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXd v(ni);
  for (Eigen::Index i = 0; i < ni; ++i) v(i) = unif(rng);
  v.normalize();

  // Convergence is judged on the Rayleigh quotient rather than the iterate:
  // when the top eigenvalues are (nearly) degenerate the vector keeps rotating
  // inside the dominant eigenspace, but any vector of that eigenspace yields a
  // valid sign split and the quotient stabilizes quickly.
  bool converged = false;
  double lambda_prev = 0.0;
  for (std::size_t it = 0; it < cfg.eig_max_iters; ++it) {
    Eigen::VectorXd w = apply_laplacian(v);
    const double lambda = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) break;
    w /= norm;
    if (w.dot(v) < 0.0) w = -w;
    v = std::move(w);
    if (it > 0 && std::abs(lambda - lambda_prev) <
                      cfg.eig_tol * std::max(1.0, std::abs(lambda))) {
      converged = true;
      break;
    }
    lambda_prev = lambda;
  }
  if (!converged) throw PowerIterationNoConvergence();

  // Fix the global sign: the entry of largest magnitude must be non-negative.
  Eigen::Index top = 0;
  for (Eigen::Index i = 1; i < ni; ++i) {
    if (std::abs(v(i)) > std::abs(v(top))) top = i;
  }
  if (v(top) < 0.0) v = -v;

  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < n; ++i) {
    if (v(static_cast<Eigen::Index>(i)) >= 0.0) kept.push_back(i);
  }
  return one_hot_from_kept(n, std::move(kept));
}

SelectOutput select_graclus(const Graph& g, const SelectorConfig& cfg) {
  if (!g.symmetric()) throw AsymmetricInput("graclus requires a symmetric graph");
  const std::size_t n = g.num_nodes();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (cfg.graclus_random_order) {
    std::mt19937_64 rng(cfg.seed);
    std::shuffle(order.begin(), order.end(), rng);
  }

  constexpr std::size_t kUnmatched = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> cluster_of(n, kUnmatched);
  std::size_t next_cluster = 0;
  for (std::size_t i : order) {
    if (cluster_of[i] != kUnmatched) continue;
    std::size_t best = kUnmatched;
    double best_score = -1.0;
    for (const auto& e : g.neighbors(i)) {
      const std::size_t j = e.dst;
      if (j == i || cluster_of[j] != kUnmatched) continue;
      const double score = e.weight * (1.0 / g.degree(i) + 1.0 / g.degree(j));
      if (score > best_score) {  // neighbors sorted ascending, ties keep lower j
        best_score = score;
        best = j;
      }
    }
    cluster_of[i] = next_cluster;
    if (best != kUnmatched) cluster_of[best] = next_cluster;
    ++next_cluster;
  }

  SelectOutput so;
  so.num_nodes = n;
  so.num_clusters = next_cluster;
  SparseAssign sa;
  for (std::size_t i = 0; i < n; ++i) sa.entries.push_back({i, cluster_of[i], 1.0});
  so.repr = std::move(sa);
  return so;
}

SelectOutput select_kmis(const Graph& g, std::size_t k) {
  if (!g.symmetric()) throw AsymmetricInput("kmis requires a symmetric graph");
  if (k < 1) throw InvalidConfig("k must be >= 1");
  const std::size_t n = g.num_nodes();

  // Greedy MIS in ascending index order on the k-hop relation: a node joins
  // unless a previously chosen node lies within hop distance k.
  std::vector<char> blocked(n, 0);
  std::vector<std::size_t> mis;
  for (std::size_t i = 0; i < n; ++i) {
    if (blocked[i]) continue;
    mis.push_back(i);
    // block the k-hop ball around i
    std::vector<std::size_t> dist(n, std::numeric_limits<std::size_t>::max());
    std::deque<std::size_t> q{i};
    dist[i] = 0;
    blocked[i] = 1;
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop_front();
      if (dist[u] == k) continue;
      for (const auto& e : g.neighbors(u)) {
        if (dist[e.dst] != std::numeric_limits<std::size_t>::max()) continue;
        dist[e.dst] = dist[u] + 1;
        blocked[e.dst] = 1;
        q.push_back(e.dst);
      }
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> sources;
  for (std::size_t c = 0; c < mis.size(); ++c) sources.emplace_back(mis[c], c);
  const auto near = nearest_source(g, sources);

  SelectOutput so;
  so.num_nodes = n;
  so.num_clusters = mis.size();
  SparseAssign sa;
  for (std::size_t i = 0; i < n; ++i) {
    if (near.owner[i] == kNoOwner) continue;  // cannot happen by maximality within k hops
    sa.entries.push_back({i, near.owner[i], 1.0});
  }
  so.repr = std::move(sa);
  so.kept_nodes = std::move(mis);
  return so;
}

SelectOutput select_nmf(const Graph& g, std::size_t num_clusters,
                        std::size_t max_iters, double tol, std::uint64_t seed) {
  const std::size_t n = g.num_nodes();
  if (n > 20000) throw GraphTooLarge("nmf rejects graphs above 20k nodes");
  if (num_clusters > n) throw InvalidConfig("K must be <= N");
  const auto ni = static_cast<Eigen::Index>(n);
  const auto ki = static_cast<Eigen::Index>(num_clusters);

  const Eigen::MatrixXd a = g.dense_adjacency();
  if ((a.array() < 0.0).any()) throw InvalidConfig("nmf requires non-negative weights");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd w(ni, ki), h(ki, ni);
  for (Eigen::Index i = 0; i < ni; ++i)
    for (Eigen::Index j = 0; j < ki; ++j) w(i, j) = unif(rng);
  for (Eigen::Index i = 0; i < ki; ++i)
    for (Eigen::Index j = 0; j < ni; ++j) h(i, j) = unif(rng);

  constexpr double eps = 1e-12;
  double prev_err = (a - w * h).norm();
  bool converged = false;
  for (std::size_t it = 0; it < max_iters; ++it) {
    h.array() *= (w.transpose() * a).array() /
                 ((w.transpose() * w * h).array() + eps);
    w.array() *= (a * h.transpose()).array() /
                 ((w * h * h.transpose()).array() + eps);
    const double err = (a - w * h).norm();
    const double improvement = (prev_err - err) / std::max(prev_err, eps);
    prev_err = err;
    if (improvement < tol) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NoConvergence("nmf did not converge");

  Eigen::MatrixXd s(ni, ki);
  for (Eigen::Index i = 0; i < ni; ++i) {
    const double colsum = h.col(i).sum();
    if (colsum <= 0.0) {
      s.row(i).setConstant(1.0 / static_cast<double>(num_clusters));
    } else {
      s.row(i) = h.col(i).transpose() / colsum;
    }
  }
  SelectOutput so;
  so.num_nodes = n;
  so.num_clusters = num_clusters;
  so.repr = DenseAssign{std::move(s)};
  return so;
}

SelectOutput dense_from_logits(const Eigen::MatrixXd& theta) {
  if (!theta.allFinite()) throw NonFinite("logits must be finite");
  Eigen::MatrixXd s(theta.rows(), theta.cols());
  for (Eigen::Index i = 0; i < theta.rows(); ++i) {
    const Eigen::RowVectorXd shifted =
        theta.row(i).array() - theta.row(i).maxCoeff();
    const Eigen::RowVectorXd ex = shifted.array().exp();
    s.row(i) = ex / ex.sum();
  }
  SelectOutput so;
  so.num_nodes = static_cast<std::size_t>(theta.rows());
  so.num_clusters = static_cast<std::size_t>(theta.cols());
  so.repr = DenseAssign{std::move(s)};
  return so;
}

SelectOutput assign_all_nodes(const SelectOutput& so, const Graph& g) {
  if (!so.is_sparse()) throw InvalidConfig("assign_all_nodes requires SparseAssign");
  const std::size_t n = so.num_nodes;
  std::vector<std::size_t> cluster_of(n, kNoOwner);
  for (const auto& e : so.sparse().entries) cluster_of[e.node] = e.cluster;

  // Sources are the already-assigned nodes, identified by their own index
  // so that distance ties resolve toward the lowest assigned-node index.
  std::vector<std::pair<std::size_t, std::size_t>> sources;
  for (std::size_t i = 0; i < n; ++i) {
    if (cluster_of[i] != kNoOwner) sources.emplace_back(i, i);
  }
  const auto near = nearest_source(g, sources);

  SelectOutput out = so;
  auto& sa = std::get<SparseAssign>(out.repr);
  for (std::size_t i = 0; i < n; ++i) {
    if (cluster_of[i] != kNoOwner) continue;
    if (near.owner[i] == kNoOwner) {
      throw UnreachableNode("node " + std::to_string(i) + " cannot reach a kept node");
    }
    sa.entries.push_back({i, cluster_of[near.owner[i]], 1.0});
  }
  std::sort(sa.entries.begin(), sa.entries.end(),
            [](const AssignEntry& a, const AssignEntry& b) { return a.node < b.node; });
  return out;
}

SelectOutput run_selector(const Graph& g, const SelectorConfig& cfg) {
  cfg.validate();
  switch (cfg.kind) {
    case SelectorKind::Topk: {
      std::vector<double> scores(g.num_nodes());
      for (std::size_t i = 0; i < g.num_nodes(); ++i) {
        scores[i] = g.feature_dim() > 0
                        ? g.features()(static_cast<Eigen::Index>(i), 0)
                        : g.degree(i);
      }
      return select_topk(scores, cfg.ratio);
    }
    case SelectorKind::Ndp:
      return select_ndp(g, cfg);
    case SelectorKind::Graclus:
      return select_graclus(g, cfg);
    case SelectorKind::Kmis:
      return select_kmis(g, cfg.k);
    case SelectorKind::Nmf:
      return select_nmf(g, cfg.num_clusters, cfg.nmf_max_iters, cfg.nmf_tol, cfg.seed);
    case SelectorKind::DenseLogits:
      throw InvalidConfig("dense-logits needs an explicit logit matrix");
  }
  throw InvalidConfig("unreachable selector kind");
}

std::uint64_t selector_fingerprint(const SelectorConfig& cfg) {
  std::uint64_t h = 14695981039346656037ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  const auto kind = static_cast<std::uint32_t>(cfg.kind);
  mix(&kind, sizeof kind);
  mix(&cfg.ratio, sizeof cfg.ratio);
  const std::uint64_t k64 = cfg.k, nc = cfg.num_clusters, mi = cfg.nmf_max_iters,
                      emi = cfg.eig_max_iters;
  mix(&k64, sizeof k64);
  mix(&nc, sizeof nc);
  mix(&mi, sizeof mi);
  mix(&cfg.nmf_tol, sizeof cfg.nmf_tol);
  mix(&cfg.eig_tol, sizeof cfg.eig_tol);
  mix(&emi, sizeof emi);
  mix(&cfg.seed, sizeof cfg.seed);
  const std::uint8_t ro = cfg.graclus_random_order ? 1 : 0;
  mix(&ro, sizeof ro);
  return h;
}

}  // namespace tgp
