#include "tgp/rcl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tgp {

namespace {

// Hard cluster of each node: sparse entries directly, dense rows by argmax
// (ties toward the lower cluster index). kNone where unassigned.
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

std::vector<std::size_t> hard_assignment(const SelectOutput& so) {
  std::vector<std::size_t> out(so.num_nodes, kNone);
  if (so.is_sparse()) {
    for (const auto& e : so.sparse().entries) out[e.node] = e.cluster;
  } else {
    const auto& s = so.dense().s;
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
      Eigen::Index best = 0;
      for (Eigen::Index k = 1; k < s.cols(); ++k) {
        if (s(i, k) > s(i, best)) best = k;
      }
      out[static_cast<std::size_t>(i)] = static_cast<std::size_t>(best);
    }
  }
  return out;
}

}  // namespace

Eigen::MatrixXd reduce(const Eigen::MatrixXd& x, const SelectOutput& so, ReduceOp aggr) {
  if (static_cast<std::size_t>(x.rows()) != so.num_nodes) {
    throw FeatureShapeMismatch("reduce: x rows != num_nodes");
  }
  const auto ki = static_cast<Eigen::Index>(so.num_clusters);
  const auto fi = x.cols();

  if (aggr == ReduceOp::Max) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Constant(
        ki, fi, -std::numeric_limits<double>::infinity());
    std::vector<std::size_t> counts(so.num_clusters, 0);
    const auto hard = hard_assignment(so);
    for (std::size_t i = 0; i < so.num_nodes; ++i) {
      if (hard[i] == kNone) continue;
      const auto c = static_cast<Eigen::Index>(hard[i]);
      out.row(c) = out.row(c).cwiseMax(x.row(static_cast<Eigen::Index>(i)));
      counts[hard[i]]++;
    }
    for (std::size_t c = 0; c < so.num_clusters; ++c) {
      if (counts[c] == 0) throw EmptyCluster("max over empty cluster " + std::to_string(c));
    }
    return out;
  }

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(ki, fi);
  Eigen::VectorXd weight = Eigen::VectorXd::Zero(ki);
  if (so.is_sparse()) {
    for (const auto& e : so.sparse().entries) {
      out.row(static_cast<Eigen::Index>(e.cluster)) +=
          e.value * x.row(static_cast<Eigen::Index>(e.node));
      weight(static_cast<Eigen::Index>(e.cluster)) += 1.0;  // member count
    }
  } else {
    const auto& s = so.dense().s;
    out = s.transpose() * x;
    weight = s.colwise().sum();
  }
  if (aggr == ReduceOp::Mean) {
    for (Eigen::Index c = 0; c < ki; ++c) {
      if (weight(c) == 0.0) throw EmptyCluster("mean over empty cluster " + std::to_string(c));
      out.row(c) /= weight(c);
    }
  }
  return out;
}

SparseMatrix connect_sparse(const Graph& g, const SelectOutput& so,
                            bool remove_self_loops) {
  if (so.num_nodes != g.num_nodes()) {
    throw FeatureShapeMismatch("connect_sparse: selection size != graph size");
  }
  const std::size_t k = so.num_clusters;
  std::vector<Triplet> tr;
  if (so.is_sparse()) {
    std::vector<std::size_t> cluster_of(so.num_nodes, kNone);
    std::vector<double> value_of(so.num_nodes, 0.0);
    for (const auto& e : so.sparse().entries) {
      cluster_of[e.node] = e.cluster;
      value_of[e.node] = e.value;
    }
    for (const auto& e : g.edges()) {
      if (cluster_of[e.src] == kNone || cluster_of[e.dst] == kNone) continue;
      tr.push_back({cluster_of[e.src], cluster_of[e.dst],
                    value_of[e.src] * e.weight * value_of[e.dst]});
    }
  } else {
    const auto& s = so.dense().s;
    for (const auto& e : g.edges()) {
      const auto i = static_cast<Eigen::Index>(e.src);
      const auto j = static_cast<Eigen::Index>(e.dst);
      for (Eigen::Index a = 0; a < s.cols(); ++a) {
        if (s(i, a) == 0.0) continue;
        for (Eigen::Index b = 0; b < s.cols(); ++b) {
          const double v = s(i, a) * e.weight * s(j, b);
          if (v != 0.0) {
            tr.push_back({static_cast<std::size_t>(a), static_cast<std::size_t>(b), v});
          }
        }
      }
    }
  }
  if (remove_self_loops) {
    std::erase_if(tr, [](const Triplet& t) { return t.row == t.col; });
  }
  return make_sparse(k, k, std::move(tr));
}

namespace {

// Diagonally preconditioned conjugate gradient for SPD systems.
Eigen::VectorXd pcg_solve(const Eigen::MatrixXd& m, const Eigen::VectorXd& b,
                          double tol, std::size_t max_iters) {
  const Eigen::VectorXd dinv = m.diagonal().cwiseInverse();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd r = b;
  Eigen::VectorXd z = dinv.cwiseProduct(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  const double bnorm = std::max(b.norm(), 1e-300);
  for (std::size_t it = 0; it < max_iters; ++it) {
    if (r.norm() / bnorm < tol) return x;
    const Eigen::VectorXd mp = m * p;
    const double denom = p.dot(mp);
    if (denom <= 0.0) throw SingularEliminationBlock("CG breakdown");
    const double alpha = rz / denom;
    x += alpha * p;
    r -= alpha * mp;
    z = dinv.cwiseProduct(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw SingularEliminationBlock("CG did not converge");
}

}  // namespace

SparseMatrix connect_kron(const Graph& g, const std::vector<std::size_t>& kept_nodes,
                          double sparsify_eps) {
  if (!g.symmetric()) throw AsymmetricInput("kron requires a symmetric graph");
  const std::size_t n = g.num_nodes();
  const std::size_t k = kept_nodes.size();
  std::vector<char> is_kept(n, 0);
  for (std::size_t v : kept_nodes) {
    if (v >= n) throw IndexOutOfRange("kept node out of range");
    is_kept[v] = 1;
  }

  if (k == n) {
    std::vector<Triplet> tr;
    // re-index by kept order, which may permute nodes
    std::vector<std::size_t> pos(n);
    for (std::size_t c = 0; c < k; ++c) pos[kept_nodes[c]] = c;
    for (const auto& e : g.edges()) tr.push_back({pos[e.src], pos[e.dst], e.weight});
    return make_sparse(k, k, std::move(tr));
  }

  std::vector<std::size_t> removed;
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_kept[i]) removed.push_back(i);
  }
  const std::size_t r = removed.size();
  std::vector<std::size_t> kept_pos(n, 0), rem_pos(n, 0);
  for (std::size_t c = 0; c < k; ++c) kept_pos[kept_nodes[c]] = c;
  for (std::size_t c = 0; c < r; ++c) rem_pos[removed[c]] = c;

  const auto ki = static_cast<Eigen::Index>(k);
  const auto ri = static_cast<Eigen::Index>(r);
  Eigen::MatrixXd l_kk = Eigen::MatrixXd::Zero(ki, ki);
  Eigen::MatrixXd l_kr = Eigen::MatrixXd::Zero(ki, ri);
  Eigen::MatrixXd l_rr = Eigen::MatrixXd::Zero(ri, ri);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = g.degree(i);
    if (is_kept[i]) {
      l_kk(static_cast<Eigen::Index>(kept_pos[i]), static_cast<Eigen::Index>(kept_pos[i])) += d;
    } else {
      l_rr(static_cast<Eigen::Index>(rem_pos[i]), static_cast<Eigen::Index>(rem_pos[i])) += d;
    }
  }
  for (const auto& e : g.edges()) {
    const bool sk = is_kept[e.src], dk = is_kept[e.dst];
    if (sk && dk) {
      l_kk(static_cast<Eigen::Index>(kept_pos[e.src]),
           static_cast<Eigen::Index>(kept_pos[e.dst])) -= e.weight;
    } else if (sk && !dk) {
      l_kr(static_cast<Eigen::Index>(kept_pos[e.src]),
           static_cast<Eigen::Index>(rem_pos[e.dst])) -= e.weight;
    } else if (!sk && !dk) {
      l_rr(static_cast<Eigen::Index>(rem_pos[e.src]),
           static_cast<Eigen::Index>(rem_pos[e.dst])) -= e.weight;
    }
    // removed->kept entries are the transpose of l_kr by symmetry
  }

  for (Eigen::Index i = 0; i < ri; ++i) {
    if (l_rr(i, i) <= 0.0) {
      throw SingularEliminationBlock("removed node with zero degree");
    }
  }

  Eigen::MatrixXd y(ri, ki);  // L_rr^{-1} L_rk
  if (r <= 512) {
    Eigen::LLT<Eigen::MatrixXd> llt(l_rr);
    if (llt.info() != Eigen::Success) {
      throw SingularEliminationBlock("elimination block is not positive definite");
    }
    y = llt.solve(l_kr.transpose());
    // LLT can silently succeed on near-singular blocks; verify the solve.
    if ((l_rr * y - l_kr.transpose()).norm() >
        1e-6 * std::max(1.0, l_kr.norm())) {
      throw SingularEliminationBlock("elimination block is numerically singular");
    }
  } else {
    for (Eigen::Index c = 0; c < ki; ++c) {
      y.col(c) = pcg_solve(l_rr, l_kr.transpose().col(c), 1e-10, 10 * r + 100);
    }
  }

  Eigen::MatrixXd schur = l_kk - l_kr * y;
  schur = 0.5 * (schur + schur.transpose());

  std::vector<Triplet> tr;
  for (Eigen::Index i = 0; i < ki; ++i) {
    for (Eigen::Index j = 0; j < ki; ++j) {
      if (i == j) continue;
      const double w = -schur(i, j);
      if (std::abs(w) >= sparsify_eps && w != 0.0) {
        tr.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), w});
      }
    }
  }
  return make_sparse(k, k, std::move(tr));
}

Eigen::MatrixXd lift(const Eigen::MatrixXd& x_pooled, const SelectOutput& so) {
  if (static_cast<std::size_t>(x_pooled.rows()) != so.num_clusters) {
    throw FeatureShapeMismatch("lift: x_pooled rows != num_clusters");
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(so.num_nodes),
                                              x_pooled.cols());
  if (so.is_sparse()) {
    for (const auto& e : so.sparse().entries) {
      out.row(static_cast<Eigen::Index>(e.node)) =
          e.value * x_pooled.row(static_cast<Eigen::Index>(e.cluster));
    }
  } else {
    out = so.dense().s * x_pooled;
  }
  return out;
}

ConnectorKind parse_connector(const std::string& name) {
  if (name == "sparse") return ConnectorKind::Sparse;
  if (name == "kron") return ConnectorKind::Kron;
  throw InvalidConfig("unknown connector: " + name);
}

PoolingOutput pool_graph(const Graph& g, const SelectorConfig& cfg,
                         ConnectorKind connector, ReduceOp aggr,
                         bool remove_self_loops) {
  SelectOutput so = run_selector(g, cfg);
  SparseMatrix adj;
  if (connector == ConnectorKind::Kron) {
    if (!so.kept_nodes) {
      throw IncompatibleConnector("kron requires a kept-node selector (ndp, kmis, topk)");
    }
    adj = connect_kron(g, *so.kept_nodes);
  } else {
    adj = connect_sparse(g, so, remove_self_loops);
  }
  return pool_with_precomputed(g, std::move(so), std::move(adj), aggr);
}

PoolingOutput pool_with_precomputed(const Graph& g, const SelectOutput& so,
                                    SparseMatrix adj_pooled, ReduceOp aggr) {
  PoolingOutput out;
  out.x_pooled = reduce(g.features(), so, aggr);
  out.adj_pooled = std::move(adj_pooled);
  out.batch_pooled.assign(so.num_clusters, 0);
  out.select = so;
  return out;
}

}  // namespace tgp
