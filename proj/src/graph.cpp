#include "tgp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace tgp {

Eigen::MatrixXd SparseMatrix::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows),
                                            static_cast<Eigen::Index>(cols));
  for (const auto& t : entries) {
    m(static_cast<Eigen::Index>(t.row), static_cast<Eigen::Index>(t.col)) += t.value;
  }
  return m;
}

SparseMatrix make_sparse(std::size_t rows, std::size_t cols,
                         std::vector<Triplet> entries, double drop_tol) {
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<Triplet> out;
  out.reserve(entries.size());
  for (const auto& t : entries) {
    if (!out.empty() && out.back().row == t.row && out.back().col == t.col) {
      out.back().value += t.value;
    } else {
      out.push_back(t);
    }
  }
  if (drop_tol > 0.0) {
    std::erase_if(out, [&](const Triplet& t) { return std::abs(t.value) < drop_tol; });
  } else {
    std::erase_if(out, [](const Triplet& t) { return t.value == 0.0; });
  }
  return SparseMatrix{rows, cols, std::move(out)};
}

Graph::Graph(std::size_t num_nodes, std::vector<Edge> edges, Eigen::MatrixXd features,
             std::optional<std::vector<int>> labels)
    : n_(num_nodes), feat_(std::move(features)), labels_(std::move(labels)) {
  if (feat_.size() == 0 && feat_.rows() != static_cast<Eigen::Index>(n_)) {
    feat_.resize(static_cast<Eigen::Index>(n_), 0);
  }
  if (feat_.rows() != static_cast<Eigen::Index>(n_)) {
    throw FeatureShapeMismatch("feature rows " + std::to_string(feat_.rows()) +
                               " != num_nodes " + std::to_string(n_));
  }
  if (labels_ && labels_->size() != n_) {
    throw FeatureShapeMismatch("label count != num_nodes");
  }
  for (const auto& e : edges) {
    if (e.src >= n_ || e.dst >= n_) {
      throw IndexOutOfRange("edge (" + std::to_string(e.src) + "," +
                            std::to_string(e.dst) + ") out of range for N=" +
                            std::to_string(n_));
    }
    if (!std::isfinite(e.weight)) {
      throw NonFiniteWeight();
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.src != b.src ? a.src < b.src : a.dst < b.dst;
  });
  edges_.reserve(edges.size());
  for (const auto& e : edges) {
    if (!edges_.empty() && edges_.back().src == e.src && edges_.back().dst == e.dst) {
      edges_.back().weight += e.weight;
    } else {
      edges_.push_back(e);
    }
  }

  row_ptr_.assign(n_ + 1, 0);
  for (const auto& e : edges_) row_ptr_[e.src + 1]++;
  for (std::size_t i = 0; i < n_; ++i) row_ptr_[i + 1] += row_ptr_[i];

  degree_.assign(n_, 0.0);
  for (const auto& e : edges_) {
    degree_[e.src] += e.weight;
    if (e.src == e.dst) self_loops_ = true;
  }

  // symmetry detection on the coalesced entries
  symmetric_ = true;
  for (const auto& e : edges_) {
    auto nb = neighbors(e.dst);
    auto it = std::lower_bound(nb.begin(), nb.end(), e.src,
                               [](const Edge& a, std::size_t v) { return a.dst < v; });
    if (it == nb.end() || it->dst != e.src ||
        std::abs(it->weight - e.weight) > 1e-12 * std::max(1.0, std::abs(e.weight))) {
      symmetric_ = false;
      break;
    }
  }
}

std::span<const Edge> Graph::neighbors(std::size_t i) const {
  return {edges_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
}

Eigen::MatrixXd Graph::dense_adjacency() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_),
                                            static_cast<Eigen::Index>(n_));
  for (const auto& e : edges_) {
    a(static_cast<Eigen::Index>(e.src), static_cast<Eigen::Index>(e.dst)) = e.weight;
  }
  return a;
}

Graph build_graph(std::size_t num_nodes, const std::vector<Edge>& edges,
                  Eigen::MatrixXd features, std::optional<std::vector<int>> labels) {
  return Graph(num_nodes, edges, std::move(features), std::move(labels));
}

SparseMatrix laplacian(const Graph& g, LaplacianKind kind) {
  if (!g.symmetric()) throw AsymmetricInput("laplacian requires a symmetric graph");
  const std::size_t n = g.num_nodes();
  std::vector<Triplet> tr;
  tr.reserve(g.num_edges() + n);
  if (kind == LaplacianKind::Combinatorial) {
    for (std::size_t i = 0; i < n; ++i) {
      if (g.degree(i) != 0.0) tr.push_back({i, i, g.degree(i)});
    }
    for (const auto& e : g.edges()) tr.push_back({e.src, e.dst, -e.weight});
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (g.degree(i) > 0.0) tr.push_back({i, i, 1.0});
    }
    for (const auto& e : g.edges()) {
      const double di = g.degree(e.src), dj = g.degree(e.dst);
      if (di > 0.0 && dj > 0.0) {
        tr.push_back({e.src, e.dst, -e.weight / std::sqrt(di * dj)});
      }
    }
  }
  return make_sparse(n, n, std::move(tr));
}

DenseBatch to_dense_batch(const std::vector<Graph>& graphs) {
  DenseBatch b;
  b.num_graphs = graphs.size();
  std::size_t f = graphs.empty() ? 0 : graphs[0].feature_dim();
  for (const auto& g : graphs) {
    if (g.feature_dim() != f) throw FeatureWidthMismatch();
    b.max_nodes = std::max(b.max_nodes, g.num_nodes());
  }
  const auto nm = static_cast<Eigen::Index>(b.max_nodes);
  for (const auto& g : graphs) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nm, nm);
    for (const auto& e : g.edges()) {
      a(static_cast<Eigen::Index>(e.src), static_cast<Eigen::Index>(e.dst)) = e.weight;
    }
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(nm, static_cast<Eigen::Index>(f));
    x.topRows(static_cast<Eigen::Index>(g.num_nodes())) = g.features();
    std::vector<char> m(b.max_nodes, 0);
    std::fill(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(g.num_nodes()), 1);
    b.adj.push_back(std::move(a));
    b.feat.push_back(std::move(x));
    b.mask.push_back(std::move(m));
  }
  return b;
}

Graph Graph::disjoint_union(const std::vector<const Graph*>& parts) {
  std::size_t total = 0, total_edges = 0;
  const std::size_t f = parts.empty() ? 0 : parts[0]->feature_dim();
  bool any_labels = false;
  for (const Graph* g : parts) {
    if (g->feature_dim() != f) throw FeatureWidthMismatch();
    total += g->n_;
    total_edges += g->edges_.size();
    any_labels = any_labels || g->labels_.has_value();
  }

  Graph u;
  u.n_ = total;
  u.edges_.reserve(total_edges);
  u.row_ptr_.assign(total + 1, 0);
  u.degree_.reserve(total);
  u.feat_.resize(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(f));
  if (any_labels) u.labels_.emplace(total, -1);
  u.symmetric_ = true;

  std::size_t off = 0, eoff = 0;
  for (const Graph* g : parts) {
    for (const auto& e : g->edges_) {
      u.edges_.push_back({e.src + off, e.dst + off, e.weight});
    }
    for (std::size_t i = 0; i < g->n_; ++i) {
      u.row_ptr_[off + i + 1] = eoff + g->row_ptr_[i + 1];
    }
    u.degree_.insert(u.degree_.end(), g->degree_.begin(), g->degree_.end());
    if (f > 0) {
      u.feat_.middleRows(static_cast<Eigen::Index>(off),
                         static_cast<Eigen::Index>(g->n_)) = g->feat_;
    }
    if (u.labels_ && g->labels_) {
      std::copy(g->labels_->begin(), g->labels_->end(),
                u.labels_->begin() + static_cast<std::ptrdiff_t>(off));
    }
    u.symmetric_ = u.symmetric_ && g->symmetric_;
    u.self_loops_ = u.self_loops_ || g->self_loops_;
    off += g->n_;
    eoff += g->edges_.size();
  }
  return u;
}

SparseBatch to_sparse_batch(const std::vector<const Graph*>& graphs) {
  Graph u = Graph::disjoint_union(graphs);
  std::vector<std::size_t> batch_vec(u.num_nodes());
  std::size_t off = 0, gi = 0;
  for (const Graph* g : graphs) {
    std::fill(batch_vec.begin() + static_cast<std::ptrdiff_t>(off),
              batch_vec.begin() + static_cast<std::ptrdiff_t>(off + g->num_nodes()),
              gi);
    off += g->num_nodes();
    ++gi;
  }
  return SparseBatch{std::move(u), std::move(batch_vec), graphs.size()};
}

SparseBatch to_sparse_batch(const std::vector<Graph>& graphs) {
  std::vector<const Graph*> parts;
  parts.reserve(graphs.size());
  for (const auto& g : graphs) parts.push_back(&g);
  return to_sparse_batch(parts);
}

ReduceOp parse_reduce(const std::string& name) {
  if (name == "sum") return ReduceOp::Sum;
  if (name == "mean") return ReduceOp::Mean;
  if (name == "max") return ReduceOp::Max;
  throw UnknownReduce("unknown reduce: " + name);
}

Eigen::MatrixXd global_pool(const Eigen::MatrixXd& x,
                            const std::vector<std::size_t>& batch_vec,
                            std::size_t num_graphs, ReduceOp op) {
  if (static_cast<std::size_t>(x.rows()) != batch_vec.size()) {
    throw FeatureShapeMismatch("x rows != batch_vec length");
  }
  const auto fdim = x.cols();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(num_graphs), fdim);
  std::vector<std::size_t> counts(num_graphs, 0);
  if (op == ReduceOp::Max) {
    out.setConstant(-std::numeric_limits<double>::infinity());
  }
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const auto b = static_cast<Eigen::Index>(batch_vec[static_cast<std::size_t>(i)]);
    if (op == ReduceOp::Max) {
      out.row(b) = out.row(b).cwiseMax(x.row(i));
    } else {
      out.row(b) += x.row(i);
    }
    counts[static_cast<std::size_t>(b)]++;
  }
  for (std::size_t b = 0; b < num_graphs; ++b) {
    if (counts[b] == 0 && op != ReduceOp::Sum) {
      throw EmptyGraphInBatch("graph " + std::to_string(b) + " has no nodes");
    }
    if (op == ReduceOp::Mean && counts[b] > 0) {
      out.row(static_cast<Eigen::Index>(b)) /= static_cast<double>(counts[b]);
    }
  }
  return out;
}

Eigen::MatrixXd global_pool(const DenseBatch& batch, ReduceOp op) {
  const auto fdim = batch.feat.empty() ? 0 : batch.feat[0].cols();
  Eigen::MatrixXd out =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(batch.num_graphs), fdim);
  for (std::size_t b = 0; b < batch.num_graphs; ++b) {
    std::size_t count = 0;
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(fdim);
    if (op == ReduceOp::Max) {
      acc.setConstant(-std::numeric_limits<double>::infinity());
    }
    for (std::size_t i = 0; i < batch.max_nodes; ++i) {
      if (!batch.mask[b][i]) continue;
      const auto row = batch.feat[b].row(static_cast<Eigen::Index>(i));
      if (op == ReduceOp::Max) {
        acc = acc.cwiseMax(row);
      } else {
        acc += row;
      }
      ++count;
    }
    if (count == 0 && op != ReduceOp::Sum) {
      throw EmptyGraphInBatch("graph " + std::to_string(b) + " fully masked");
    }
    if (op == ReduceOp::Mean && count > 0) acc /= static_cast<double>(count);
    out.row(static_cast<Eigen::Index>(b)) = acc;
  }
  return out;
}

}  // namespace tgp
