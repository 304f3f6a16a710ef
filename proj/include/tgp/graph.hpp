#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tgp/errors.hpp"

namespace tgp {

struct Edge {
  std::size_t src{0};
  std::size_t dst{0};
  double weight{1.0};
};

struct Triplet {
  std::size_t row{0};
  std::size_t col{0};
  double value{0.0};
};

/// Coordinate-list sparse matrix, entries coalesced and sorted row-major.
struct SparseMatrix {
  std::size_t rows{0};
  std::size_t cols{0};
  std::vector<Triplet> entries;

  Eigen::MatrixXd dense() const;
};

SparseMatrix make_sparse(std::size_t rows, std::size_t cols,
                         std::vector<Triplet> entries, double drop_tol = 0.0);

/// Immutable weighted graph. Edges are stored as directed entries in
/// canonical (src, dst) order with duplicates coalesced by summing; a
/// symmetric graph holds both (i,j) and (j,i).
class Graph {
 public:
  Graph(std::size_t num_nodes, std::vector<Edge> edges, Eigen::MatrixXd features,
        std::optional<std::vector<int>> labels = std::nullopt);

  std::size_t num_nodes() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t feature_dim() const { return static_cast<std::size_t>(feat_.cols()); }

  const std::vector<Edge>& edges() const { return edges_; }
  const Eigen::MatrixXd& features() const { return feat_; }
  const std::optional<std::vector<int>>& labels() const { return labels_; }

  bool symmetric() const { return symmetric_; }
  bool has_self_loops() const { return self_loops_; }

  /// Weighted degree (sum of outgoing edge weights).
  double degree(std::size_t i) const { return degree_[i]; }
  const std::vector<double>& degrees() const { return degree_; }

  /// Outgoing edges of node i, sorted by destination.
  std::span<const Edge> neighbors(std::size_t i) const;

  Eigen::MatrixXd dense_adjacency() const;

  /// Disjoint union of already-constructed graphs. Skips re-validation and
  /// re-sorting: per-part edge lists are already coalesced and sorted, and
  /// shifting them by the node offset keeps the global order.
  static Graph disjoint_union(const std::vector<const Graph*>& parts);

 private:
  Graph() = default;
  std::size_t n_{0};
  std::vector<Edge> edges_;
  std::vector<std::size_t> row_ptr_;
  Eigen::MatrixXd feat_;
  std::optional<std::vector<int>> labels_;
  std::vector<double> degree_;
  bool symmetric_{false};
  bool self_loops_{false};
};

Graph build_graph(std::size_t num_nodes, const std::vector<Edge>& edges,
                  Eigen::MatrixXd features = {},
                  std::optional<std::vector<int>> labels = std::nullopt);

enum class LaplacianKind { Combinatorial, SymmetricNormalized };

SparseMatrix laplacian(const Graph& g, LaplacianKind kind);

// ---- batching ----------------------------------------------------------

struct DenseBatch {
  std::size_t num_graphs{0};
  std::size_t max_nodes{0};
  std::vector<Eigen::MatrixXd> adj;   // per graph, max_nodes x max_nodes
  std::vector<Eigen::MatrixXd> feat;  // per graph, max_nodes x F
  std::vector<std::vector<char>> mask;
};

struct SparseBatch {
  Graph union_graph;
  std::vector<std::size_t> batch_vec;  // non-decreasing, length = union nodes
  std::size_t num_graphs{0};
};

DenseBatch to_dense_batch(const std::vector<Graph>& graphs);
SparseBatch to_sparse_batch(const std::vector<Graph>& graphs);
SparseBatch to_sparse_batch(const std::vector<const Graph*>& graphs);

enum class ReduceOp { Sum, Mean, Max };

ReduceOp parse_reduce(const std::string& name);

/// Per-graph readout over a disjoint-union node feature matrix.
Eigen::MatrixXd global_pool(const Eigen::MatrixXd& x,
                            const std::vector<std::size_t>& batch_vec,
                            std::size_t num_graphs, ReduceOp op);

/// Per-graph readout over a padded batch; masked rows are ignored.
Eigen::MatrixXd global_pool(const DenseBatch& batch, ReduceOp op);

}  // namespace tgp
