#pragma once

#include <map>
#include <string>

#include "tgp/graph.hpp"
#include "tgp/select.hpp"

namespace tgp {

/// Result of a full pooling pass.
struct PoolingOutput {
  Eigen::MatrixXd x_pooled;            // K x F
  SparseMatrix adj_pooled;             // K x K
  std::vector<std::size_t> batch_pooled;
  SelectOutput select;
  std::map<std::string, double> losses;
};

/// Supernode features. sum is S^T X (sparse entries carry any gating values);
/// mean divides each cluster by its member count (dense: by column sums of S);
/// max is the elementwise maximum over hard-assigned members.
Eigen::MatrixXd reduce(const Eigen::MatrixXd& x, const SelectOutput& so, ReduceOp aggr);

/// A' = S^T A S, coalesced. Keeps the diagonal unless remove_self_loops.
SparseMatrix connect_sparse(const Graph& g, const SelectOutput& so,
                            bool remove_self_loops = false);

/// Kron reduction: Schur complement of the combinatorial Laplacian onto the
/// kept nodes. Off-diagonal entries of -L' become edge weights; entries below
/// sparsify_eps are dropped and the diagonal is discarded.
SparseMatrix connect_kron(const Graph& g, const std::vector<std::size_t>& kept_nodes,
                          double sparsify_eps = 1e-6);

/// X_lift = S X'; rows of unassigned nodes are zero.
Eigen::MatrixXd lift(const Eigen::MatrixXd& x_pooled, const SelectOutput& so);

enum class ConnectorKind { Sparse, Kron };

ConnectorKind parse_connector(const std::string& name);

/// Select + Connect + Reduce in one call. Kron requires a kept-node selector.
PoolingOutput pool_graph(const Graph& g, const SelectorConfig& cfg,
                         ConnectorKind connector, ReduceOp aggr = ReduceOp::Mean,
                         bool remove_self_loops = false);

/// Reduce + assembly step given a precomputed Select/Connect pair.
PoolingOutput pool_with_precomputed(const Graph& g, const SelectOutput& so,
                                    SparseMatrix adj_pooled, ReduceOp aggr);

}  // namespace tgp
