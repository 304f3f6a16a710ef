#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "tgp/graph.hpp"

namespace tgp {

struct AssignEntry {
  std::size_t node{0};
  std::size_t cluster{0};
  double value{1.0};
};

/// Sparse one-hot assignment; each node appears at most once.
struct SparseAssign {
  std::vector<AssignEntry> entries;  // sorted by node
};

/// Dense row-stochastic assignment.
struct DenseAssign {
  Eigen::MatrixXd s;  // N x K
};

/// Output of a Select stage: the assignment matrix S plus metadata.
struct SelectOutput {
  std::size_t num_nodes{0};
  std::size_t num_clusters{0};
  std::variant<SparseAssign, DenseAssign> repr;
  std::optional<std::vector<std::size_t>> kept_nodes;
  std::optional<std::vector<double>> extra;  // per-node scalar weights (gates)

  bool is_sparse() const { return std::holds_alternative<SparseAssign>(repr); }
  const SparseAssign& sparse() const { return std::get<SparseAssign>(repr); }
  const DenseAssign& dense() const { return std::get<DenseAssign>(repr); }

  /// S as a dense N x K matrix, whatever the representation.
  Eigen::MatrixXd to_dense() const;

  /// Validates the representation invariants; throws on violation.
  void validate() const;
};

enum class SelectorKind { Ndp, Graclus, Kmis, Nmf, Topk, DenseLogits };

struct SelectorConfig {
  SelectorKind kind{SelectorKind::Graclus};
  double ratio{0.5};               // topk
  std::size_t k{1};                // kmis hop radius
  std::size_t num_clusters{2};     // nmf, dense-logits
  std::size_t nmf_max_iters{500};
  double nmf_tol{1e-6};
  double eig_tol{1e-8};
  std::size_t eig_max_iters{10000};
  std::uint64_t seed{0};
  bool graclus_random_order{false};

  void validate() const;
};

SelectorKind parse_selector_kind(const std::string& name);
std::string selector_kind_name(SelectorKind kind);

/// Keeps the ceil(ratio*N) highest-scoring nodes, each as its own
/// singleton cluster gated by tanh(score). Ties break toward lower index.
SelectOutput select_topk(const std::vector<double>& scores, double ratio);

/// Node decimation by the sign pattern of the top eigenvector of the
/// combinatorial Laplacian (power iteration on the Gershgorin-shifted matrix).
SelectOutput select_ndp(const Graph& g, const SelectorConfig& cfg);

/// Greedy weighted matching in ascending index order; matched pairs and
/// leftover singletons become clusters.
SelectOutput select_graclus(const Graph& g, const SelectorConfig& cfg);

/// Greedy maximal independent set on the k-hop graph; every other node is
/// assigned to its hop-nearest MIS node.
SelectOutput select_kmis(const Graph& g, std::size_t k);

/// Soft clustering from a nonnegative factorization A ~ W*H by
/// multiplicative updates; S rows are the normalized columns of H.
SelectOutput select_nmf(const Graph& g, std::size_t num_clusters,
                        std::size_t max_iters, double tol, std::uint64_t seed);

/// Row-wise softmax of free logits.
SelectOutput dense_from_logits(const Eigen::MatrixXd& theta);

/// Extends a partial sparse assignment to a full partition by joining each
/// unassigned node to the cluster of the hop-nearest kept node.
SelectOutput assign_all_nodes(const SelectOutput& so, const Graph& g);

/// Dispatches on cfg.kind. Top-K scores default to feature column 0, or the
/// weighted degree when the graph has no features.
SelectOutput run_selector(const Graph& g, const SelectorConfig& cfg);

/// 64-bit FNV-1a over the configuration fields; used as cache fingerprint.
std::uint64_t selector_fingerprint(const SelectorConfig& cfg);

}  // namespace tgp
