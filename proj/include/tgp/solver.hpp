#pragma once

#include <cstdint>

#include "tgp/graph.hpp"
#include "tgp/objectives.hpp"

namespace tgp {

struct SolverConfig {
  ObjectiveSpec objective;
  std::size_t num_clusters{2};
  std::size_t max_iters{2000};
  double lr{5e-2};
  std::size_t patience{500};
  std::uint64_t seed{0};
  std::size_t feature_smoothing_steps{2};
  double hosc_alpha{0.5};

  void validate() const;
};

struct HistoryEntry {
  std::size_t iter{0};
  double total{0.0};
  std::vector<std::pair<std::string, double>> per_term;
};

struct SolveResult {
  std::vector<std::size_t> labels;  // row argmax of soft
  Eigen::MatrixXd soft;             // best-loss S
  std::vector<HistoryEntry> history;
  std::size_t converged_at{0};      // iteration of the best loss
  double best_loss{0.0};
};

/// Unsupervised clustering: gradient descent on free per-node logits through
/// the row softmax, minimizing the weighted objective terms.
SolveResult cluster(const Graph& g, const SolverConfig& cfg);

}  // namespace tgp
