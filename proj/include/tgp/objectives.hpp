#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tgp/graph.hpp"

namespace tgp {

/// A loss evaluated at a dense row-stochastic S, with its analytic gradient.
struct LossValue {
  std::string name;
  double value{0.0};
  Eigen::MatrixXd grad_s;  // N x K
};

// Spectral cut ratio: -Tr(S^T A S)/Tr(S^T D S).
LossValue loss_mincut_cut(const Eigen::MatrixXd& s, const Graph& g);

// || S^T S / ||S^T S||_F - I/sqrt(K) ||_F
LossValue loss_mincut_ortho(const Eigen::MatrixXd& s);

// Modularity term -(1/2m) Tr(S^T B S), B = A - d d^T / 2m.
LossValue loss_dmon_mod(const Eigen::MatrixXd& s, const Graph& g);

// Collapse regularizer (sqrt(K)/N) ||colsum(S)||_2 - 1.
LossValue loss_dmon_collapse(const Eigen::MatrixXd& s);

// Link prediction ||A - S S^T||_F / N^2.
LossValue loss_diff_lp(const Eigen::MatrixXd& s, const Graph& g);

// Mean row entropy (natural log, 0 log 0 = 0).
LossValue loss_diff_ent(const Eigen::MatrixXd& s);

// -Tr((S^T S)^{1/2}) / sqrt(N K).
LossValue loss_justbalance(const Eigen::MatrixXd& s);

// Total variation (1/(2 vol)) sum_ij a_ij ||S_i - S_j||_1.
LossValue loss_tv(const Eigen::MatrixXd& s, const Graph& g);

// Balance term 1 - (K/(N(K-1))) (1/K) sum_k ||S_.k - mean_k||_1.
LossValue loss_asym_balance(const Eigen::MatrixXd& s);

// Cut ratio on A_alpha = alpha A + (1-alpha) A_tri, where A_tri counts the
// triangles through each edge.
LossValue loss_hosc_cut(const Eigen::MatrixXd& s, const Graph& g, double alpha = 0.5);

/// Chains dloss/dS through the row-wise softmax Jacobian.
Eigen::MatrixXd softmax_chain(const Eigen::MatrixXd& grad_s, const Eigen::MatrixXd& s);

/// Weighted combination of named loss terms, e.g. "mincut-cut:1.0,mincut-ortho:1.0".
struct ObjectiveSpec {
  std::vector<std::pair<std::string, double>> terms;

  static ObjectiveSpec parse(const std::string& text);
  void validate() const;
  std::string to_string() const;
};

const std::vector<std::string>& loss_names();

/// Dispatches a loss term by name.
LossValue evaluate_loss(const std::string& name, const Eigen::MatrixXd& s,
                        const Graph& g);

}  // namespace tgp
