#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace tgp {

/// Normalized mutual information with arithmetic-mean normalization.
/// Returns 1 when both partitions are trivial and identical, 0 when exactly
/// one of them is trivial.
double nmi(const std::vector<std::size_t>& y_true,
           const std::vector<std::size_t>& y_pred);

/// Minimum-cost assignment: permutation pi minimizing sum_k cost(k, pi(k)).
/// Ties resolve to the lexicographically smallest optimal permutation.
std::vector<std::size_t> hungarian(const Eigen::MatrixXd& cost);

/// Fraction of labels matching after Hungarian alignment of predicted ids.
double clust_acc(const std::vector<std::size_t>& y_true,
                 const std::vector<std::size_t>& y_pred);

/// Unweighted mean per-class F1 after the same Hungarian alignment.
double macro_f1(const std::vector<std::size_t>& y_true,
                const std::vector<std::size_t>& y_pred);

}  // namespace tgp
