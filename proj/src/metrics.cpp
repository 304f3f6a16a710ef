#include "tgp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "tgp/errors.hpp"

namespace tgp {

namespace {

std::vector<std::size_t> compact(const std::vector<std::size_t>& labels,
                                 std::size_t& num_classes) {
  std::unordered_map<std::size_t, std::size_t> remap;
  std::vector<std::size_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = remap.try_emplace(labels[i], remap.size());
    out[i] = it->second;
  }
  num_classes = remap.size();
  return out;
}

double entropy(const std::vector<double>& counts, double n) {
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) h -= (c / n) * std::log(c / n);
  }
  return h;
}

// Classic potentials-based assignment (minimization, square matrix).
std::vector<std::size_t> hungarian_base(const Eigen::MatrixXd& cost) {
  const auto n = static_cast<std::size_t>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(static_cast<Eigen::Index>(i0 - 1),
                                static_cast<Eigen::Index>(j - 1)) -
                           u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<std::size_t> perm(n);
  for (std::size_t j = 1; j <= n; ++j) perm[p[j] - 1] = j - 1;
  return perm;
}

double perm_cost(const Eigen::MatrixXd& cost, const std::vector<std::size_t>& perm) {
  double c = 0.0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    c += cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(perm[i]));
  }
  return c;
}

}  // namespace

double nmi(const std::vector<std::size_t>& y_true,
           const std::vector<std::size_t>& y_pred) {
  if (y_true.size() != y_pred.size() || y_true.empty()) {
    throw LengthMismatch("nmi: label vectors must have equal nonzero length");
  }
  std::size_t kt = 0, kp = 0;
  const auto t = compact(y_true, kt);
  const auto p = compact(y_pred, kp);
  const double n = static_cast<double>(t.size());

  std::vector<double> ct(kt, 0.0), cp(kp, 0.0);
  std::vector<std::vector<double>> joint(kt, std::vector<double>(kp, 0.0));
  for (std::size_t i = 0; i < t.size(); ++i) {
    ct[t[i]] += 1.0;
    cp[p[i]] += 1.0;
    joint[t[i]][p[i]] += 1.0;
  }
  const double ht = entropy(ct, n);
  const double hp = entropy(cp, n);
  if (ht == 0.0 && hp == 0.0) return 1.0;  // both trivial, hence identical
  if (ht == 0.0 || hp == 0.0) return 0.0;

  double mi = 0.0;
  for (std::size_t a = 0; a < kt; ++a) {
    for (std::size_t b = 0; b < kp; ++b) {
      const double c = joint[a][b];
      if (c > 0.0) mi += (c / n) * std::log(c * n / (ct[a] * cp[b]));
    }
  }
  const double value = mi / (0.5 * (ht + hp));
  return std::clamp(value, 0.0, 1.0);
}

std::vector<std::size_t> hungarian(const Eigen::MatrixXd& cost) {
  if (cost.rows() != cost.cols() || cost.rows() == 0) {
    throw LengthMismatch("hungarian: cost matrix must be square and nonempty");
  }
  if (!cost.allFinite()) throw NonFinite("hungarian: non-finite cost");
  const auto n = static_cast<std::size_t>(cost.rows());

  const double opt = perm_cost(cost, hungarian_base(cost));
  const double span = std::max(1.0, cost.cwiseAbs().maxCoeff() * static_cast<double>(n));
  const double tol = 1e-9 * span;

  // Lexicographic refinement: fix rows one at a time to the smallest column
  // that still admits an optimal completion.
  std::vector<std::size_t> fixed;
  std::vector<char> used(n, 0);
  double prefix = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t remaining = n - r - 1;
    bool placed = false;
    for (std::size_t j = 0; j < n && !placed; ++j) {
      if (used[j]) continue;
      double completion = 0.0;
      if (remaining > 0) {
        Eigen::MatrixXd sub(static_cast<Eigen::Index>(remaining),
                            static_cast<Eigen::Index>(remaining));
        Eigen::Index si = 0;
        for (std::size_t i = r + 1; i < n; ++i, ++si) {
          Eigen::Index sj = 0;
          for (std::size_t c = 0; c < n; ++c) {
            if (used[c] || c == j) continue;
            sub(si, sj++) = cost(static_cast<Eigen::Index>(i),
                                 static_cast<Eigen::Index>(c));
          }
        }
        completion = perm_cost(sub, hungarian_base(sub));
      }
      const double candidate =
          prefix + cost(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) +
          completion;
      if (candidate <= opt + tol) {
        fixed.push_back(j);
        used[j] = 1;
        prefix += cost(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
        placed = true;
      }
    }
  }
  return fixed;
}

namespace {

struct Alignment {
  std::vector<std::size_t> pi;    // predicted id -> true id
  std::size_t k{0};
  std::vector<std::size_t> pred;  // predicted ids, first-occurrence compacted
};

// Alignment permutation maximizing agreement counts. Predicted ids are
// compacted by first occurrence first, so that the lexicographic tie-break
// among equally good alignments does not depend on the arbitrary numbering
// of the predicted clusters.
Alignment align(const std::vector<std::size_t>& y_true,
                const std::vector<std::size_t>& y_pred) {
  if (y_true.size() != y_pred.size() || y_true.empty()) {
    throw LengthMismatch("label vectors must have equal nonzero length");
  }
  std::size_t kp = 0;
  std::vector<std::size_t> pred = compact(y_pred, kp);
  std::size_t k = kp;
  for (std::size_t t : y_true) k = std::max(k, t + 1);
  Eigen::MatrixXd agree = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k),
                                                static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    agree(static_cast<Eigen::Index>(pred[i]), static_cast<Eigen::Index>(y_true[i])) += 1.0;
  }
  return {hungarian(-agree), k, std::move(pred)};
}

}  // namespace

double clust_acc(const std::vector<std::size_t>& y_true,
                 const std::vector<std::size_t>& y_pred) {
  const Alignment al = align(y_true, y_pred);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (al.pi[al.pred[i]] == y_true[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

double macro_f1(const std::vector<std::size_t>& y_true,
                const std::vector<std::size_t>& y_pred) {
  const Alignment al = align(y_true, y_pred);
  const std::size_t k = al.k;
  std::vector<double> tp(k, 0.0), fp(k, 0.0), fn(k, 0.0);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const std::size_t pred = al.pi[al.pred[i]];
    if (pred == y_true[i]) {
      tp[pred] += 1.0;
    } else {
      fp[pred] += 1.0;
      fn[y_true[i]] += 1.0;
    }
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    const double prec = tp[c] + fp[c] > 0.0 ? tp[c] / (tp[c] + fp[c]) : 0.0;
    const double rec = tp[c] + fn[c] > 0.0 ? tp[c] / (tp[c] + fn[c]) : 0.0;
    if (prec + rec > 0.0) sum += 2.0 * prec * rec / (prec + rec);
  }
  return sum / static_cast<double>(k);
}

}  // namespace tgp
