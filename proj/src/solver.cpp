#include "tgp/solver.hpp"

#include <cmath>
#include <random>

#include "tgp/select.hpp"

namespace tgp {

void SolverConfig::validate() const {
  objective.validate();
  if (num_clusters < 2) throw InvalidConfig("K must be >= 2");
  if (lr <= 0.0) throw InvalidConfig("lr must be > 0");
  if (max_iters < 1) throw InvalidConfig("max_iters must be >= 1");
}

namespace {

// X propagated t times through D^{-1/2}(A+I)D^{-1/2}.
Eigen::MatrixXd smooth_features(const Graph& g, std::size_t steps) {
  const std::size_t n = g.num_nodes();
  Eigen::VectorXd deg(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    deg(static_cast<Eigen::Index>(i)) = g.degree(i) + 1.0;  // self-loop added
  }
  const Eigen::VectorXd dinv_sqrt = deg.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd x = g.features();
  for (std::size_t t = 0; t < steps; ++t) {
    Eigen::MatrixXd xs = dinv_sqrt.asDiagonal() * x;
    Eigen::MatrixXd y = xs;  // identity part of A+I
    for (const auto& e : g.edges()) {
      y.row(static_cast<Eigen::Index>(e.src)) +=
          e.weight * xs.row(static_cast<Eigen::Index>(e.dst));
    }
    x = dinv_sqrt.asDiagonal() * y;
  }
  return x;
}

}  // namespace

SolveResult cluster(const Graph& g, const SolverConfig& cfg) {
  cfg.validate();
  const std::size_t n = g.num_nodes();
  const auto ni = static_cast<Eigen::Index>(n);
  const auto ki = static_cast<Eigen::Index>(cfg.num_clusters);

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Eigen::MatrixXd theta(ni, ki);
  if (g.feature_dim() > 0 && cfg.feature_smoothing_steps > 0) {
    const Eigen::MatrixXd smoothed = smooth_features(g, cfg.feature_smoothing_steps);
    const auto fi = static_cast<Eigen::Index>(g.feature_dim());
    Eigen::MatrixXd w(fi, ki);
    const double scale = 1.0 / std::sqrt(static_cast<double>(g.feature_dim()));
    for (Eigen::Index i = 0; i < fi; ++i) {
      for (Eigen::Index j = 0; j < ki; ++j) w(i, j) = gauss(rng) * scale;
    }
    theta = smoothed * w;
    for (Eigen::Index i = 0; i < ni; ++i) {
      for (Eigen::Index j = 0; j < ki; ++j) theta(i, j) += gauss(rng) * 0.1;
    }
  } else {
    for (Eigen::Index i = 0; i < ni; ++i) {
      for (Eigen::Index j = 0; j < ki; ++j) theta(i, j) = gauss(rng);
    }
  }

  // adaptive-moment update state
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(ni, ki);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(ni, ki);
  constexpr double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
  constexpr double improvement_eps = 1e-6;

  SolveResult result;
  double best = std::numeric_limits<double>::infinity();
  std::size_t since_improvement = 0;

  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    const Eigen::MatrixXd s = dense_from_logits(theta).dense().s;

    double total = 0.0;
    Eigen::MatrixXd grad_s = Eigen::MatrixXd::Zero(ni, ki);
    HistoryEntry entry{it, 0.0, {}};
    for (const auto& [name, weight] : cfg.objective.terms) {
      LossValue lv = name == "hosc-cut" ? loss_hosc_cut(s, g, cfg.hosc_alpha)
                                        : evaluate_loss(name, s, g);
      total += weight * lv.value;
      grad_s += weight * lv.grad_s;
      entry.per_term.emplace_back(name, lv.value);
    }
    entry.total = total;
    result.history.push_back(std::move(entry));
    if (!std::isfinite(total)) throw NonFinite("non-finite loss at iteration " + std::to_string(it));

    if (total < best - improvement_eps) {
      since_improvement = 0;
    } else {
      ++since_improvement;
    }
    if (total < best) {
      best = total;
      result.soft = s;
      result.converged_at = it;
    }
    if (since_improvement >= cfg.patience) break;

    const Eigen::MatrixXd grad_theta = softmax_chain(grad_s, s);
    const double t = static_cast<double>(it + 1);
    m = beta1 * m + (1.0 - beta1) * grad_theta;
    v = beta2 * v.array().matrix() +
        (1.0 - beta2) * grad_theta.array().square().matrix();
    const Eigen::MatrixXd m_hat = m / (1.0 - std::pow(beta1, t));
    const Eigen::MatrixXd v_hat = v / (1.0 - std::pow(beta2, t));
    theta -= cfg.lr * (m_hat.array() / (v_hat.array().sqrt() + adam_eps)).matrix();
  }

  result.best_loss = best;
  result.labels.resize(n);
  for (Eigen::Index i = 0; i < ni; ++i) {
    Eigen::Index argmax = 0;
    for (Eigen::Index k = 1; k < ki; ++k) {
      if (result.soft(i, k) > result.soft(i, argmax)) argmax = k;
    }
    result.labels[static_cast<std::size_t>(i)] = static_cast<std::size_t>(argmax);
  }
  return result;
}

}  // namespace tgp
