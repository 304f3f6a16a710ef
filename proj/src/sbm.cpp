#include "tgp/sbm.hpp"

#include <random>

namespace tgp {

Graph generate_sbm(const SbmConfig& cfg) {
  if (cfg.p_in < 0.0 || cfg.p_in > 1.0 || cfg.p_out < 0.0 || cfg.p_out > 1.0 ||
      cfg.p_out > cfg.p_in) {
    throw InvalidProbability("require 0 <= p_out <= p_in <= 1");
  }
  if (cfg.classes < 1 || cfg.nodes < cfg.classes) {
    throw InvalidConfig("need at least one node per class");
  }
  const std::size_t n = cfg.nodes;
  const std::size_t block = n / cfg.classes;

  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = static_cast<int>(std::min(i / block, cfg.classes - 1));
  }

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double p = labels[i] == labels[j] ? cfg.p_in : cfg.p_out;
      if (unif(rng) < p) {
        edges.push_back({i, j, 1.0});
        edges.push_back({j, i, 1.0});
      }
    }
  }

  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd feat(static_cast<Eigen::Index>(n),
                       static_cast<Eigen::Index>(cfg.feature_dim));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < cfg.feature_dim; ++f) {
      double mu = 0.0;
      if (cfg.feature_dim > 0 &&
          f == static_cast<std::size_t>(labels[i]) % cfg.feature_dim) {
        mu = cfg.feature_shift;
      }
      feat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f)) =
          mu + gauss(rng);
    }
  }
  return Graph(n, std::move(edges), std::move(feat), labels);
}

}  // namespace tgp
