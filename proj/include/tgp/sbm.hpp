#pragma once

#include <cstdint>

#include "tgp/graph.hpp"

namespace tgp {

struct SbmConfig {
  std::size_t nodes{400};
  std::size_t classes{5};
  double p_in{0.30};
  double p_out{0.02};
  std::size_t feature_dim{2};
  double feature_shift{3.0};
  std::uint64_t seed{0};
};

/// Stochastic block model with balanced blocks (remainder goes to the last
/// block), symmetrized unit-weight edges, Gaussian features with per-class
/// mean feature_shift * e_{c mod F}, and block ids as labels.
Graph generate_sbm(const SbmConfig& cfg);

}  // namespace tgp
