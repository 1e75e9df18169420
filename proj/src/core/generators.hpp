#pragma once

#include <vector>

#include "core/factored.hpp"
#include "core/model.hpp"

namespace witlab {

// Random probability vector (exactly renormalized) and convex row remix.
std::vector<double> random_simplex(int n, RngStream& rng);
void mix_row(std::vector<double>& row, double alpha, RngStream& rng);

// Random tabular model: uniform-Dirichlet transition rows; rewards are
// Bernoulli-like over {0, 1/H} so the cumulative-reward constraint holds.
TabularCdp random_tabular(const std::vector<int>& level_sizes, int K, RngStream& rng);

// Model class sharing (X, A, H): index 0 is the truth, the rest are
// perturbations of it (transition rows and reward probabilities remixed with
// strength `perturbation`).
std::vector<TabularCdp> random_tabular_class(const std::vector<int>& level_sizes, int K,
                                             int count, RngStream& rng,
                                             double perturbation = 0.5);

// Random level sizes in [1, max_states] for horizons used by tests.
std::vector<int> random_level_sizes(int H, int max_states, RngStream& rng);

// Random factored model: random CPTs; shared deterministic rewards at the
// last level with values in [0, 1].
FactoredMdp random_factored(int d, int num_values, int H, int K, RngStream& rng);

// Factored class with shared structure and rewards; index 0 is the truth.
std::vector<FactoredMdp> random_factored_class(int d, int num_values, int H, int K, int count,
                                               RngStream& rng, double perturbation = 0.5);

}  // namespace witlab
