#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/misfit.hpp"
#include "core/witness_rank.hpp"

namespace witlab {

struct AlgoConfig {
  double epsilon = 0.1;
  double delta = 0.1;
  bool oracle = true;  // oracle mode replaces every estimate by its exact value

  // Elimination threshold; < 0 means derive phi = kappa*eps/(48 H sqrt(wrank)).
  double phi = -1.0;
  // Sample sizes; <= 0 means derive from the theorem formulas (times the
  // multipliers below, constants taken as 1).
  long long n = 0;
  long long n_e = 0;
  double n_multiplier = 1.0;
  double ne_multiplier = 1.0;

  // Structural inputs of the theorem parameterization.
  double kappa = 1.0;
  double wrank = 1.0;
  double beta = 4.0;  // norm parameter of the factorization; only its log enters

  // Round cap; <= 0 means derive T = H * wrank * log(beta/(2 phi)) / log(5/3).
  int max_rounds = 0;
  // Size of the test class entering the log term of n (|F|); <= 0 means use
  // the actual class size (2|M|^3 H for Scheffe).
  long long f_size = 0;

  long long max_trajectories = 10'000'000;  // budget guard for sampling runs
};

struct RoundRecord {
  int round = 0;
  int chosen = -1;       // optimistic model id
  double v_model = 0.0;  // v_{M^t}
  double v_hat = 0.0;    // exact or estimated v^{pi^t}
  bool terminated = false;
  int h_t = -1;
  std::vector<double> misfits;     // per pre-round survivor, aligned with survivors_before
  std::vector<int> survivors_before;
  std::vector<int> eliminated;
  long long trajectories = 0;
};

struct RunRecord {
  std::vector<RoundRecord> rounds;
  std::vector<int> final_version_space;
  int output_policy = -1;  // model id whose greedy policy is returned
  long long total_trajectories = 0;
  bool success = false;
  std::string fault;  // empty on success

  // Doubling-trick bookkeeping (empty for plain runs): one entry per inner
  // run (i, j, wrank_ij, terminated?).
  struct DoublingStep {
    int i = 0, j = 0;
    double kappa_ij = 0.0, wrank_ij = 0.0;
    bool succeeded = false;
  };
  std::vector<DoublingStep> doubling;
};

// Derived theorem parameters (constants = 1), exposed for reporting.
struct DerivedParams {
  double phi = 0.0;
  int T = 0;
  long long n = 0;
  long long n_e = 0;
};
DerivedParams derive_params(const AlgoConfig& cfg, int horizon, int actions,
                            std::size_t class_size, std::size_t f_size);

// Algorithm: optimistic selection -> value check -> find h_t -> collect
// uniform-action data at h_t -> estimate misfits -> eliminate.
RunRecord run_main(const std::vector<PlannedModel>& model_class, const TabularCdp& truth,
                   const TestFunctionClass& F, const AlgoConfig& cfg, RngStream rng);

// Doubling trick: guesses wrank via N_i = 2^{i-1} and kappa via (1/2)^{j-1},
// with delta_i = delta/(i(i+1)), delta_{i,j} = delta_i/(j(j+1)), breaking the
// inner loop when wrank_{i,j} = N_i kappa_{i,j} < 1.
RunRecord run_doubling(const std::vector<PlannedModel>& model_class, const TabularCdp& truth,
                       const TestFunctionClass& F, const AlgoConfig& cfg, RngStream rng);

// Factored variant: uniform-action data, per-factor sign class, no importance
// weights; kappa = 1/K and wrank = L_h/|O| unless overridden.
RunRecord run_factored(const std::vector<FactoredMdp>& model_class, int truth_index,
                       const AlgoConfig& cfg, RngStream rng);

// Version-space filter: keep ids whose estimate is <= phi (boundary survives).
std::vector<int> eliminate(const std::vector<int>& version_space,
                           const std::vector<double>& estimates, double phi);

}  // namespace witlab
