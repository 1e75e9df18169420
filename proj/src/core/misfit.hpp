#pragma once

#include <vector>

#include "core/factored.hpp"
#include "core/model.hpp"
#include "core/test_functions.hpp"

namespace witlab {

enum class ActionMode { TargetPolicy, Uniform };

// One observed (x_h, a_h, r_h, x_{h+1}).
struct MisfitSample {
  int x = 0, a = 0;
  double r = 0.0;
  int next = 0;
};

// A level-h batch collected under some roll-in policy.
struct MisfitDataset {
  int level = 1;
  ActionMode mode = ActionMode::Uniform;
  int actions = 1;  // K (needed for the importance weight)
  std::uint64_t seed = 0;
  std::vector<MisfitSample> samples;
};

// Exact witnessed model misfit W(M, M', h; F): x_h ~ pi_M run in M*,
// a_h ~ pi_{M'}, inner expectations of f under M' vs M*.
double witnessed_misfit_exact(const PlannedModel& roll_in, const PlannedModel& target,
                              const TabularCdp& truth, int h, const TestFunctionClass& F);

// Exact average Bellman error, computed both as the one-step residual of
// Q_{M'} and via the model form E[(E_{M'} - E_{M*})(r + V_{M'}(x'))]; the two
// must agree within 1e-9 or an InternalError is thrown.
double bellman_error_exact(const PlannedModel& roll_in, const PlannedModel& target,
                           const TabularCdp& truth, int h);

// Importance-weighted empirical misfit on uniform-action data:
//   max_f (1/n) sum_n rho_n (E_{M'}[f | x,a] - f(x,a,r,x')),  rho = K pi_{M'}(a|x).
double witnessed_misfit_estimate(const MisfitDataset& data, const PlannedModel& target,
                                 const TestFunctionClass& F);

// On-policy empirical Bellman error: mean of Q_M(x,a) - (r + V_M(x')).
double bellman_error_estimate(const MisfitDataset& data, const PlannedModel& target);

// Exact factored misfit W_F (uniform actions, per-factor TV sum), computed on
// the expanded truth's occupancy.  `roll_in` is the policy of the optimistic
// model's expanded plan.
double factored_misfit_exact(const TabularCdp& expanded_truth, const Policy& roll_in,
                             const FactoredMdp& target, const FactoredMdp& truth, int h);

// Empirical factored misfit (no importance weights): per-cell (i, x[pa_i], a)
// sign maximization, exact over the whole sign class by separability.
double factored_misfit_estimate(const MisfitDataset& data, const FactoredMdp& target);

}  // namespace witlab
