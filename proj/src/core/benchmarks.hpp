#pragma once

#include <vector>

#include <Eigen/Dense>

#include "core/factored.hpp"
#include "core/model.hpp"

namespace witlab {

// ---- MAB tree family ----
// K^(H-1) models over shared deterministic action-history tree dynamics.
// Level h (h <= H-1) states index the action prefix a_1..a_{h-1} in base K
// (first action most significant).  The last tree transition (level H-1)
// lands in x* with probability 0.5 + eps * 1{full action path = planted arm},
// else in x0; the only reward is R(x) = 1{x = x*} at level H.
struct MabTreeFamily {
  std::vector<TabularCdp> models;  // one per planted arm, arm = model index
  int truth_index = 0;             // caller may re-seat; default arm 0
};
MabTreeFamily build_mab_tree_family(int H, int K, double eps, int truth_arm = 0);

// ---- separation family ----
// 2^d factored models, O = {0, -1, +1, 2} stored as value indices
// {0:0, 1:-1, 2:+1, 3:2}, H = d+2, K = 2 (action 0 writes -1, action 1
// writes +1), self-parents, deterministic:
//   level h <= d   : variable h-1 takes the action's value, others persist;
//   level d+1      : variable i keeps p_i if it matches, else becomes 2
//                    (levels d+1 and d+2 ignore the action);
//   level d+2 = H  : identity; reward 1{no variable equals 2} at level H.
inline constexpr int kSepValZero = 0, kSepValMinus = 1, kSepValPlus = 2, kSepValTwo = 3;

std::vector<FactoredMdp> build_separation_family(int d);

// The unfactored twin: identical to expand(P^p) except the level-(d+1)
// transition maps every non-p history to the all-2 state.
std::vector<TabularCdp> build_tilde_family(int d);

// Planted path of model index p as value indices (bit b -> minus/plus).
std::vector<int> separation_path_values(int p, int d);

// ---- G-profiles ----
// A tabulated state-action function g[h-1][x][a] (a Q table or a policy
// probability table).
struct StateActionFn {
  std::vector<std::vector<std::vector<double>>> table;
};

struct GProfile {
  Eigen::MatrixXd values;  // |G| x K
};

// Q tables (and policy tables) of every plan, in class order; the only view a
// profile-restricted algorithm gets of a context.
std::vector<StateActionFn> profile_functions(const std::vector<PlannedModel>& cls,
                                             bool include_policies = true);

GProfile g_profile(const std::vector<StateActionFn>& G, int h, int x);

// True iff for every planted p and every action sequence, the profile
// sequence observed in P^p equals the one observed in the twin, with
// G = OP({P^p}) aligned to G~ = OP({P~^p}) by planted index.
bool profile_equivalence_check(int d);

// ---- overparameterization demo ----
struct OverparamClass {
  std::vector<TabularCdp> models;  // (3d+1) * 2^d members
  // member k pairs transition family `path[k]` with reward variant
  // `variant[k]`: -1 = original reward, else variant[k] = 3*i + j with
  // j in {0,1,2} meaning R_i^{(-1)}, R_i^{(+1)}, R_i^{(2)}.
  std::vector<int> path;
  std::vector<int> variant;
  int d = 0;
};
OverparamClass build_overparam_class(int d);

// Recover the variable assignment of a level-H state from the Q-profile rows
// of the reward-variant members (exactly one indicator per variable is 0;
// none means the variable is still 0).
std::vector<int> recover_state_from_profile(const OverparamClass& cls, const GProfile& profile,
                                            const std::vector<StateActionFn>& G);

// ---- profile-restricted learner ----
// Uniform best-arm search over the 2^d action sequences: plays arms in a
// seeded random order until it observes reward 1.  It interacts only through
// actions and rewards (profiles carry no usable state identity here).
struct LearnerResult {
  Policy policy;
  long long trajectories = 0;
  bool found = true;  // false when the budget ran out first
  int best_arm = -1;
};
LearnerResult profile_restricted_learner(const TabularCdp& env, int d, long long budget,
                                         RngStream rng);

}  // namespace witlab
