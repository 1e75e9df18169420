#pragma once

#include <cstdint>
#include <vector>

#include "core/model.hpp"

namespace witlab {

inline constexpr long long kExpansionCap = 1'000'000;  // states per level

// Factored layered MDP.  Every level's context is an assignment in O^d; the
// transition factorizes per variable over its parent set:
//   P(x' | x, a) = prod_i P^(i)[ x'[i] | x[pa_i], a, h ].
// cpts[h-1][i][u][a] is a probability vector over O, where u indexes the
// assignment of pa_i in base |O| (first parent least significant).
// Rewards are deterministic, action-independent values per expanded state:
// rewards[h-1][state_index] is the reward of any action taken at level h
// (empty vector means all-zero level).
struct FactoredMdp {
  int d = 0;           // number of state variables
  int num_values = 0;  // |O|
  int horizon = 0;     // H
  int actions = 0;     // K
  std::vector<std::vector<int>> parents;                                  // [i]
  std::vector<std::vector<std::vector<std::vector<std::vector<double>>>>> cpts;  // [h-1][i][u][a][o]
  std::vector<std::vector<double>> rewards;                               // [h-1][state]
  std::vector<double> initial;  // over expanded states at level 1; empty = point mass at 0

  // Parameter count L = sum_i H*K*|O|^(1+|pa_i|) and its per-level share.
  long long parameter_count() const;
  long long parameter_count_per_level() const;  // L_h
  long long expanded_states() const;            // |O|^d

  // Parent-assignment index of expanded state index `x` for variable i.
  int parent_index(long long x, int i) const;
};

// Decode/encode expanded state indices (variable 0 least significant).
std::vector<int> decode_state(long long index, int d, int num_values);
long long encode_state(const std::vector<int>& assignment, int num_values);

void validate(const FactoredMdp& fmdp);

// Expanded tabular model: O^d states per level, CPT-product transitions.
// Throws CapacityError when |O|^d exceeds the cap.
TabularCdp expand(const FactoredMdp& fmdp, long long cap = kExpansionCap);

// True iff the two models share (d, |O|, H, K, parent sets).
bool same_structure(const FactoredMdp& a, const FactoredMdp& b);

}  // namespace witlab
