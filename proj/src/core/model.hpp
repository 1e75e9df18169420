#pragma once

#include <string>
#include <vector>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace witlab {

inline constexpr double kProbTol = 1e-12;

// Finite discrete reward distribution over values in [0, 1].
struct RewardDist {
  std::vector<double> values;
  std::vector<double> probs;

  double mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) m += values[i] * probs[i];
    return m;
  }
  double max_value() const {
    double m = 0.0;
    for (double v : values) m = v > m ? v : m;
    return m;
  }
  static RewardDist point(double v) { return RewardDist{{v}, {1.0}}; }
  static RewardDist bernoulli(double p) { return RewardDist{{0.0, 1.0}, {1.0 - p, p}}; }
};

// Finite layered episodic decision process.  Levels are 1..H+1; contexts at
// level h are indices 0..level_sizes[h-1]-1.  transitions[h-1][x][a] is a
// probability vector over level h+1; rewards[h-1][x][a] is the reward law of
// step h.
struct TabularCdp {
  int horizon = 0;  // H
  int actions = 0;  // K
  std::vector<int> level_sizes;  // size H+1
  std::vector<double> initial;   // over level 1
  std::vector<std::vector<std::vector<std::vector<double>>>> transitions;
  std::vector<std::vector<std::vector<RewardDist>>> rewards;

  int states(int h) const { return level_sizes[h - 1]; }  // h in 1..H+1
};

// Per-level stochastic policy; probs[h-1][x] is a distribution over actions.
struct Policy {
  std::vector<std::vector<std::vector<double>>> probs;

  double prob(int h, int x, int a) const { return probs[h - 1][x][a]; }
  static Policy uniform(const TabularCdp& m);
  static Policy deterministic(const TabularCdp& m, const std::vector<std::vector<int>>& act);
  bool operator==(const Policy&) const = default;
};

// Output of exact optimal planning.
struct PlanResult {
  std::vector<std::vector<std::vector<double>>> Q;  // [h-1][x][a], h in 1..H
  std::vector<std::vector<double>> V;               // [h-1][x], h in 1..H+1 (last all 0)
  Policy policy;                                    // greedy, lowest-index ties
  double value = 0.0;                               // v_M
};

struct TrajectoryStep {
  int x = 0, a = 0;
  double r = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;  // h = 1..H
  int terminal = 0;                   // x_{H+1}
  std::uint64_t stream_id = 0;

  double total_reward() const {
    double s = 0.0;
    for (const auto& st : steps) s += st.r;
    return s;
  }
};

// Model together with its plan; most misfit/algorithm code needs both.
struct PlannedModel {
  TabularCdp model;
  PlanResult plan;
};

// ---- operations ----

// Throws ValidationError / StructuralError on any invariant violation,
// including the max-cumulative-reward DP check (sum of rewards <= 1 a.s.).
void validate(const TabularCdp& model);

// Exact finite-horizon backward DP; greedy ties broken to the lowest action.
PlanResult plan(const TabularCdp& model);

// Exact v^pi in true_model by forward occupancy DP.
double policy_value(const TabularCdp& true_model, const Policy& pi);

// Exact marginal distribution of x_h under pi in true_model, 1 <= h <= H.
std::vector<double> occupancy(const TabularCdp& true_model, const Policy& pi, int h);

// One sampled episode; identical stream -> identical trajectory.
Trajectory sample_trajectory(const TabularCdp& true_model, const Policy& pi, RngStream& rng);

// Plan every model of a class.
std::vector<PlannedModel> plan_class(const std::vector<TabularCdp>& models);

}  // namespace witlab
