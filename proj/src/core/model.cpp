#include "core/model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

namespace witlab {

namespace {

void check_prob_vector(const std::vector<double>& p, const std::string& what,
                       int h, int x, int a) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw ValidationError(fmt::format("{}: negative entry", what), h, x, a);
    sum += v;
  }
  if (std::abs(sum - 1.0) > kProbTol)
    throw ValidationError(fmt::format("{}: sums to {} (not 1 within 1e-12)", what, sum), h, x, a);
}

}  // namespace

Policy Policy::uniform(const TabularCdp& m) {
  Policy pi;
  pi.probs.resize(m.horizon);
  for (int h = 1; h <= m.horizon; ++h)
    pi.probs[h - 1].assign(m.states(h), std::vector<double>(m.actions, 1.0 / m.actions));
  return pi;
}

Policy Policy::deterministic(const TabularCdp& m, const std::vector<std::vector<int>>& act) {
  Policy pi;
  pi.probs.resize(m.horizon);
  for (int h = 1; h <= m.horizon; ++h) {
    pi.probs[h - 1].assign(m.states(h), std::vector<double>(m.actions, 0.0));
    for (int x = 0; x < m.states(h); ++x) pi.probs[h - 1][x][act[h - 1][x]] = 1.0;
  }
  return pi;
}

void validate(const TabularCdp& model) {
  const int H = model.horizon;
  const int K = model.actions;
  if (H < 1) throw StructuralError("horizon must be >= 1");
  if (K < 1) throw StructuralError("action count must be >= 1");
  if (static_cast<int>(model.level_sizes.size()) != H + 1)
    throw StructuralError("level_sizes must have H+1 entries");
  for (int n : model.level_sizes)
    if (n < 1) throw StructuralError("every level must be non-empty");
  if (static_cast<int>(model.initial.size()) != model.states(1))
    throw StructuralError("initial distribution size mismatch");
  check_prob_vector(model.initial, "initial distribution", 1, -1, -1);

  if (static_cast<int>(model.transitions.size()) != H ||
      static_cast<int>(model.rewards.size()) != H)
    throw StructuralError("transitions/rewards must have H levels");
  for (int h = 1; h <= H; ++h) {
    if (static_cast<int>(model.transitions[h - 1].size()) != model.states(h) ||
        static_cast<int>(model.rewards[h - 1].size()) != model.states(h))
      throw StructuralError(fmt::format("level {} state-count mismatch", h));
    for (int x = 0; x < model.states(h); ++x) {
      if (static_cast<int>(model.transitions[h - 1][x].size()) != K ||
          static_cast<int>(model.rewards[h - 1][x].size()) != K)
        throw StructuralError(fmt::format("level {} state {}: action-count mismatch", h, x));
      for (int a = 0; a < K; ++a) {
        const auto& row = model.transitions[h - 1][x][a];
        if (static_cast<int>(row.size()) != model.states(h + 1))
          throw StructuralError(fmt::format("transition row size mismatch at h={} x={} a={}", h, x, a));
        check_prob_vector(row, "transition row", h, x, a);
        const auto& rd = model.rewards[h - 1][x][a];
        if (rd.values.empty() || rd.values.size() != rd.probs.size())
          throw ValidationError("reward distribution malformed", h, x, a);
        check_prob_vector(rd.probs, "reward distribution", h, x, a);
        for (double v : rd.values)
          if (v < 0.0 || v > 1.0)
            throw ValidationError(fmt::format("reward support value {} outside [0,1]", v), h, x, a);
      }
    }
  }

  // Max achievable cumulative reward by DP over reward supports; a sufficient
  // check for sum_h r_h <= 1 almost surely.
  std::vector<double> best(model.states(H + 1), 0.0);
  int arg_h = -1, arg_x = -1, arg_a = -1;
  for (int h = H; h >= 1; --h) {
    std::vector<double> cur(model.states(h), 0.0);
    for (int x = 0; x < model.states(h); ++x) {
      double m = 0.0;
      for (int a = 0; a < K; ++a) {
        double nxt = 0.0;
        const auto& row = model.transitions[h - 1][x][a];
        for (int y = 0; y < model.states(h + 1); ++y)
          if (row[y] > 0.0) nxt = std::max(nxt, best[y]);
        double total = model.rewards[h - 1][x][a].max_value() + nxt;
        if (total > m) {
          m = total;
          if (total > 1.0 + kProbTol) { arg_h = h; arg_x = x; arg_a = a; }
        }
      }
      cur[x] = m;
    }
    best = std::move(cur);
  }
  double reachable_max = 0.0;
  for (int x = 0; x < model.states(1); ++x)
    if (model.initial[x] > 0.0) reachable_max = std::max(reachable_max, best[x]);
  if (reachable_max > 1.0 + kProbTol)
    throw ValidationError(
        fmt::format("maximum cumulative reward {} exceeds 1", reachable_max),
        arg_h, arg_x, arg_a);
}

PlanResult plan(const TabularCdp& model) {
  const int H = model.horizon;
  const int K = model.actions;
  PlanResult res;
  res.Q.resize(H);
  res.V.resize(H + 1);
  res.V[H].assign(model.states(H + 1), 0.0);
  std::vector<std::vector<int>> greedy(H);
  for (int h = H; h >= 1; --h) {
    const int n = model.states(h);
    res.Q[h - 1].assign(n, std::vector<double>(K, 0.0));
    res.V[h - 1].assign(n, 0.0);
    greedy[h - 1].assign(n, 0);
    for (int x = 0; x < n; ++x) {
      double best = -1.0;
      int best_a = 0;
      for (int a = 0; a < K; ++a) {
        double q = model.rewards[h - 1][x][a].mean();
        const auto& row = model.transitions[h - 1][x][a];
        for (int y = 0; y < model.states(h + 1); ++y) q += row[y] * res.V[h][y];
        res.Q[h - 1][x][a] = q;
        if (q > best) { best = q; best_a = a; }
      }
      res.V[h - 1][x] = best;
      greedy[h - 1][x] = best_a;
    }
  }
  res.policy = Policy::deterministic(model, greedy);
  res.value = 0.0;
  for (int x = 0; x < model.states(1); ++x) res.value += model.initial[x] * res.V[0][x];
  return res;
}

std::vector<double> occupancy(const TabularCdp& true_model, const Policy& pi, int h) {
  if (h < 1 || h > true_model.horizon)
    throw StructuralError(fmt::format("occupancy level {} out of range 1..{}", h, true_model.horizon));
  if (static_cast<int>(pi.probs.size()) != true_model.horizon)
    throw StructuralError("policy/model horizon mismatch");
  std::vector<double> cur = true_model.initial;
  for (int g = 1; g < h; ++g) {
    if (static_cast<int>(pi.probs[g - 1].size()) != true_model.states(g))
      throw StructuralError("policy/model level size mismatch");
    std::vector<double> nxt(true_model.states(g + 1), 0.0);
    for (int x = 0; x < true_model.states(g); ++x) {
      if (cur[x] == 0.0) continue;
      for (int a = 0; a < true_model.actions; ++a) {
        double w = cur[x] * pi.prob(g, x, a);
        if (w == 0.0) continue;
        const auto& row = true_model.transitions[g - 1][x][a];
        for (int y = 0; y < true_model.states(g + 1); ++y) nxt[y] += w * row[y];
      }
    }
    cur = std::move(nxt);
  }
  return cur;
}

double policy_value(const TabularCdp& true_model, const Policy& pi) {
  if (static_cast<int>(pi.probs.size()) != true_model.horizon)
    throw StructuralError("policy/model horizon mismatch");
  double v = 0.0;
  std::vector<double> cur = true_model.initial;
  for (int h = 1; h <= true_model.horizon; ++h) {
    if (static_cast<int>(pi.probs[h - 1].size()) != true_model.states(h))
      throw StructuralError("policy/model level size mismatch");
    std::vector<double> nxt(true_model.states(h + 1), 0.0);
    for (int x = 0; x < true_model.states(h); ++x) {
      if (cur[x] == 0.0) continue;
      for (int a = 0; a < true_model.actions; ++a) {
        double w = cur[x] * pi.prob(h, x, a);
        if (w == 0.0) continue;
        v += w * true_model.rewards[h - 1][x][a].mean();
        const auto& row = true_model.transitions[h - 1][x][a];
        for (int y = 0; y < true_model.states(h + 1); ++y) nxt[y] += w * row[y];
      }
    }
    cur = std::move(nxt);
  }
  return v;
}

Trajectory sample_trajectory(const TabularCdp& true_model, const Policy& pi, RngStream& rng) {
  Trajectory t;
  int x = rng.pick(true_model.initial);
  for (int h = 1; h <= true_model.horizon; ++h) {
    int a = rng.pick(pi.probs[h - 1][x]);
    const RewardDist& rd = true_model.rewards[h - 1][x][a];
    double r = rd.values[rng.pick(rd.probs)];
    int y = rng.pick(true_model.transitions[h - 1][x][a]);
    t.steps.push_back({x, a, r});
    x = y;
  }
  t.terminal = x;
  return t;
}

std::vector<PlannedModel> plan_class(const std::vector<TabularCdp>& models) {
  std::vector<PlannedModel> out;
  out.reserve(models.size());
  for (const auto& m : models) out.push_back({m, plan(m)});
  return out;
}

}  // namespace witlab
