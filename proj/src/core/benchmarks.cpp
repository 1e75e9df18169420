#include "core/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

#include "core/witness_rank.hpp"

namespace witlab {

namespace {

long long ipow(long long b, int e) {
  long long r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

int deterministic_next(const std::vector<double>& row) {
  for (std::size_t y = 0; y < row.size(); ++y)
    if (row[y] > 0.5) return static_cast<int>(y);
  throw StructuralError("transition row is not deterministic");
}

}  // namespace

MabTreeFamily build_mab_tree_family(int H, int K, double eps, int truth_arm) {
  if (H < 2 || K < 2) throw StructuralError("MAB tree needs H >= 2 and K >= 2");
  if (eps < 0.0 || eps >= std::sqrt(1.0 / 8.0))
    throw StructuralError("MAB tree needs eps in [0, sqrt(1/8))");
  long long arms = ipow(K, H - 1);
  if (arms > kModelClassCap)
    throw CapacityError(fmt::format("K^(H-1) = {} exceeds the model-class cap {}", arms, kModelClassCap));

  MabTreeFamily fam;
  fam.truth_index = truth_arm;
  for (long long arm = 0; arm < arms; ++arm) {
    TabularCdp m;
    m.horizon = H;
    m.actions = K;
    m.level_sizes.resize(H + 1);
    for (int h = 1; h <= H - 1; ++h) m.level_sizes[h - 1] = static_cast<int>(ipow(K, h - 1));
    m.level_sizes[H - 1] = 2;  // {x*, x0}
    m.level_sizes[H] = 1;
    m.initial = {1.0};
    m.transitions.resize(H);
    m.rewards.resize(H);
    for (int h = 1; h <= H; ++h) {
      int n = m.states(h);
      m.transitions[h - 1].assign(n, std::vector<std::vector<double>>(K));
      m.rewards[h - 1].assign(n, std::vector<RewardDist>(K, RewardDist::point(0.0)));
      for (int x = 0; x < n; ++x)
        for (int a = 0; a < K; ++a) {
          std::vector<double> row(m.states(h + 1), 0.0);
          if (h <= H - 2) {
            row[x * K + a] = 1.0;  // extend the action history
          } else if (h == H - 1) {
            long long path = static_cast<long long>(x) * K + a;
            double p = 0.5 + (path == arm ? eps : 0.0);
            row[0] = p;        // x*
            row[1] = 1.0 - p;  // x0
          } else {  // h == H
            row[0] = 1.0;
            m.rewards[h - 1][x][a] = RewardDist::point(x == 0 ? 1.0 : 0.0);
          }
          m.transitions[h - 1][x][a] = std::move(row);
        }
    }
    fam.models.push_back(std::move(m));
  }
  return fam;
}

std::vector<int> separation_path_values(int p, int d) {
  std::vector<int> vals(d);
  for (int i = 0; i < d; ++i) vals[i] = ((p >> i) & 1) ? kSepValPlus : kSepValMinus;
  return vals;
}

std::vector<FactoredMdp> build_separation_family(int d) {
  if (d < 1) throw StructuralError("separation family needs d >= 1");
  const int H = d + 2;
  const int O = 4;
  std::vector<FactoredMdp> out;
  for (int p = 0; p < (1 << d); ++p) {
    std::vector<int> pv = separation_path_values(p, d);
    FactoredMdp f;
    f.d = d;
    f.num_values = O;
    f.horizon = H;
    f.actions = 2;
    f.parents.assign(d, {});
    for (int i = 0; i < d; ++i) f.parents[i] = {i};
    f.cpts.resize(H);
    for (int h = 1; h <= H; ++h) {
      f.cpts[h - 1].assign(d, {});
      for (int i = 0; i < d; ++i) {
        f.cpts[h - 1][i].assign(O, std::vector<std::vector<double>>(
                                       2, std::vector<double>(O, 0.0)));
        for (int u = 0; u < O; ++u)
          for (int a = 0; a < 2; ++a) {
            int nxt;
            if (h <= d) {
              nxt = (i == h - 1) ? (a == 0 ? kSepValMinus : kSepValPlus) : u;
            } else if (h == d + 1) {
              nxt = (u == pv[i]) ? u : kSepValTwo;
            } else {
              nxt = u;
            }
            f.cpts[h - 1][i][u][a][nxt] = 1.0;
          }
      }
    }
    f.rewards.resize(H);
    long long n = f.expanded_states();
    f.rewards[H - 1].assign(n, 0.0);
    for (long long x = 0; x < n; ++x) {
      std::vector<int> vals = decode_state(x, d, O);
      bool hit = std::none_of(vals.begin(), vals.end(), [](int v) { return v == kSepValTwo; });
      f.rewards[H - 1][x] = hit ? 1.0 : 0.0;
    }
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<TabularCdp> build_tilde_family(int d) {
  auto fam = build_separation_family(d);
  std::vector<TabularCdp> out;
  const int O = 4;
  std::vector<int> all2(d, kSepValTwo);
  long long all2_idx = encode_state(all2, O);
  for (int p = 0; p < (1 << d); ++p) {
    TabularCdp m = expand(fam[p]);
    long long p_idx = encode_state(separation_path_values(p, d), O);
    for (int x = 0; x < m.states(d + 1); ++x)
      for (int a = 0; a < m.actions; ++a) {
        auto& row = m.transitions[d][x][a];  // level d+1 transition
        std::fill(row.begin(), row.end(), 0.0);
        row[x == p_idx ? p_idx : all2_idx] = 1.0;
      }
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<StateActionFn> profile_functions(const std::vector<PlannedModel>& cls,
                                             bool include_policies) {
  std::vector<StateActionFn> G;
  for (const auto& pm : cls) G.push_back({pm.plan.Q});
  if (include_policies)
    for (const auto& pm : cls) G.push_back({pm.plan.policy.probs});
  return G;
}

GProfile g_profile(const std::vector<StateActionFn>& G, int h, int x) {
  if (G.empty()) throw StructuralError("g_profile: empty function list");
  if (h < 1 || h > static_cast<int>(G[0].table.size()))
    throw StructuralError("g_profile: level out of range");
  if (x < 0 || x >= static_cast<int>(G[0].table[h - 1].size()))
    throw StructuralError("g_profile: state out of range");
  const int K = static_cast<int>(G[0].table[h - 1][x].size());
  GProfile out;
  out.values.resize(static_cast<int>(G.size()), K);
  for (std::size_t g = 0; g < G.size(); ++g)
    for (int a = 0; a < K; ++a) out.values(static_cast<int>(g), a) = G[g].table[h - 1][x][a];
  return out;
}

bool profile_equivalence_check(int d) {
  auto fam = build_separation_family(d);
  std::vector<TabularCdp> pexp;
  pexp.reserve(fam.size());
  for (const auto& f : fam) pexp.push_back(expand(f));
  std::vector<TabularCdp> tilde = build_tilde_family(d);
  auto pcls = plan_class(pexp);
  auto tcls = plan_class(tilde);
  auto G = profile_functions(pcls);
  auto Gt = profile_functions(tcls);
  const int H = d + 2;
  for (int p = 0; p < (1 << d); ++p) {
    for (int seq = 0; seq < (1 << d); ++seq) {
      int x = 0, xt = 0;  // both start at the all-zero state
      for (int h = 1; h <= H; ++h) {
        GProfile a = g_profile(G, h, x);
        GProfile b = g_profile(Gt, h, xt);
        if ((a.values - b.values).cwiseAbs().maxCoeff() > 1e-12) return false;
        int act = h <= d ? ((seq >> (h - 1)) & 1) : 0;
        x = deterministic_next(pexp[p].transitions[h - 1][x][act]);
        xt = deterministic_next(tilde[p].transitions[h - 1][xt][act]);
      }
    }
  }
  return true;
}

OverparamClass build_overparam_class(int d) {
  auto fam = build_separation_family(d);
  OverparamClass out;
  out.d = d;
  const int O = 4;
  // reward-variant value j in {0,1,2} tests against these state values
  const int jvals[3] = {kSepValMinus, kSepValPlus, kSepValTwo};
  for (int p = 0; p < (1 << d); ++p) {
    TabularCdp base = expand(fam[p]);
    out.models.push_back(base);
    out.path.push_back(p);
    out.variant.push_back(-1);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < 3; ++j) {
        TabularCdp m = base;
        for (int x = 0; x < m.states(d + 2); ++x) {
          std::vector<int> vals = decode_state(x, d, O);
          double r = vals[i] != jvals[j] ? 1.0 : 0.0;
          for (int a = 0; a < m.actions; ++a)
            m.rewards[d + 1][x][a] = RewardDist::point(r);
        }
        out.models.push_back(std::move(m));
        out.path.push_back(p);
        out.variant.push_back(3 * i + j);
      }
  }
  return out;
}

std::vector<int> recover_state_from_profile(const OverparamClass& cls, const GProfile& profile,
                                            const std::vector<StateActionFn>& G) {
  (void)G;
  const int jvals[3] = {kSepValMinus, kSepValPlus, kSepValTwo};
  std::vector<int> assignment(cls.d, kSepValZero);
  for (int i = 0; i < cls.d; ++i) {
    int zero_j = -1;
    for (int j = 0; j < 3; ++j) {
      // Q rows are class-ordered; pick the variant member built on path 0.
      int row = -1;
      for (std::size_t k = 0; k < cls.models.size(); ++k)
        if (cls.path[k] == 0 && cls.variant[k] == 3 * i + j) {
          row = static_cast<int>(k);
          break;
        }
      if (row < 0) throw StructuralError("recover_state_from_profile: incomplete class");
      if (std::abs(profile.values(row, 0)) < 1e-9) {
        if (zero_j >= 0) throw InternalError("two reward indicators are zero at once");
        zero_j = j;
      }
    }
    assignment[i] = zero_j < 0 ? kSepValZero : jvals[zero_j];
  }
  return assignment;
}

LearnerResult profile_restricted_learner(const TabularCdp& env, int d, long long budget,
                                         RngStream rng) {
  const int arms = 1 << d;
  std::vector<int> order(arms);
  std::iota(order.begin(), order.end(), 0);
  for (int i = arms - 1; i > 0; --i)
    std::swap(order[i], order[rng.uniform_int(i + 1)]);

  auto arm_policy = [&](int arm) {
    std::vector<std::vector<int>> act(env.horizon);
    for (int h = 1; h <= env.horizon; ++h)
      act[h - 1].assign(env.states(h), h <= d ? ((arm >> (h - 1)) & 1) : 0);
    return Policy::deterministic(env, act);
  };

  LearnerResult res;
  res.policy = arm_policy(order[0]);  // placeholder until an arm pays off
  for (int k = 0; k < arms; ++k) {
    if (res.trajectories >= budget) {
      res.found = false;
      return res;
    }
    Policy pi = arm_policy(order[k]);
    RngStream traj = rng.substream(static_cast<std::uint64_t>(k));
    Trajectory t = sample_trajectory(env, pi, traj);
    ++res.trajectories;
    if (t.total_reward() > 0.5) {
      res.best_arm = order[k];
      res.policy = pi;
      res.found = true;
      return res;
    }
  }
  res.found = false;
  return res;
}

}  // namespace witlab
