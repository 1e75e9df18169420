#include "core/olime.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <fmt/core.h>

namespace witlab {

namespace {

long long ceil_ll(double v) { return static_cast<long long>(std::ceil(v)); }

// Hooks that specialize the loop for the tabular vs factored estimators.
struct MisfitHooks {
  std::function<double(int chosen, int target, int h)> exact;
  std::function<double(const MisfitDataset&, int target)> estimate;
};

RunRecord run_loop(const std::vector<PlannedModel>& cls, const TabularCdp& truth,
                   const AlgoConfig& cfg, const DerivedParams& par, const MisfitHooks& hooks,
                   RngStream rng, long long budget_start) {
  const int H = truth.horizon;
  const int K = truth.actions;
  RunRecord rec;
  rec.total_trajectories = budget_start;

  std::vector<int> vs(cls.size());
  for (std::size_t i = 0; i < cls.size(); ++i) vs[i] = static_cast<int>(i);

  auto spend = [&](long long count) {
    rec.total_trajectories += count;
    if (rec.total_trajectories > cfg.max_trajectories)
      rec.fault = fmt::format("trajectory budget {} exceeded ({} used)", cfg.max_trajectories,
                              rec.total_trajectories);
    return rec.fault.empty();
  };

  for (int t = 1; t <= par.T; ++t) {
    RoundRecord rd;
    rd.round = t;
    rd.survivors_before = vs;

    // Optimistic selection, lowest id on ties.
    int chosen = vs[0];
    for (int id : vs)
      if (cls[id].plan.value > cls[chosen].plan.value) chosen = id;
    rd.chosen = chosen;
    rd.v_model = cls[chosen].plan.value;
    const Policy& pi_t = cls[chosen].plan.policy;

    RngStream round_rng = rng.substream(static_cast<std::uint64_t>(t));

    // Evaluate pi^t (exactly, or by n_e sampled episodes which also serve as
    // the on-policy data for the empirical Bellman errors).
    std::vector<Trajectory> eval_data;
    if (cfg.oracle) {
      rd.v_hat = policy_value(truth, pi_t);
    } else {
      RngStream eval_rng = round_rng.substream("eval");
      if (!spend(par.n_e)) { rec.rounds.push_back(rd); break; }
      rd.trajectories += par.n_e;
      double sum = 0.0;
      eval_data.reserve(par.n_e);
      for (long long k = 0; k < par.n_e; ++k) {
        RngStream traj = eval_rng.substream(static_cast<std::uint64_t>(k));
        eval_data.push_back(sample_trajectory(truth, pi_t, traj));
        sum += eval_data.back().total_reward();
      }
      rd.v_hat = sum / static_cast<double>(par.n_e);
    }

    if (std::abs(rd.v_hat - rd.v_model) <= cfg.epsilon / 2.0) {
      rd.terminated = true;
      rec.rounds.push_back(rd);
      rec.output_policy = chosen;
      rec.success = true;
      break;
    }

    // Smallest level whose (exact or empirical) Bellman error clears eps/4H.
    const double level_threshold = cfg.epsilon / (4.0 * H);
    int h_t = -1;
    for (int h = 1; h <= H && h_t < 0; ++h) {
      double eb;
      if (cfg.oracle) {
        eb = bellman_error_exact(cls[chosen], cls[chosen], truth, h);
      } else {
        MisfitDataset d;
        d.level = h;
        d.mode = ActionMode::TargetPolicy;
        d.actions = K;
        for (const Trajectory& tr : eval_data) {
          int nxt = h < H ? tr.steps[h].x : tr.terminal;
          d.samples.push_back({tr.steps[h - 1].x, tr.steps[h - 1].a, tr.steps[h - 1].r, nxt});
        }
        eb = bellman_error_estimate(d, cls[chosen]);
      }
      if (eb >= level_threshold) h_t = h;
    }
    if (h_t < 0) {
      rec.rounds.push_back(rd);
      rec.fault = fmt::format(
          "round {}: no level with Bellman error >= {} although the value check failed", t,
          level_threshold);
      break;
    }
    rd.h_t = h_t;

    // Misfit of every survivor, exact or from n uniform-action episodes.
    std::vector<double> estimates;
    estimates.reserve(vs.size());
    if (cfg.oracle) {
      for (int id : vs) estimates.push_back(hooks.exact(chosen, id, h_t));
    } else {
      Policy explore = pi_t;
      for (auto& row : explore.probs[h_t - 1])
        row.assign(K, 1.0 / K);
      if (!spend(par.n)) { rec.rounds.push_back(rd); break; }
      rd.trajectories += par.n;
      MisfitDataset data;
      data.level = h_t;
      data.mode = ActionMode::Uniform;
      data.actions = K;
      RngStream col_rng = round_rng.substream("collect");
      for (long long k = 0; k < par.n; ++k) {
        RngStream traj = col_rng.substream(static_cast<std::uint64_t>(k));
        Trajectory tr = sample_trajectory(truth, explore, traj);
        int nxt = h_t < H ? tr.steps[h_t].x : tr.terminal;
        data.samples.push_back(
            {tr.steps[h_t - 1].x, tr.steps[h_t - 1].a, tr.steps[h_t - 1].r, nxt});
      }
      for (int id : vs) estimates.push_back(hooks.estimate(data, id));
    }
    rd.misfits = estimates;

    std::vector<int> survivors = eliminate(vs, estimates, par.phi);
    for (int id : vs)
      if (std::find(survivors.begin(), survivors.end(), id) == survivors.end())
        rd.eliminated.push_back(id);
    rec.rounds.push_back(rd);
    if (survivors.empty()) {
      rec.fault = fmt::format("round {}: version space emptied (phi = {})", t, par.phi);
      break;
    }
    vs = survivors;
  }

  rec.final_version_space = vs;
  if (!rec.success && rec.fault.empty())
    rec.fault = fmt::format("round cap T = {} reached without termination", par.T);
  if (rec.output_policy < 0 && !rec.rounds.empty()) rec.output_policy = rec.rounds.back().chosen;
  return rec;
}

}  // namespace

DerivedParams derive_params(const AlgoConfig& cfg, int horizon, int actions,
                            std::size_t class_size, std::size_t f_size) {
  DerivedParams p;
  const double H = horizon;
  const double wrank = std::max(cfg.wrank, 1.0);
  p.phi = cfg.phi >= 0.0 ? cfg.phi
                         : cfg.kappa * cfg.epsilon / (48.0 * H * std::sqrt(wrank));
  if (cfg.max_rounds > 0) {
    p.T = cfg.max_rounds;
  } else {
    double ratio = std::max(cfg.beta / (2.0 * p.phi), std::exp(1.0));
    p.T = static_cast<int>(std::ceil(H * wrank * std::log(ratio) / std::log(5.0 / 3.0)));
    p.T = std::max(p.T, 1);
  }
  if (cfg.n_e > 0) {
    p.n_e = cfg.n_e;
  } else {
    p.n_e = std::max<long long>(
        1, ceil_ll(cfg.ne_multiplier * H * H *
                   std::log(std::max(2.0, H * p.T / cfg.delta)) /
                   (cfg.epsilon * cfg.epsilon)));
  }
  if (cfg.n > 0) {
    p.n = cfg.n;
  } else {
    double log_arg = std::max(
        2.0, static_cast<double>(p.T) * static_cast<double>(class_size) *
                 static_cast<double>(std::max<std::size_t>(f_size, 1)) / cfg.delta);
    double ke = cfg.kappa * cfg.epsilon;
    p.n = std::max<long long>(
        1, ceil_ll(cfg.n_multiplier * H * H * actions * wrank * std::log(log_arg) / (ke * ke)));
  }
  return p;
}

std::vector<int> eliminate(const std::vector<int>& version_space,
                           const std::vector<double>& estimates, double phi) {
  if (estimates.size() != version_space.size())
    throw StructuralError("eliminate: one estimate per survivor required");
  std::vector<int> out;
  for (std::size_t i = 0; i < version_space.size(); ++i)
    if (estimates[i] <= phi) out.push_back(version_space[i]);
  return out;
}

RunRecord run_main(const std::vector<PlannedModel>& cls, const TabularCdp& truth,
                   const TestFunctionClass& F, const AlgoConfig& cfg, RngStream rng) {
  if (cls.empty()) throw StructuralError("run_main: empty model class");
  std::size_t f_size = cfg.f_size > 0 ? static_cast<std::size_t>(cfg.f_size)
                                      : std::max<std::size_t>(F.size(), 2);
  DerivedParams par = derive_params(cfg, truth.horizon, truth.actions, cls.size(), f_size);
  MisfitHooks hooks;
  hooks.exact = [&](int chosen, int target, int h) {
    return witnessed_misfit_exact(cls[chosen], cls[target], truth, h, F);
  };
  hooks.estimate = [&](const MisfitDataset& data, int target) {
    return witnessed_misfit_estimate(data, cls[target], F);
  };
  return run_loop(cls, truth, cfg, par, hooks, rng, 0);
}

RunRecord run_doubling(const std::vector<PlannedModel>& cls, const TabularCdp& truth,
                       const TestFunctionClass& F, const AlgoConfig& cfg, RngStream rng) {
  if (cls.empty()) throw StructuralError("run_doubling: empty model class");
  std::size_t f_size = cfg.f_size > 0 ? static_cast<std::size_t>(cfg.f_size)
                                      : std::max<std::size_t>(F.size(), 2);
  RunRecord best;
  long long used = 0;
  constexpr int kMaxEpochs = 40;
  for (int i = 1; i <= kMaxEpochs; ++i) {
    double N_i = std::pow(2.0, i - 1);
    double delta_i = cfg.delta / (static_cast<double>(i) * (i + 1));
    for (int j = 1;; ++j) {
      double kappa_ij = std::pow(0.5, j - 1);
      double wrank_ij = N_i * kappa_ij;
      if (wrank_ij < 1.0) break;  // doubling schedule's inner break rule
      AlgoConfig inner = cfg;
      inner.kappa = kappa_ij;
      inner.wrank = wrank_ij;
      inner.delta = delta_i / (static_cast<double>(j) * (j + 1));
      inner.phi = -1.0;
      inner.n = 0;
      inner.n_e = 0;
      inner.max_rounds = 0;
      DerivedParams par = derive_params(inner, truth.horizon, truth.actions, cls.size(), f_size);
      MisfitHooks hooks;
      hooks.exact = [&](int chosen, int target, int h) {
        return witnessed_misfit_exact(cls[chosen], cls[target], truth, h, F);
      };
      hooks.estimate = [&](const MisfitDataset& data, int target) {
        return witnessed_misfit_estimate(data, cls[target], F);
      };
      RngStream inner_rng = rng.substream(fmt::format("epoch-{}-{}", i, j));
      RunRecord rec = run_loop(cls, truth, inner, par, hooks, inner_rng, used);
      used = rec.total_trajectories;
      best.doubling.insert(best.doubling.end(), rec.doubling.begin(), rec.doubling.end());
      best.doubling.push_back({i, j, kappa_ij, wrank_ij, rec.success});
      if (rec.success || rec.fault.rfind("trajectory budget", 0) == 0) {
        rec.doubling = best.doubling;
        return rec;
      }
    }
  }
  best.fault = fmt::format("doubling trick exhausted {} epochs without success", kMaxEpochs);
  best.total_trajectories = used;
  return best;
}

RunRecord run_factored(const std::vector<FactoredMdp>& fclass, int truth_index,
                       const AlgoConfig& cfg, RngStream rng) {
  if (fclass.empty()) throw StructuralError("run_factored: empty model class");
  for (const auto& f : fclass)
    if (!same_structure(f, fclass[truth_index]))
      throw StructuralError("run_factored: class members differ in factored structure");
  // Expand one model at a time; sampling mode only ever touches the plans
  // (and the expanded truth), so the dense expansions of the other members
  // can be dropped immediately to keep large-d classes within memory.
  std::vector<PlannedModel> cls(fclass.size());
  TabularCdp truth;
  for (std::size_t i = 0; i < fclass.size(); ++i) {
    TabularCdp m = expand(fclass[i]);
    cls[i].plan = plan(m);
    if (static_cast<int>(i) == truth_index) truth = m;
    if (cfg.oracle) cls[i].model = std::move(m);
  }
  const FactoredMdp& ftruth = fclass[truth_index];

  AlgoConfig fc = cfg;
  if (fc.kappa == 1.0) fc.kappa = 1.0 / ftruth.actions;
  if (fc.wrank <= 1.0)
    fc.wrank = static_cast<double>(ftruth.parameter_count_per_level()) / ftruth.num_values;
  // log |F| term: the sign class has 2^{L_h} members, so log|F| = L_h log 2.
  std::size_t f_size = fc.f_size > 0
                           ? static_cast<std::size_t>(fc.f_size)
                           : static_cast<std::size_t>(1)
                                 << std::min<long long>(ftruth.parameter_count_per_level(), 40);
  DerivedParams par = derive_params(fc, truth.horizon, truth.actions, cls.size(), f_size);
  MisfitHooks hooks;
  hooks.exact = [&](int chosen, int target, int h) {
    return factored_misfit_exact(truth, cls[chosen].plan.policy, fclass[target], ftruth, h);
  };
  hooks.estimate = [&](const MisfitDataset& data, int target) {
    return factored_misfit_estimate(data, fclass[target]);
  };
  return run_loop(cls, truth, fc, par, hooks, rng, 0);
}

}  // namespace witlab
