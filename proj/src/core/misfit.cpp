#include "core/misfit.hpp"

#include <cmath>
#include <map>

#include <fmt/core.h>

namespace witlab {

namespace {

// Occupancy-weighted (x, a) distribution at level h: x ~ pi_M in truth,
// a ~ pi_{M'}.
std::vector<std::vector<double>> level_weights(const TabularCdp& truth, const Policy& roll_in,
                                               const Policy& act, int h) {
  std::vector<double> occ = occupancy(truth, roll_in, h);
  std::vector<std::vector<double>> w(occ.size(), std::vector<double>(truth.actions, 0.0));
  for (std::size_t x = 0; x < occ.size(); ++x) {
    if (occ[x] == 0.0) continue;
    for (int a = 0; a < truth.actions; ++a) w[x][a] = occ[x] * act.prob(h, static_cast<int>(x), a);
  }
  return w;
}

}  // namespace

double witnessed_misfit_exact(const PlannedModel& roll_in, const PlannedModel& target,
                              const TabularCdp& truth, int h, const TestFunctionClass& F) {
  if (h < 1 || h > truth.horizon)
    throw StructuralError(fmt::format("misfit level {} out of range", h));
  auto w = level_weights(truth, roll_in.plan.policy, target.plan.policy, h);

  switch (F.kind) {
    case FcKind::Finite:
    case FcKind::Scheffe: {
      double best = 0.0;
      for (const WitnessFunction& f : F.functions) {
        double s = 0.0;
        for (std::size_t x = 0; x < w.size(); ++x)
          for (int a = 0; a < truth.actions; ++a) {
            if (w[x][a] == 0.0) continue;
            s += w[x][a] * (f.expect(target.model, h, static_cast<int>(x), a) -
                            f.expect(truth, h, static_cast<int>(x), a));
          }
        best = std::max(best, s);
      }
      return best;
    }
    case FcKind::TvBall: {
      double total = 0.0;
      for (std::size_t x = 0; x < w.size(); ++x)
        for (int a = 0; a < truth.actions; ++a) {
          if (w[x][a] == 0.0) continue;
          auto support =
              merged_reward_support({&target.model, &truth}, h, static_cast<int>(x), a);
          JointDist p = joint_conditional(target.model, h, static_cast<int>(x), a, support);
          JointDist q = joint_conditional(truth, h, static_cast<int>(x), a, support);
          total += w[x][a] * F.tv_bound * tv_supremum(p, q).value;
        }
      return total;
    }
    case FcKind::ExpFamily: {
      double total = 0.0;
      for (std::size_t x = 0; x < w.size(); ++x)
        for (int a = 0; a < truth.actions; ++a) {
          if (w[x][a] == 0.0) continue;
          std::vector<double> diff(F.statistics.size());
          for (std::size_t k = 0; k < F.statistics.size(); ++k)
            diff[k] = F.statistics[k].expect(target.model, h, static_cast<int>(x), a) -
                      F.statistics[k].expect(truth, h, static_cast<int>(x), a);
          total += w[x][a] * expfam_supremum(diff);
        }
      return total;
    }
    case FcKind::FactoredSum:
      throw StructuralError("FactoredSum misfit requires the factored models; use factored_misfit_exact");
  }
  return 0.0;
}

double bellman_error_exact(const PlannedModel& roll_in, const PlannedModel& target,
                           const TabularCdp& truth, int h) {
  if (h < 1 || h > truth.horizon)
    throw StructuralError(fmt::format("bellman error level {} out of range", h));
  const int K = truth.actions;
  auto w = level_weights(truth, roll_in.plan.policy, target.plan.policy, h);
  const auto& Qp = target.plan.Q;
  const Policy& pip = target.plan.policy;

  double residual = 0.0;  // E[Q'(x,a) - r - Q'(x', a')], a' ~ pi_{M'}
  double model_form = 0.0;  // E[(E_{M'} - E_{M*})(r + V_{M'}(x'))]  (Fact-1 form)
  for (std::size_t x = 0; x < w.size(); ++x)
    for (int a = 0; a < K; ++a) {
      if (w[x][a] == 0.0) continue;
      double q = Qp[h - 1][x][a];
      double r_true = truth.rewards[h - 1][x][a].mean();
      const auto& row_true = truth.transitions[h - 1][x][a];
      double cont = 0.0;  // E_{x' ~ M*}[Q'(x', a')], a' ~ pi_{M'}
      double v_true = 0.0;  // E_{x' ~ M*}[V_{M'}(x')]
      for (int y = 0; y < truth.states(h + 1); ++y) {
        if (row_true[y] == 0.0) continue;
        if (h < truth.horizon) {
          double qy = 0.0;
          for (int ap = 0; ap < K; ++ap) qy += pip.prob(h + 1, y, ap) * Qp[h][y][ap];
          cont += row_true[y] * qy;
        }
        v_true += row_true[y] * target.plan.V[h][y];
      }
      residual += w[x][a] * (q - r_true - cont);
      double r_target = target.model.rewards[h - 1][x][a].mean();
      const auto& row_target = target.model.transitions[h - 1][x][a];
      double v_target = 0.0;
      for (int y = 0; y < target.model.states(h + 1); ++y)
        v_target += row_target[y] * target.plan.V[h][y];
      model_form += w[x][a] * ((r_target + v_target) - (r_true + v_true));
    }
  if (std::abs(residual - model_form) > 1e-9)
    throw InternalError(fmt::format(
        "Bellman error forms disagree at h={}: residual {} vs model form {}", h, residual,
        model_form));
  return residual;
}

double witnessed_misfit_estimate(const MisfitDataset& data, const PlannedModel& target,
                                 const TestFunctionClass& F) {
  if (data.samples.empty()) throw StructuralError("witnessed_misfit_estimate: empty data");
  if (data.mode != ActionMode::Uniform)
    throw StructuralError("witnessed_misfit_estimate requires uniform-action data");
  if (F.kind != FcKind::Finite && F.kind != FcKind::Scheffe)
    throw StructuralError("the importance-weighted estimator needs a finite test class");
  const int h = data.level;
  const int K = data.actions;
  double best = 0.0;
  for (const WitnessFunction& f : F.functions) {
    double s = 0.0;
    for (const MisfitSample& z : data.samples) {
      double rho = K * target.plan.policy.prob(h, z.x, z.a);
      if (rho == 0.0) continue;
      s += rho * (f.expect(target.model, h, z.x, z.a) - f.eval(h, z.x, z.a, z.r, z.next));
    }
    best = std::max(best, s / static_cast<double>(data.samples.size()));
  }
  return best;
}

double bellman_error_estimate(const MisfitDataset& data, const PlannedModel& target) {
  if (data.samples.empty()) throw StructuralError("bellman_error_estimate: empty data");
  const int h = data.level;
  double s = 0.0;
  for (const MisfitSample& z : data.samples)
    s += target.plan.Q[h - 1][z.x][z.a] - (z.r + target.plan.V[h][z.next]);
  return s / static_cast<double>(data.samples.size());
}

double factored_misfit_exact(const TabularCdp& expanded_truth, const Policy& roll_in,
                             const FactoredMdp& target, const FactoredMdp& truth, int h) {
  if (!same_structure(target, truth))
    throw StructuralError("factored_misfit_exact: factored structures differ");
  std::vector<double> occ = occupancy(expanded_truth, roll_in, h);
  const int K = truth.actions;
  double total = 0.0;
  for (std::size_t x = 0; x < occ.size(); ++x) {
    if (occ[x] == 0.0) continue;
    for (int a = 0; a < K; ++a) {
      double tv_sum = 0.0;
      for (int i = 0; i < truth.d; ++i) {
        int u = truth.parent_index(static_cast<long long>(x), i);
        const auto& pt = target.cpts[h - 1][i][u][a];
        const auto& ps = truth.cpts[h - 1][i][u][a];
        for (int o = 0; o < truth.num_values; ++o) tv_sum += std::abs(pt[o] - ps[o]);
      }
      total += occ[x] * (1.0 / K) * tv_sum;
    }
  }
  return total;
}

double factored_misfit_estimate(const MisfitDataset& data, const FactoredMdp& target) {
  if (data.samples.empty()) throw StructuralError("factored_misfit_estimate: empty data");
  if (data.mode != ActionMode::Uniform)
    throw StructuralError("factored_misfit_estimate requires uniform-action data");
  const int h = data.level;
  // Group into cells (i, u, a); within a cell the sign witness is chosen per
  // next value o, which maximizes the whole sum exactly (separability).
  std::map<std::tuple<int, int, int>, std::pair<long long, std::vector<long long>>> cells;
  for (const MisfitSample& z : data.samples) {
    auto xi = decode_state(z.next, target.d, target.num_values);
    for (int i = 0; i < target.d; ++i) {
      int u = target.parent_index(z.x, i);
      auto& cell = cells[{i, u, z.a}];
      if (cell.second.empty()) cell.second.assign(target.num_values, 0);
      cell.first += 1;
      cell.second[xi[i]] += 1;
    }
  }
  double total = 0.0;
  for (const auto& [key, cell] : cells) {
    auto [i, u, a] = key;
    const auto& p = target.cpts[h - 1][i][u][a];
    for (int o = 0; o < target.num_values; ++o)
      total += std::abs(static_cast<double>(cell.first) * p[o] -
                        static_cast<double>(cell.second[o]));
  }
  return total / static_cast<double>(data.samples.size());
}

}  // namespace witlab
