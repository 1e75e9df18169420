#include "core/generators.hpp"

#include <algorithm>
#include <cmath>

namespace witlab {

std::vector<double> random_simplex(int n, RngStream& rng) {
  std::vector<double> v(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    v[i] = -std::log(1.0 - rng.uniform());
    sum += v[i];
  }
  for (int i = 0; i < n; ++i) v[i] /= sum;
  // renormalize exactly against accumulated rounding
  double s2 = 0.0;
  for (int i = 0; i + 1 < n; ++i) s2 += v[i];
  v[n - 1] = 1.0 - s2;
  return v;
}

void mix_row(std::vector<double>& row, double alpha, RngStream& rng) {
  auto fresh = random_simplex(static_cast<int>(row.size()), rng);
  double s = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    row[i] = (1.0 - alpha) * row[i] + alpha * fresh[i];
    if (i + 1 < row.size()) s += row[i];
  }
  row.back() = 1.0 - s;
}

std::vector<int> random_level_sizes(int H, int max_states, RngStream& rng) {
  std::vector<int> sizes(H + 1);
  for (int& s : sizes) s = 1 + rng.uniform_int(max_states);
  return sizes;
}

TabularCdp random_tabular(const std::vector<int>& level_sizes, int K, RngStream& rng) {
  TabularCdp m;
  m.horizon = static_cast<int>(level_sizes.size()) - 1;
  m.actions = K;
  m.level_sizes = level_sizes;
  m.initial = random_simplex(m.states(1), rng);
  m.transitions.resize(m.horizon);
  m.rewards.resize(m.horizon);
  const double unit = 1.0 / m.horizon;  // per-level reward budget
  for (int h = 1; h <= m.horizon; ++h) {
    m.transitions[h - 1].assign(m.states(h), std::vector<std::vector<double>>(K));
    m.rewards[h - 1].assign(m.states(h), std::vector<RewardDist>(K));
    for (int x = 0; x < m.states(h); ++x)
      for (int a = 0; a < K; ++a) {
        m.transitions[h - 1][x][a] = random_simplex(m.states(h + 1), rng);
        double p = rng.uniform();
        m.rewards[h - 1][x][a] = RewardDist{{0.0, unit}, {1.0 - p, p}};
      }
  }
  return m;
}

std::vector<TabularCdp> random_tabular_class(const std::vector<int>& level_sizes, int K,
                                             int count, RngStream& rng, double perturbation) {
  std::vector<TabularCdp> out;
  out.push_back(random_tabular(level_sizes, K, rng));
  for (int c = 1; c < count; ++c) {
    TabularCdp m = out[0];
    for (int h = 1; h <= m.horizon; ++h)
      for (int x = 0; x < m.states(h); ++x)
        for (int a = 0; a < K; ++a) {
          mix_row(m.transitions[h - 1][x][a], perturbation * rng.uniform(), rng);
          double p = m.rewards[h - 1][x][a].probs[1];
          double q = std::clamp(p + perturbation * (rng.uniform() - 0.5), 0.0, 1.0);
          m.rewards[h - 1][x][a].probs = {1.0 - q, q};
        }
    out.push_back(std::move(m));
  }
  return out;
}

FactoredMdp random_factored(int d, int num_values, int H, int K, RngStream& rng) {
  FactoredMdp f;
  f.d = d;
  f.num_values = num_values;
  f.horizon = H;
  f.actions = K;
  f.parents.assign(d, {});
  for (int i = 0; i < d; ++i) {
    f.parents[i] = {i};  // self-parent, optionally one extra
    if (d > 1 && rng.uniform() < 0.4) {
      int extra = rng.uniform_int(d);
      if (extra != i) f.parents[i].push_back(extra);
    }
    std::sort(f.parents[i].begin(), f.parents[i].end());
  }
  f.cpts.resize(H);
  for (int h = 1; h <= H; ++h) {
    f.cpts[h - 1].resize(d);
    for (int i = 0; i < d; ++i) {
      long long nu = 1;
      for (std::size_t j = 0; j < f.parents[i].size(); ++j) nu *= num_values;
      f.cpts[h - 1][i].assign(nu, std::vector<std::vector<double>>(K));
      for (long long u = 0; u < nu; ++u)
        for (int a = 0; a < K; ++a) f.cpts[h - 1][i][u][a] = random_simplex(num_values, rng);
    }
  }
  f.rewards.resize(H);
  f.rewards[H - 1].resize(f.expanded_states());
  for (auto& r : f.rewards[H - 1]) r = rng.uniform();
  return f;
}

std::vector<FactoredMdp> random_factored_class(int d, int num_values, int H, int K, int count,
                                               RngStream& rng, double perturbation) {
  std::vector<FactoredMdp> out;
  out.push_back(random_factored(d, num_values, H, K, rng));
  for (int c = 1; c < count; ++c) {
    FactoredMdp f = out[0];  // shared structure and rewards
    for (int h = 1; h <= H; ++h)
      for (int i = 0; i < d; ++i)
        for (auto& ucol : f.cpts[h - 1][i])
          for (auto& col : ucol) mix_row(col, perturbation * rng.uniform(), rng);
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace witlab
