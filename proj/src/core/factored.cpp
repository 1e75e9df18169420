#include "core/factored.hpp"

#include <cmath>

#include <fmt/core.h>

namespace witlab {

namespace {

long long ipow(long long base, int exp) {
  long long r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

std::vector<int> decode_state(long long index, int d, int num_values) {
  std::vector<int> out(d);
  for (int i = 0; i < d; ++i) {
    out[i] = static_cast<int>(index % num_values);
    index /= num_values;
  }
  return out;
}

long long encode_state(const std::vector<int>& assignment, int num_values) {
  long long idx = 0;
  for (int i = static_cast<int>(assignment.size()) - 1; i >= 0; --i)
    idx = idx * num_values + assignment[i];
  return idx;
}

long long FactoredMdp::expanded_states() const { return ipow(num_values, d); }

long long FactoredMdp::parameter_count_per_level() const {
  long long L = 0;
  for (const auto& pa : parents)
    L += static_cast<long long>(actions) * ipow(num_values, 1 + static_cast<int>(pa.size()));
  return L;
}

long long FactoredMdp::parameter_count() const {
  return horizon * parameter_count_per_level();
}

int FactoredMdp::parent_index(long long x, int i) const {
  int u = 0;
  const auto& pa = parents[i];
  for (int j = static_cast<int>(pa.size()) - 1; j >= 0; --j) {
    int v = static_cast<int>((x / ipow(num_values, pa[j])) % num_values);
    u = u * num_values + v;
  }
  return u;
}

void validate(const FactoredMdp& f) {
  if (f.d < 1 || f.num_values < 1) throw StructuralError("factored model needs d >= 1, |O| >= 1");
  if (f.horizon < 1 || f.actions < 1) throw StructuralError("factored model needs H >= 1, K >= 1");
  if (static_cast<int>(f.parents.size()) != f.d)
    throw StructuralError("parents must list one set per variable");
  for (const auto& pa : f.parents)
    for (int p : pa)
      if (p < 0 || p >= f.d) throw StructuralError("parent index outside [d]");
  if (static_cast<int>(f.cpts.size()) != f.horizon)
    throw StructuralError("cpts must have H levels");
  for (int h = 1; h <= f.horizon; ++h) {
    if (static_cast<int>(f.cpts[h - 1].size()) != f.d)
      throw StructuralError(fmt::format("cpts level {}: expected {} factors", h, f.d));
    for (int i = 0; i < f.d; ++i) {
      long long nu = ipow(f.num_values, static_cast<int>(f.parents[i].size()));
      if (static_cast<long long>(f.cpts[h - 1][i].size()) != nu)
        throw StructuralError(fmt::format("cpts level {} factor {}: parent-assignment count mismatch", h, i));
      for (long long u = 0; u < nu; ++u) {
        if (static_cast<int>(f.cpts[h - 1][i][u].size()) != f.actions)
          throw StructuralError("cpt action count mismatch");
        for (int a = 0; a < f.actions; ++a) {
          const auto& col = f.cpts[h - 1][i][u][a];
          if (static_cast<int>(col.size()) != f.num_values)
            throw StructuralError("cpt column size mismatch");
          double s = 0.0;
          for (double v : col) {
            if (!(v >= 0.0))
              throw ValidationError("cpt column has a negative entry", h, static_cast<int>(u), a);
            s += v;
          }
          if (std::abs(s - 1.0) > kProbTol)
            throw ValidationError(
                fmt::format("cpt column sums to {} (factor {})", s, i), h, static_cast<int>(u), a);
        }
      }
    }
  }
  if (static_cast<int>(f.rewards.size()) != f.horizon)
    throw StructuralError("rewards must have H levels");
  for (int h = 1; h <= f.horizon; ++h)
    if (!f.rewards[h - 1].empty() &&
        static_cast<long long>(f.rewards[h - 1].size()) != f.expanded_states())
      throw StructuralError(fmt::format("rewards level {}: size must be |O|^d or 0", h));
}

TabularCdp expand(const FactoredMdp& f, long long cap) {
  long long n = f.expanded_states();
  if (n > cap)
    throw CapacityError(fmt::format("|O|^d = {} exceeds expansion cap {}", n, cap));
  const int N = static_cast<int>(n);
  TabularCdp m;
  m.horizon = f.horizon;
  m.actions = f.actions;
  m.level_sizes.assign(f.horizon + 1, N);
  if (f.initial.empty()) {
    m.initial.assign(N, 0.0);
    m.initial[0] = 1.0;
  } else {
    m.initial = f.initial;
  }
  m.transitions.resize(f.horizon);
  m.rewards.resize(f.horizon);
  for (int h = 1; h <= f.horizon; ++h) {
    m.transitions[h - 1].assign(N, std::vector<std::vector<double>>(
                                       f.actions, std::vector<double>(N, 0.0)));
    m.rewards[h - 1].assign(N, std::vector<RewardDist>(f.actions));
    for (int x = 0; x < N; ++x) {
      double rv = f.rewards[h - 1].empty() ? 0.0 : f.rewards[h - 1][x];
      for (int a = 0; a < f.actions; ++a) {
        m.rewards[h - 1][x][a] = RewardDist::point(rv);
        auto& row = m.transitions[h - 1][x][a];
        // prod_i P^(i)[x'[i] | u_i, a] accumulated variable by variable
        std::vector<double> partial{1.0};
        for (int i = 0; i < f.d; ++i) {
          const auto& col = f.cpts[h - 1][i][f.parent_index(x, i)][a];
          std::vector<double> nxt(partial.size() * f.num_values, 0.0);
          for (std::size_t base = 0; base < partial.size(); ++base) {
            if (partial[base] == 0.0) continue;
            for (int o = 0; o < f.num_values; ++o)
              nxt[base + o * partial.size()] = partial[base] * col[o];
          }
          partial = std::move(nxt);
        }
        row = std::move(partial);
      }
    }
  }
  return m;
}

bool same_structure(const FactoredMdp& a, const FactoredMdp& b) {
  return a.d == b.d && a.num_values == b.num_values && a.horizon == b.horizon &&
         a.actions == b.actions && a.parents == b.parents;
}

}  // namespace witlab
