#include "core/witness_rank.hpp"

#include <cmath>

#include <fmt/core.h>

namespace witlab {

PairwiseMatrix build_matrix(const std::vector<PlannedModel>& cls, const TabularCdp& truth,
                            int truth_index, int h, MatrixKind kind,
                            const TestFunctionClass* F) {
  if (cls.empty()) throw StructuralError("build_matrix: empty model class");
  if (static_cast<int>(cls.size()) > kModelClassCap)
    throw CapacityError(fmt::format("model class size {} exceeds cap {}", cls.size(), kModelClassCap));
  if (kind == MatrixKind::Misfit && F == nullptr)
    throw StructuralError("misfit matrix needs a test function class");
  if (kind == MatrixKind::Factored)
    throw StructuralError("use build_factored_matrix for the factored kind");
  const int n = static_cast<int>(cls.size());
  PairwiseMatrix out;
  out.level = h;
  out.kind = kind;
  out.truth_index = truth_index;
  out.values.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.values(i, j) = kind == MatrixKind::Bellman
                             ? bellman_error_exact(cls[i], cls[j], truth, h)
                             : witnessed_misfit_exact(cls[i], cls[j], truth, h, *F);
  return out;
}

PairwiseMatrix build_factored_matrix(const std::vector<FactoredMdp>& cls,
                                     const std::vector<Policy>& policies,
                                     const TabularCdp& expanded_truth, int truth_index, int h) {
  if (cls.empty()) throw StructuralError("build_factored_matrix: empty model class");
  if (static_cast<int>(cls.size()) > kModelClassCap)
    throw CapacityError(fmt::format("model class size {} exceeds cap {}", cls.size(), kModelClassCap));
  const int n = static_cast<int>(cls.size());
  PairwiseMatrix out;
  out.level = h;
  out.kind = MatrixKind::Factored;
  out.truth_index = truth_index;
  out.values.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.values(i, j) =
          factored_misfit_exact(expanded_truth, policies[i], cls[j], cls[truth_index], h);
  return out;
}

int numerical_rank(const Eigen::MatrixXd& m, double tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * sv(0)) ++rank;
  return rank;
}

Factorization factored_factorization(const std::vector<FactoredMdp>& cls,
                                     const std::vector<Policy>& policies,
                                     const TabularCdp& expanded_truth, int truth_index, int h) {
  if (cls.empty()) throw StructuralError("factored_factorization: empty model class");
  const FactoredMdp& truth = cls[truth_index];
  const int K = truth.actions;
  const int n = static_cast<int>(cls.size());

  // Coordinate layout: for factor i, action a, parent assignment u (flattened
  // in that order).
  std::vector<int> offsets(truth.d + 1, 0);
  std::vector<long long> nu(truth.d);
  for (int i = 0; i < truth.d; ++i) {
    long long cnt = 1;
    for (std::size_t j = 0; j < truth.parents[i].size(); ++j) cnt *= truth.num_values;
    nu[i] = cnt;
    offsets[i + 1] = offsets[i] + K * static_cast<int>(cnt);
  }
  const int dim = offsets[truth.d];

  Factorization fz;
  fz.dim = dim;
  fz.zeta.setZero(n, dim);
  fz.chi.setZero(n, dim);

  for (int m = 0; m < n; ++m) {
    // zeta(i, a, u; M) = P_h^{pi_M}(x_h[pa_i] = u) / K
    std::vector<double> occ = occupancy(expanded_truth, policies[m], h);
    for (std::size_t x = 0; x < occ.size(); ++x) {
      if (occ[x] == 0.0) continue;
      for (int i = 0; i < truth.d; ++i) {
        int u = truth.parent_index(static_cast<long long>(x), i);
        for (int a = 0; a < K; ++a)
          fz.zeta(m, offsets[i] + a * static_cast<int>(nu[i]) + u) += occ[x] / K;
      }
    }
    // chi(i, a, u; M') = || P*^(i)(.|u,a) - P'^(i)(.|u,a) ||  (factor-2 TV)
    for (int i = 0; i < truth.d; ++i)
      for (long long u = 0; u < nu[i]; ++u)
        for (int a = 0; a < K; ++a) {
          double tv = 0.0;
          for (int o = 0; o < truth.num_values; ++o)
            tv += std::abs(truth.cpts[h - 1][i][u][a][o] - cls[m].cpts[h - 1][i][u][a][o]);
          fz.chi(m, offsets[i] + a * static_cast<int>(nu[i]) + static_cast<int>(u)) = tv;
        }
  }

  fz.beta = 0.0;
  double zmax = 0.0, cmax = 0.0;
  for (int m = 0; m < n; ++m) {
    zmax = std::max(zmax, fz.zeta.row(m).norm());
    cmax = std::max(cmax, fz.chi.row(m).norm());
  }
  fz.beta = zmax * cmax;

  // The inner products must reproduce the exact W_F matrix.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double exact = factored_misfit_exact(expanded_truth, policies[i], cls[j], truth, h);
      double ip = fz.zeta.row(i).dot(fz.chi.row(j));
      if (std::abs(exact - ip) > 1e-9)
        throw InternalError(fmt::format(
            "factorization identity violated at ({}, {}): W_F {} vs <zeta,chi> {}", i, j, exact, ip));
    }
  return fz;
}

bool sandwich_check(const Eigen::MatrixXd& A, double kappa, const Eigen::MatrixXd& bellman,
                    const Eigen::MatrixXd& misfit, double tol) {
  if (A.rows() != bellman.rows() || A.cols() != bellman.cols() || A.rows() != misfit.rows() ||
      A.cols() != misfit.cols())
    throw StructuralError("sandwich_check: dimension mismatch");
  if (!(kappa > 0.0 && kappa <= 1.0)) throw StructuralError("sandwich_check: kappa must be in (0,1]");
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) {
      if (kappa * bellman(i, j) > A(i, j) + tol) return false;
      if (A(i, j) > misfit(i, j) + tol) return false;
    }
  return true;
}

double beta_from_svd(const Eigen::MatrixXd& m, double tol) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * sv(0)) ++rank;
  Eigen::MatrixXd U = svd.matrixU().leftCols(rank);
  Eigen::MatrixXd V = svd.matrixV().leftCols(rank);
  Eigen::VectorXd s = sv.head(rank).cwiseSqrt();
  double umax = 0.0, vmax = 0.0;
  for (int i = 0; i < U.rows(); ++i) umax = std::max(umax, (U.row(i).transpose().cwiseProduct(s)).norm());
  for (int i = 0; i < V.rows(); ++i) vmax = std::max(vmax, (V.row(i).transpose().cwiseProduct(s)).norm());
  return umax * vmax;
}

}  // namespace witlab
