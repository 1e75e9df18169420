#pragma once

#include <vector>

#include <Eigen/Dense>

#include "core/misfit.hpp"

namespace witlab {

inline constexpr int kModelClassCap = 256;
inline constexpr double kRankTol = 1e-8;

enum class MatrixKind { Bellman, Misfit, Factored };

// Exact pairwise matrix over a model class: entry (M, M') is E_B / W / W_F at
// level h with roll-in M, target M'.
struct PairwiseMatrix {
  Eigen::MatrixXd values;
  int level = 1;
  MatrixKind kind = MatrixKind::Bellman;
  int truth_index = -1;
};

// Analytic rank-L_h/|O| factorization of the factored misfit matrix:
// W_F(M, M') = <zeta_h(M), chi_h(M')>, coordinates indexed by (i, a, u).
struct Factorization {
  Eigen::MatrixXd zeta;  // |class| x dim, row per roll-in model
  Eigen::MatrixXd chi;   // |class| x dim, row per target model
  double beta = 0.0;     // max_{M,M'} ||zeta(M)||_2 ||chi(M')||_2
  int dim = 0;           // sum_i K |O|^{|pa_i|}
};

PairwiseMatrix build_matrix(const std::vector<PlannedModel>& model_class,
                            const TabularCdp& truth, int truth_index, int h,
                            MatrixKind kind, const TestFunctionClass* F = nullptr);

PairwiseMatrix build_factored_matrix(const std::vector<FactoredMdp>& model_class,
                                     const std::vector<Policy>& policies,
                                     const TabularCdp& expanded_truth, int truth_index, int h);

// Count of singular values > tol * sigma_max (0 for the zero matrix).
int numerical_rank(const Eigen::MatrixXd& m, double tol = kRankTol);

// zeta/chi per the factored low-rank proposition; asserts the inner-product
// identity against the exact W_F matrix within 1e-9.
Factorization factored_factorization(const std::vector<FactoredMdp>& model_class,
                                     const std::vector<Policy>& policies,
                                     const TabularCdp& expanded_truth, int truth_index, int h);

// Entrywise kappa * E_B <= A <= W within 1e-9.
bool sandwich_check(const Eigen::MatrixXd& A, double kappa, const Eigen::MatrixXd& bellman,
                    const Eigen::MatrixXd& misfit, double tol = 1e-9);

// beta surrogate from the rank-r SVD factorization of a matrix: write
// B = (U sqrt(S)) (V sqrt(S))^T and report max_i ||row_i|| * max_j ||row_j||.
double beta_from_svd(const Eigen::MatrixXd& m, double tol = kRankTol);

}  // namespace witlab
