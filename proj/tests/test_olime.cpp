#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "core/benchmarks.hpp"
#include "core/generators.hpp"
#include "core/olime.hpp"
#include "test_util.hpp"

using namespace witlab;

namespace {

bool contains(const std::vector<int>& v, int x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

}  // namespace

TEST_CASE("run_main: a singleton class terminates in round one") {
  RngStream rng(1, "single");
  auto cls = plan_class({random_tabular({2, 3, 2}, 2, rng)});
  AlgoConfig cfg;
  RunRecord rec = run_main(cls, cls[0].model, TestFunctionClass::bellman_class(cls), cfg,
                           RngStream(0, "run"));
  CHECK(rec.success);
  CHECK(rec.rounds.size() == 1);
  CHECK(rec.rounds[0].terminated);
  CHECK(rec.output_policy == 0);
  CHECK(rec.rounds[0].v_hat == doctest::Approx(rec.rounds[0].v_model));
  CHECK(rec.total_trajectories == 0);
}

TEST_CASE("run_main oracle on the MAB tree finds an eps-optimal policy") {
  auto fam = build_mab_tree_family(3, 2, 0.2, 2);
  auto cls = plan_class(fam.models);
  const TabularCdp& truth = fam.models[fam.truth_index];
  double v_star = plan(truth).value;
  AlgoConfig cfg;
  cfg.epsilon = 0.1;
  for (const auto& F : {TestFunctionClass::bellman_class(cls), build_scheffe_class(cls)}) {
    RunRecord rec = run_main(cls, truth, F, cfg, RngStream(0, "mab"));
    REQUIRE(rec.success);
    CHECK(rec.fault.empty());
    double v_pi = policy_value(truth, cls[rec.output_policy].plan.policy);
    CHECK(v_pi >= v_star - cfg.epsilon - 1e-12);
    // the truth always survives in oracle mode
    CHECK(contains(rec.final_version_space, fam.truth_index));
  }
}

TEST_CASE("run_main oracle: every exploration round eliminates the chosen model") {
  auto fam = build_mab_tree_family(3, 2, 0.2, 1);
  auto cls = plan_class(fam.models);
  const TabularCdp& truth = fam.models[fam.truth_index];
  AlgoConfig cfg;
  cfg.epsilon = 0.1;
  RunRecord rec = run_main(cls, truth, TestFunctionClass::bellman_class(cls), cfg,
                           RngStream(0, "self-elim"));
  REQUIRE(rec.success);
  for (const auto& rd : rec.rounds) {
    if (rd.terminated) continue;
    CHECK(rd.h_t >= 1);
    CHECK(contains(rd.eliminated, rd.chosen));
    // misfits align with survivors_before and the truth's misfit is zero
    REQUIRE(rd.misfits.size() == rd.survivors_before.size());
    for (std::size_t i = 0; i < rd.survivors_before.size(); ++i)
      if (rd.survivors_before[i] == fam.truth_index)
        CHECK(rd.misfits[i] == doctest::Approx(0.0));
  }
  // rounds never exceed |M| - 1 explorations plus the terminal round
  CHECK(rec.rounds.size() <= cls.size());
}

TEST_CASE("eliminate: boundary values survive, mismatch throws") {
  std::vector<int> vs = {3, 5, 9};
  std::vector<double> est = {0.2, 0.2000000001, 0.1};
  auto out = eliminate(vs, est, 0.2);
  CHECK(out == std::vector<int>{3, 9});
  CHECK(eliminate(vs, {0.3, 0.4, 0.5}, 0.2).empty());
  CHECK_THROWS_AS(eliminate(vs, {0.1}, 0.2), StructuralError);
}

TEST_CASE("derive_params implements the theorem formulas") {
  AlgoConfig cfg;
  cfg.epsilon = 0.2;
  cfg.delta = 0.05;
  cfg.kappa = 0.5;
  cfg.wrank = 4.0;
  cfg.beta = 4.0;
  DerivedParams p = derive_params(cfg, 3, 2, 8, 16);
  double phi = 0.5 * 0.2 / (48.0 * 3.0 * 2.0);
  CHECK(p.phi == doctest::Approx(phi));
  int T = static_cast<int>(std::ceil(3.0 * 4.0 * std::log(4.0 / (2.0 * phi)) /
                                     std::log(5.0 / 3.0)));
  CHECK(p.T == T);
  CHECK(p.n_e == static_cast<long long>(
                     std::ceil(9.0 * std::log(3.0 * p.T / 0.05) / 0.04)));
  double ke = 0.5 * 0.2;
  CHECK(p.n == static_cast<long long>(std::ceil(
                   9.0 * 2.0 * 4.0 * std::log(p.T * 8.0 * 16.0 / 0.05) / (ke * ke))));
  // explicit overrides win
  cfg.phi = 0.01;
  cfg.max_rounds = 7;
  cfg.n = 123;
  cfg.n_e = 45;
  DerivedParams q = derive_params(cfg, 3, 2, 8, 16);
  CHECK(q.phi == 0.01);
  CHECK(q.T == 7);
  CHECK(q.n == 123);
  CHECK(q.n_e == 45);
}

TEST_CASE("run_main sampling mode, derived parameters, deterministic 4-model instance") {
  // Deterministic dynamics keep the truth's empirical misfit exactly 0, so
  // the theorem parameterization with constants = 1 is reliable here.
  auto fam = build_separation_family(2);
  std::vector<TabularCdp> models;
  for (const auto& f : fam) models.push_back(expand(f));
  auto cls = plan_class(models);
  const int truth = 2;
  AlgoConfig cfg;
  cfg.oracle = false;
  cfg.epsilon = 0.2;
  cfg.delta = 0.1;
  TestFunctionClass F = TestFunctionClass::bellman_class(cls);
  int ok = 0;
  for (int seed = 0; seed < 5; ++seed) {
    RunRecord rec = run_main(cls, models[truth], F, cfg, RngStream(seed, "sampling"));
    if (!rec.success) continue;
    double v_pi = policy_value(models[truth], cls[rec.output_policy].plan.policy);
    if (v_pi >= 1.0 - cfg.epsilon - 1e-12) ++ok;
    CHECK(rec.total_trajectories > 0);
  }
  CHECK(ok == 5);
}

TEST_CASE("run_main sampling mode with an explicit phi on a stochastic instance") {
  auto fam = build_mab_tree_family(2, 2, 0.3, 1);
  auto cls = plan_class(fam.models);
  const TabularCdp& truth = fam.models[1];
  double v_star = plan(truth).value;
  AlgoConfig cfg;
  cfg.oracle = false;
  cfg.epsilon = 0.2;
  cfg.delta = 0.1;
  cfg.phi = 0.1;  // separates noise at the truth (~1/sqrt(n)) from W ~ 0.6
  TestFunctionClass F = TestFunctionClass::bellman_class(cls);
  int ok = 0;
  for (int seed = 0; seed < 10; ++seed) {
    RunRecord rec = run_main(cls, truth, F, cfg, RngStream(seed, "sampling-phi"));
    if (!rec.success) continue;
    double v_pi = policy_value(truth, cls[rec.output_policy].plan.policy);
    if (v_pi >= v_star - cfg.epsilon - 1e-12) ++ok;
  }
  CHECK(ok >= 9);  // delta = 0.1
}

TEST_CASE("run_main sampling is deterministic given the seed") {
  auto fam = build_mab_tree_family(2, 2, 0.3, 1);
  auto cls = plan_class(fam.models);
  AlgoConfig cfg;
  cfg.oracle = false;
  cfg.epsilon = 0.2;
  TestFunctionClass F = TestFunctionClass::bellman_class(cls);
  RunRecord a = run_main(cls, fam.models[1], F, cfg, RngStream(7, "det"));
  RunRecord b = run_main(cls, fam.models[1], F, cfg, RngStream(7, "det"));
  CHECK(a.success == b.success);
  CHECK(a.total_trajectories == b.total_trajectories);
  REQUIRE(a.rounds.size() == b.rounds.size());
  for (std::size_t i = 0; i < a.rounds.size(); ++i) {
    CHECK(a.rounds[i].v_hat == b.rounds[i].v_hat);
    CHECK(a.rounds[i].chosen == b.rounds[i].chosen);
    CHECK(a.rounds[i].eliminated == b.rounds[i].eliminated);
  }
}

TEST_CASE("run_main: tiny trajectory budget is reported as a fault") {
  auto fam = build_mab_tree_family(2, 2, 0.3, 1);
  auto cls = plan_class(fam.models);
  AlgoConfig cfg;
  cfg.oracle = false;
  cfg.epsilon = 0.2;
  cfg.max_trajectories = 10;
  RunRecord rec = run_main(cls, fam.models[1], TestFunctionClass::bellman_class(cls), cfg,
                           RngStream(0, "budget"));
  CHECK_FALSE(rec.success);
  CHECK(rec.fault.rfind("trajectory budget", 0) == 0);
}

TEST_CASE("run_main: a huge phi never eliminates and hits the round cap") {
  auto fam = build_mab_tree_family(3, 2, 0.2, 1);
  auto cls = plan_class(fam.models);
  AlgoConfig cfg;
  cfg.epsilon = 0.1;
  cfg.phi = 100.0;
  cfg.max_rounds = 3;
  RunRecord rec = run_main(cls, fam.models[1], TestFunctionClass::bellman_class(cls), cfg,
                           RngStream(0, "cap"));
  CHECK_FALSE(rec.success);
  CHECK(rec.fault.rfind("round cap", 0) == 0);
  for (const auto& rd : rec.rounds) CHECK(rd.eliminated.empty());
}

TEST_CASE("run_doubling oracle agrees with run_main and logs the schedule") {
  auto fam = build_mab_tree_family(3, 2, 0.2, 2);
  auto cls = plan_class(fam.models);
  const TabularCdp& truth = fam.models[2];
  AlgoConfig cfg;
  cfg.epsilon = 0.1;
  TestFunctionClass F = TestFunctionClass::bellman_class(cls);
  RunRecord rec = run_doubling(cls, truth, F, cfg, RngStream(0, "doubling"));
  REQUIRE(rec.success);
  double v_pi = policy_value(truth, cls[rec.output_policy].plan.policy);
  CHECK(v_pi >= plan(truth).value - cfg.epsilon - 1e-12);
  REQUIRE_FALSE(rec.doubling.empty());
  // schedule: N_i = 2^{i-1}, kappa = (1/2)^{j-1}, inner break at wrank < 1
  for (const auto& st : rec.doubling) {
    CHECK(st.kappa_ij == doctest::Approx(std::pow(0.5, st.j - 1)));
    CHECK(st.wrank_ij ==
          doctest::Approx(std::pow(2.0, st.i - 1) * std::pow(0.5, st.j - 1)));
    CHECK(st.wrank_ij >= 1.0);
  }
  CHECK(rec.doubling.back().succeeded);
  // the last inner run's outcome matches a direct run at the same (kappa, wrank)
  AlgoConfig direct = cfg;
  direct.kappa = rec.doubling.back().kappa_ij;
  direct.wrank = rec.doubling.back().wrank_ij;
  RunRecord dm = run_main(cls, truth, F, direct, RngStream(0, "direct"));
  CHECK(dm.success == rec.success);
  CHECK(dm.output_policy == rec.output_policy);
  CHECK(dm.final_version_space == rec.final_version_space);
}

TEST_CASE("run_factored oracle on the separation family is eps-optimal") {
  auto fam = build_separation_family(2);
  AlgoConfig cfg;
  cfg.epsilon = 0.1;
  for (int truth : {0, 3}) {
    RunRecord rec = run_factored(fam, truth, cfg, RngStream(0, "factored"));
    REQUIRE(rec.success);
    TabularCdp exp_truth = expand(fam[truth]);
    double v_pi = policy_value(exp_truth, plan(expand(fam[rec.output_policy])).policy);
    CHECK(v_pi >= 1.0 - cfg.epsilon - 1e-12);
    CHECK(contains(rec.final_version_space, truth));
  }
}

TEST_CASE("run_factored rejects structurally mixed classes") {
  auto fam = build_separation_family(2);
  RngStream rng(2, "mixed");
  std::vector<FactoredMdp> mixed = {fam[0], random_factored(2, 3, 4, 2, rng)};
  AlgoConfig cfg;
  CHECK_THROWS_AS(run_factored(mixed, 0, cfg, RngStream(0, "x")), StructuralError);
  CHECK_THROWS_AS(run_main({}, fam.empty() ? TabularCdp{} : expand(fam[0]),
                           TestFunctionClass::tv_ball(1.0), cfg, RngStream(0, "x")),
                  StructuralError);
}
