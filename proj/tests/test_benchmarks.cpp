#include <doctest.h>

#include <cmath>

#include "core/benchmarks.hpp"
#include "core/generators.hpp"
#include "test_util.hpp"

using namespace witlab;

namespace {

// Value of the deterministic policy playing `seq` bit-by-bit (action 0 above
// bit d) in a separation-style expanded model.
double sequence_value(const TabularCdp& m, int seq, int d) {
  std::vector<std::vector<int>> act(m.horizon);
  for (int h = 1; h <= m.horizon; ++h)
    act[h - 1].assign(m.states(h), h <= d ? ((seq >> (h - 1)) & 1) : 0);
  return policy_value(m, Policy::deterministic(m, act));
}

}  // namespace

TEST_CASE("MAB tree: model values, truth values, and validation") {
  const double eps = 0.15;
  auto fam = build_mab_tree_family(3, 2, eps, 2);
  REQUIRE(fam.models.size() == 4);
  const TabularCdp& truth = fam.models[2];
  for (std::size_t arm = 0; arm < fam.models.size(); ++arm) {
    CHECK_NOTHROW(validate(fam.models[arm]));
    PlanResult p = plan(fam.models[arm]);
    CHECK(p.value == doctest::Approx(0.5 + eps).epsilon(1e-12));
    CHECK(p.value == doctest::Approx(testutil::brute_force_optimal_value(fam.models[arm])));
    // arm policy of model `arm` run in the truth pays 0.5 + eps only on match
    double v = policy_value(truth, p.policy);
    CHECK(v == doctest::Approx(arm == 2 ? 0.5 + eps : 0.5).epsilon(1e-12));
  }
}

TEST_CASE("MAB tree: parameter validation and the class cap") {
  CHECK_THROWS_AS(build_mab_tree_family(1, 2, 0.1), StructuralError);
  CHECK_THROWS_AS(build_mab_tree_family(3, 2, 0.6), StructuralError);
  CHECK_THROWS_AS(build_mab_tree_family(3, 2, -0.1), StructuralError);
  CHECK_THROWS_AS(build_mab_tree_family(10, 2, 0.1), CapacityError);
}

TEST_CASE("separation family: every planted model plans to value 1") {
  for (int d : {1, 2, 3}) {
    auto fam = build_separation_family(d);
    REQUIRE(static_cast<int>(fam.size()) == (1 << d));
    for (int p = 0; p < (1 << d); ++p) {
      CHECK_NOTHROW(validate(fam[p]));
      TabularCdp m = expand(fam[p]);
      CHECK(plan(m).value == doctest::Approx(1.0));
      // only the planted sequence pays, all others pay 0
      for (int seq = 0; seq < (1 << d); ++seq)
        CHECK(sequence_value(m, seq, d) == doctest::Approx(seq == p ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("separation_path_values maps bits to the value indices") {
  auto v = separation_path_values(5, 3);  // bits 101
  CHECK(v == std::vector<int>{kSepValPlus, kSepValMinus, kSepValPlus});
}

TEST_CASE("tilde twins: reward-equivalent to the factored family (exhaustive)") {
  for (int d : {1, 2, 3}) {
    auto fam = build_separation_family(d);
    auto tilde = build_tilde_family(d);
    REQUIRE(tilde.size() == fam.size());
    for (int p = 0; p < (1 << d); ++p) {
      CHECK_NOTHROW(validate(tilde[p]));
      TabularCdp m = expand(fam[p]);
      for (int seq = 0; seq < (1 << d); ++seq)
        CHECK(sequence_value(m, seq, d) ==
              doctest::Approx(sequence_value(tilde[p], seq, d)).epsilon(1e-12));
    }
  }
}

TEST_CASE("tilde twins: every non-planted level-(d+1) history collapses to all-2") {
  const int d = 2;
  auto tilde = build_tilde_family(d);
  long long all2 = encode_state({kSepValTwo, kSepValTwo}, 4);
  for (int p = 0; p < 4; ++p) {
    long long planted = encode_state(separation_path_values(p, d), 4);
    for (int x = 0; x < tilde[p].states(d + 1); ++x)
      for (int a = 0; a < 2; ++a) {
        const auto& row = tilde[p].transitions[d][x][a];
        long long dest = x == planted ? planted : all2;
        for (int y = 0; y < tilde[p].states(d + 2); ++y)
          CHECK(row[y] == (y == dest ? 1.0 : 0.0));
      }
  }
}

TEST_CASE("g_profile: rows are the plans' Q and policy tables") {
  RngStream rng(1, "gprofile");
  auto cls = plan_class(random_tabular_class({2, 3, 2}, 2, 3, rng));
  auto G = profile_functions(cls);
  REQUIRE(G.size() == 6);  // 3 Q tables + 3 policy tables
  GProfile pr = g_profile(G, 2, 1);
  REQUIRE(pr.values.rows() == 6);
  REQUIRE(pr.values.cols() == 2);
  for (int m = 0; m < 3; ++m)
    for (int a = 0; a < 2; ++a) {
      CHECK(pr.values(m, a) == cls[m].plan.Q[1][1][a]);
      CHECK(pr.values(3 + m, a) == cls[m].plan.policy.prob(2, 1, a));
    }
  CHECK_THROWS_AS(g_profile(G, 5, 0), StructuralError);
  CHECK_THROWS_AS(g_profile(G, 1, 9), StructuralError);
}

TEST_CASE("profile equivalence holds for d in {1,2,3}") {
  CHECK(profile_equivalence_check(1));
  CHECK(profile_equivalence_check(2));
  CHECK(profile_equivalence_check(3));
}

TEST_CASE("a reward perturbation breaks the profile equivalence") {
  const int d = 2;
  auto fam = build_separation_family(d);
  std::vector<TabularCdp> pexp;
  for (const auto& f : fam) pexp.push_back(expand(f));
  auto tilde = build_tilde_family(d);
  // perturb one twin's terminal reward at its planted state
  long long planted = encode_state(separation_path_values(0, d), 4);
  for (int a = 0; a < 2; ++a)
    tilde[0].rewards[d + 1][planted][a] = RewardDist::point(0.9);
  auto G = profile_functions(plan_class(pexp));
  auto Gt = profile_functions(plan_class(tilde));
  // the profiles at the shared initial state already disagree
  GProfile a = g_profile(G, 1, 0);
  GProfile b = g_profile(Gt, 1, 0);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() > 1e-12);
}

TEST_CASE("overparameterized class: size and state recovery at the last level") {
  const int d = 2;
  OverparamClass cls = build_overparam_class(d);
  CHECK(cls.models.size() == static_cast<std::size_t>((3 * d + 1) * (1 << d)));
  auto planned = plan_class(cls.models);
  auto G = profile_functions(planned, false);
  for (int x = 0; x < cls.models[0].states(d + 2); ++x) {
    GProfile pr = g_profile(G, d + 2, x);
    CHECK(recover_state_from_profile(cls, pr, G) == decode_state(x, d, 4));
  }
}

TEST_CASE("profile-restricted learner: d=1 finds the arm within two pulls") {
  auto fam = build_separation_family(1);
  for (int p = 0; p < 2; ++p) {
    TabularCdp env = expand(fam[p]);
    for (int seed = 0; seed < 5; ++seed) {
      LearnerResult lr = profile_restricted_learner(env, 1, 100, RngStream(seed, "learner"));
      CHECK(lr.found);
      CHECK(lr.trajectories <= 2);
      CHECK(lr.best_arm == p);
      CHECK(policy_value(env, lr.policy) == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("profile-restricted learner: mean pulls near (2^d + 1)/2 at d=3") {
  auto fam = build_separation_family(3);
  TabularCdp env = expand(fam[5]);
  double sum = 0.0;
  const int seeds = 200;
  for (int seed = 0; seed < seeds; ++seed) {
    LearnerResult lr = profile_restricted_learner(env, 3, 1000, RngStream(seed, "mean-pulls"));
    REQUIRE(lr.found);
    sum += static_cast<double>(lr.trajectories);
  }
  double mean = sum / seeds;  // expectation (2^3 + 1)/2 = 4.5, range [1, 8]
  CHECK(mean > 3.5);
  CHECK(mean < 5.5);
}

TEST_CASE("profile-restricted learner: budget exhaustion is reported, policy valid") {
  auto fam = build_separation_family(2);
  TabularCdp env = expand(fam[3]);
  LearnerResult lr = profile_restricted_learner(env, 2, 1, RngStream(0, "budget"));
  if (!lr.found) {
    CHECK(lr.trajectories == 1);
    CHECK_NOTHROW(policy_value(env, lr.policy));  // placeholder policy is usable
  }
  // a zero budget can never find the arm
  LearnerResult none = profile_restricted_learner(env, 2, 0, RngStream(0, "none"));
  CHECK_FALSE(none.found);
  CHECK(none.trajectories == 0);
  CHECK_NOTHROW(policy_value(env, none.policy));
}
