#include <doctest.h>

#include <cstring>
#include <filesystem>

#include "core/benchmarks.hpp"
#include "core/generators.hpp"
#include "core/json_io.hpp"
#include "witness_lab.h"

using namespace witlab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("witness-lab-capi-" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string model_text() {
  RngStream rng(42, "capi-model");
  return tabular_to_json(random_tabular({2, 3, 2}, 2, rng)).dump();
}

}  // namespace

TEST_CASE("wl_version is a non-empty string") {
  REQUIRE(wl_version() != nullptr);
  CHECK(std::strlen(wl_version()) > 0);
}

TEST_CASE("wl_model_parse + accessors + plan round trip") {
  RngStream rng(42, "capi-model");
  TabularCdp reference = random_tabular({2, 3, 2}, 2, rng);
  PlanResult ref_plan = plan(reference);

  wl_model* m = nullptr;
  REQUIRE(wl_model_parse(tabular_to_json(reference).dump().c_str(), &m) == WL_OK);
  REQUIRE(m != nullptr);
  CHECK(wl_model_horizon(m) == 2);
  CHECK(wl_model_actions(m) == 2);
  CHECK(wl_model_states(m, 1) == 2);
  CHECK(wl_model_states(m, 2) == 3);
  CHECK(wl_model_states(m, 3) == 2);
  CHECK(wl_model_states(m, 4) == -1);
  CHECK(wl_model_states(m, 0) == -1);

  wl_plan* p = nullptr;
  REQUIRE(wl_model_plan(m, &p) == WL_OK);
  CHECK(wl_plan_value(p) == doctest::Approx(ref_plan.value).epsilon(1e-15));
  for (int h = 1; h <= 2; ++h)
    for (int x = 0; x < reference.states(h); ++x) {
      double q[2];
      REQUIRE(wl_plan_q(p, h, x, q, 2) == WL_OK);
      CHECK(q[0] == doctest::Approx(ref_plan.Q[h - 1][x][0]));
      CHECK(q[1] == doctest::Approx(ref_plan.Q[h - 1][x][1]));
      int a = wl_plan_action(p, h, x);
      CHECK(ref_plan.policy.prob(h, x, a) == 1.0);
    }

  double v = -1.0;
  REQUIRE(wl_policy_value(m, p, &v) == WL_OK);
  CHECK(v == doctest::Approx(ref_plan.value));

  wl_plan_free(p);
  wl_model_free(m);
}

TEST_CASE("wl_model_load: file load and factored expansion") {
  fs::path dir = fresh_dir("load");
  write_text_file((dir / "tab.json").string(), model_text());
  wl_model* m = nullptr;
  REQUIRE(wl_model_load((dir / "tab.json").string().c_str(), &m) == WL_OK);
  CHECK(wl_model_horizon(m) == 2);
  wl_model_free(m);

  FactoredMdp f = build_separation_family(1)[0];
  write_text_file((dir / "fact.json").string(), factored_to_json(f).dump());
  wl_model* fm = nullptr;
  REQUIRE(wl_model_load((dir / "fact.json").string().c_str(), &fm) == WL_OK);
  CHECK(wl_model_horizon(fm) == 3);
  CHECK(wl_model_states(fm, 1) == 4);  // |O|^d expanded
  wl_plan* fp = nullptr;
  REQUIRE(wl_model_plan(fm, &fp) == WL_OK);
  CHECK(wl_plan_value(fp) == doctest::Approx(1.0));
  wl_plan_free(fp);
  wl_model_free(fm);
}

TEST_CASE("wl error reporting: parse, validation with location, missing file") {
  wl_model* m = nullptr;
  CHECK(wl_model_parse("{broken", &m) == WL_ERR_PARSE);
  CHECK(std::strlen(wl_last_error()) > 0);

  // invalid transition row at (h=1, x=0, a=1)
  RngStream rng(42, "capi-model");
  TabularCdp bad = random_tabular({2, 3, 2}, 2, rng);
  bad.transitions[0][0][1] = {0.5, 0.4, 0.0};
  CHECK(wl_model_parse(tabular_to_json(bad).dump().c_str(), &m) == WL_ERR_VALIDATION);
  int h = 0, x = 0, a = 0;
  wl_last_error_location(&h, &x, &a);
  CHECK(h == 1);
  CHECK(x == 0);
  CHECK(a == 1);

  CHECK(wl_model_load("/nonexistent/model.json", &m) == WL_ERR_CONFIG);
  CHECK(std::strlen(wl_last_error()) > 0);

  // a success clears the sticky error state
  wl_model* ok = nullptr;
  REQUIRE(wl_model_parse(model_text().c_str(), &ok) == WL_OK);
  CHECK(std::strlen(wl_last_error()) == 0);
  wl_last_error_location(&h, &x, &a);
  CHECK(h == -1);
  wl_model_free(ok);
}

TEST_CASE("wl invalid arguments") {
  CHECK(wl_model_parse(nullptr, nullptr) == WL_ERR_INVALID_ARG);
  CHECK(wl_model_plan(nullptr, nullptr) == WL_ERR_INVALID_ARG);
  CHECK(wl_model_horizon(nullptr) == -1);
  CHECK(wl_plan_action(nullptr, 1, 0) == -1);
  CHECK(wl_policy_value(nullptr, nullptr, nullptr) == WL_ERR_INVALID_ARG);

  wl_model* m = nullptr;
  REQUIRE(wl_model_parse(model_text().c_str(), &m) == WL_OK);
  wl_plan* p = nullptr;
  REQUIRE(wl_model_plan(m, &p) == WL_OK);
  double q[1];
  CHECK(wl_plan_q(p, 1, 0, q, 1) == WL_ERR_INVALID_ARG);  // buffer too small
  CHECK(wl_plan_q(p, 9, 0, q, 1) == WL_ERR_INVALID_ARG);
  CHECK(wl_plan_action(p, 1, 99) == -1);
  wl_plan_free(p);
  wl_model_free(m);
}

TEST_CASE("wl_run_experiment: success, kind mismatch, missing config") {
  fs::path dir = fresh_dir("runexp");
  write_text_file((dir / "model.json").string(), model_text());
  nlohmann::json cfg{{"kind", "plan"},
                     {"models", {{"files", {(dir / "model.json").string()}}}}};
  write_text_file((dir / "config.json").string(), cfg.dump());

  CHECK(wl_run_experiment((dir / "config.json").string().c_str(), "plan", 0,
                          (dir / "out").string().c_str()) == WL_OK);
  CHECK(fs::exists(dir / "out" / "results.json"));

  CHECK(wl_run_experiment((dir / "config.json").string().c_str(), "rank", 0,
                          (dir / "out2").string().c_str()) == WL_ERR_CONFIG);
  CHECK(wl_run_experiment("/nonexistent/config.json", nullptr, 0,
                          (dir / "out3").string().c_str()) == WL_ERR_CONFIG);
  CHECK(wl_run_experiment(nullptr, nullptr, 0, nullptr) == WL_ERR_INVALID_ARG);
}
