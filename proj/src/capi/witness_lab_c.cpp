#include "witness_lab.h"

#include <cstring>
#include <string>

#include "core/harness.hpp"
#include "core/json_io.hpp"
#include "core/model.hpp"

namespace {

thread_local std::string g_error;
thread_local int g_err_h = -1, g_err_x = -1, g_err_a = -1;

void clear_error() {
  g_error.clear();
  g_err_h = g_err_x = g_err_a = -1;
}

wl_status fail(wl_status code, const std::string& msg, int h = -1, int x = -1, int a = -1) {
  g_error = msg;
  g_err_h = h;
  g_err_x = x;
  g_err_a = a;
  return code;
}

template <typename Fn>
wl_status guarded(Fn&& fn) {
  clear_error();
  try {
    return fn();
  } catch (const witlab::ValidationError& e) {
    return fail(WL_ERR_VALIDATION, e.what(), e.h, e.x, e.a);
  } catch (const witlab::StructuralError& e) {
    return fail(WL_ERR_PARSE, e.what());
  } catch (const witlab::CapacityError& e) {
    return fail(WL_ERR_CAPACITY, e.what());
  } catch (const witlab::BudgetError& e) {
    return fail(WL_ERR_BUDGET, e.what());
  } catch (const witlab::ConfigError& e) {
    return fail(WL_ERR_CONFIG, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(WL_ERR_PARSE, e.what());
  } catch (const std::exception& e) {
    return fail(WL_ERR_INTERNAL, e.what());
  }
}

witlab::TabularCdp model_from_loaded(witlab::LoadedModel&& lm) {
  if (lm.tabular) return std::move(*lm.tabular);
  return witlab::expand(*lm.factored);
}

}  // namespace

struct wl_model {
  witlab::TabularCdp model;
};

struct wl_plan {
  witlab::PlanResult plan;
};

extern "C" {

const char* wl_version(void) { return "0.1.0"; }

const char* wl_last_error(void) { return g_error.c_str(); }

void wl_last_error_location(int* h, int* x, int* a) {
  if (h) *h = g_err_h;
  if (x) *x = g_err_x;
  if (a) *a = g_err_a;
}

wl_status wl_model_load(const char* path, wl_model** out) {
  if (!path || !out) return fail(WL_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    auto lm = witlab::load_model_file(path);
    auto m = model_from_loaded(std::move(lm));
    witlab::validate(m);
    *out = new wl_model{std::move(m)};
    return WL_OK;
  });
}

wl_status wl_model_parse(const char* json_text, wl_model** out) {
  if (!json_text || !out) return fail(WL_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    auto lm = witlab::model_from_json(nlohmann::json::parse(json_text));
    auto m = model_from_loaded(std::move(lm));
    witlab::validate(m);
    *out = new wl_model{std::move(m)};
    return WL_OK;
  });
}

void wl_model_free(wl_model* model) { delete model; }

int wl_model_horizon(const wl_model* model) { return model ? model->model.horizon : -1; }

int wl_model_actions(const wl_model* model) { return model ? model->model.actions : -1; }

int wl_model_states(const wl_model* model, int h) {
  if (!model || h < 1 || h > model->model.horizon + 1) return -1;
  return model->model.states(h);
}

wl_status wl_model_plan(const wl_model* model, wl_plan** out) {
  if (!model || !out) return fail(WL_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    *out = new wl_plan{witlab::plan(model->model)};
    return WL_OK;
  });
}

void wl_plan_free(wl_plan* plan) { delete plan; }

double wl_plan_value(const wl_plan* plan) { return plan ? plan->plan.value : 0.0; }

int wl_plan_action(const wl_plan* plan, int h, int x) {
  if (!plan || h < 1 || h > static_cast<int>(plan->plan.Q.size())) return -1;
  const auto& level = plan->plan.policy.probs[h - 1];
  if (x < 0 || x >= static_cast<int>(level.size())) return -1;
  for (std::size_t a = 0; a < level[x].size(); ++a)
    if (level[x][a] > 0.5) return static_cast<int>(a);
  return -1;
}

wl_status wl_plan_q(const wl_plan* plan, int h, int x, double* out_q, int len) {
  if (!plan || !out_q) return fail(WL_ERR_INVALID_ARG, "null argument");
  if (h < 1 || h > static_cast<int>(plan->plan.Q.size()))
    return fail(WL_ERR_INVALID_ARG, "level out of range");
  if (x < 0 || x >= static_cast<int>(plan->plan.Q[h - 1].size()))
    return fail(WL_ERR_INVALID_ARG, "state out of range");
  const auto& q = plan->plan.Q[h - 1][x];
  if (len < static_cast<int>(q.size()))
    return fail(WL_ERR_INVALID_ARG, "output buffer too small");
  std::memcpy(out_q, q.data(), q.size() * sizeof(double));
  clear_error();
  return WL_OK;
}

wl_status wl_policy_value(const wl_model* true_model, const wl_plan* plan, double* out) {
  if (!true_model || !plan || !out) return fail(WL_ERR_INVALID_ARG, "null argument");
  return guarded([&] {
    *out = witlab::policy_value(true_model->model, plan->plan.policy);
    return WL_OK;
  });
}

wl_status wl_run_experiment(const char* config_path, const char* expected_kind,
                            unsigned long long seed_offset, const char* out_dir) {
  if (!config_path || !out_dir) return fail(WL_ERR_INVALID_ARG, "null argument");
  return guarded([&]() -> wl_status {
    nlohmann::json j = nlohmann::json::parse(witlab::read_text_file(config_path));
    witlab::ExperimentConfig cfg = witlab::config_from_json(j);
    std::string kind = expected_kind ? expected_kind : "";
    if (!kind.empty() && cfg.kind != kind)
      throw witlab::ConfigError("config kind '" + cfg.kind + "' does not match subcommand '" +
                                kind + "'");
    witlab::run_experiment(cfg, seed_offset, out_dir);
    return WL_OK;
  });
}

}  // extern "C"
