/* C interface of the witness-lab library: model loading, exact planning, and
 * experiment execution.  All functions returning wl_status set a thread-local
 * error message retrievable via wl_last_error() on failure.  Handles are
 * opaque; free them with the matching *_free function. */
#ifndef WITNESS_LAB_H
#define WITNESS_LAB_H

#ifndef WL_API
#ifdef _WIN32
#define WL_API
#else
#define WL_API __attribute__((visibility("default")))
#endif
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct wl_model wl_model;
typedef struct wl_plan wl_plan;

typedef enum {
  WL_OK = 0,
  WL_ERR_IO = 1,
  WL_ERR_PARSE = 2,
  WL_ERR_VALIDATION = 3,
  WL_ERR_CAPACITY = 4,
  WL_ERR_BUDGET = 5,
  WL_ERR_CONFIG = 6,
  WL_ERR_INVALID_ARG = 7,
  WL_ERR_INTERNAL = 8
} wl_status;

/* Library version string, e.g. "0.1.0". */
WL_API const char* wl_version(void);

/* Message of the most recent failure on this thread ("" if none). */
WL_API const char* wl_last_error(void);

/* Location of the most recent validation failure; -1 where not applicable. */
WL_API void wl_last_error_location(int* h, int* x, int* a);

/* Load a model from a JSON file (tabular or factored schema).  Factored
 * models are expanded to tabular form.  The model is validated. */
WL_API wl_status wl_model_load(const char* path, wl_model** out);

/* Parse a model from JSON text. */
WL_API wl_status wl_model_parse(const char* json_text, wl_model** out);

WL_API void wl_model_free(wl_model* model);

WL_API int wl_model_horizon(const wl_model* model);
WL_API int wl_model_actions(const wl_model* model);
/* Number of contexts at level h (1 <= h <= horizon + 1); -1 on bad input. */
WL_API int wl_model_states(const wl_model* model, int h);

/* Exact optimal planning (backward DP, lowest-index tie-breaking). */
WL_API wl_status wl_model_plan(const wl_model* model, wl_plan** out);

WL_API void wl_plan_free(wl_plan* plan);

/* Optimal value v_M of the planned model. */
WL_API double wl_plan_value(const wl_plan* plan);

/* Greedy action at (h, x); -1 on bad input. */
WL_API int wl_plan_action(const wl_plan* plan, int h, int x);

/* Q values at (h, x) copied into out_q (length >= actions). */
WL_API wl_status wl_plan_q(const wl_plan* plan, int h, int x, double* out_q, int len);

/* Exact value of the plan's greedy policy executed in true_model. */
WL_API wl_status wl_policy_value(const wl_model* true_model, const wl_plan* plan, double* out);

/* Run an experiment described by a JSON config file; result files are written
 * into out_dir.  seed_offset shifts every configured seed.  expected_kind may
 * be NULL/"" or must match the config's "kind". */
WL_API wl_status wl_run_experiment(const char* config_path, const char* expected_kind,
                            unsigned long long seed_offset, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* WITNESS_LAB_H */
