#include "core/harness.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

#include <fmt/core.h>

#include "core/benchmarks.hpp"
#include "core/generators.hpp"
#include "core/witness_rank.hpp"

namespace witlab {

namespace {

int worker_count() {
  const char* env = std::getenv("WITNESS_LAB_WORKERS");
  if (!env) return 1;
  int n = std::atoi(env);
  return n < 1 ? 1 : n;
}

// Deterministic parallel map over seed indices.
template <typename Fn>
void for_each_index(std::size_t count, Fn&& fn) {
  int workers = std::min<std::size_t>(worker_count(), count == 0 ? 1 : count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

TestFunctionClass make_test_class(const std::string& name,
                                  const std::vector<PlannedModel>& cls) {
  if (name == "bellman") return TestFunctionClass::bellman_class(cls);
  if (name == "tv") return TestFunctionClass::tv_ball(1.0);
  if (name == "tv2") return TestFunctionClass::tv_ball(2.0);
  if (name == "scheffe") return build_scheffe_class(cls);
  throw ConfigError(fmt::format("unknown test_class '{}'", name));
}

std::string fmt_double(double v) { return fmt::format("{}", v); }

void write_json_file(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  if (!j.contains("kind")) throw ConfigError("config: missing 'kind'");
  c.kind = j.at("kind").get<std::string>();
  static const std::vector<std::string> kinds = {
      "plan",         "misfit",       "rank",            "run-main",
      "run-doubling", "run-factored", "separation-demo", "scheffe-check"};
  if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end())
    throw ConfigError(fmt::format("config: unknown kind '{}'", c.kind));
  if (j.contains("mode")) c.mode = j.at("mode").get<std::string>();
  if (c.mode != "oracle" && c.mode != "sampling")
    throw ConfigError(fmt::format("config: unknown mode '{}'", c.mode));
  if (j.contains("models")) c.models = j.at("models");
  if (j.contains("truth_index")) c.truth_index = j.at("truth_index").get<int>();
  if (j.contains("algo")) c.algo = algo_config_from_json(j.at("algo"));
  if (j.contains("test_class")) c.test_class = j.at("test_class").get<std::string>();
  if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("extra")) c.extra = j.at("extra");
  if (c.mode == "sampling" && c.seeds.empty())
    throw ConfigError("config: sampling mode requires a non-empty seeds list");
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  return json{{"kind", c.kind},
              {"mode", c.mode},
              {"models", c.models},
              {"truth_index", c.truth_index},
              {"algo", algo_config_to_json(c.algo)},
              {"test_class", c.test_class},
              {"seeds", c.seeds},
              {"extra", c.extra}};
}

BuiltClass build_model_class(const json& spec, int truth_index) {
  BuiltClass out;
  out.truth_index = truth_index;
  if (spec.contains("files")) {
    for (const auto& path : spec.at("files")) {
      LoadedModel m = load_model_file(path.get<std::string>());
      if (m.tabular) out.tabular.push_back(*m.tabular);
      if (m.factored) out.factored.push_back(*m.factored);
    }
    if (!out.tabular.empty() && !out.factored.empty())
      throw ConfigError("model class mixes tabular and factored files");
    if (out.tabular.empty() && out.factored.empty())
      throw ConfigError("model class: no files listed");
    return out;
  }
  if (!spec.contains("builder")) throw ConfigError("models: need 'builder' or 'files'");
  std::string builder = spec.at("builder").get<std::string>();
  json params = spec.contains("params") ? spec.at("params") : json::object();
  auto geti = [&](const char* key, int dflt) {
    return params.contains(key) ? params.at(key).get<int>() : dflt;
  };
  auto getd = [&](const char* key, double dflt) {
    return params.contains(key) ? params.at(key).get<double>() : dflt;
  };
  if (builder == "mab_tree") {
    auto fam = build_mab_tree_family(geti("H", 3), geti("K", 2), getd("eps", 0.1),
                                     geti("truth_arm", truth_index));
    out.tabular = fam.models;
    out.truth_index = fam.truth_index;
  } else if (builder == "separation") {
    out.factored = build_separation_family(geti("d", 2));
  } else if (builder == "tilde") {
    out.tabular = build_tilde_family(geti("d", 2));
  } else if (builder == "random_tabular") {
    RngStream rng(static_cast<std::uint64_t>(geti("seed", 0)), "random_tabular");
    std::vector<int> sizes;
    if (params.contains("level_sizes"))
      sizes = params.at("level_sizes").get<std::vector<int>>();
    else
      sizes = random_level_sizes(geti("H", 3), geti("max_states", 5), rng);
    out.tabular = random_tabular_class(sizes, geti("K", 2), geti("count", 4), rng,
                                       getd("perturbation", 0.5));
  } else if (builder == "random_factored") {
    RngStream rng(static_cast<std::uint64_t>(geti("seed", 0)), "random_factored");
    out.factored =
        random_factored_class(geti("d", 2), geti("values", 3), geti("H", 3), geti("K", 2),
                              geti("count", 4), rng, getd("perturbation", 0.5));
  } else {
    throw ConfigError(fmt::format("unknown model builder '{}'", builder));
  }
  int n = static_cast<int>(out.is_factored() ? out.factored.size() : out.tabular.size());
  if (out.truth_index < 0 || out.truth_index >= n)
    throw ConfigError(fmt::format("truth_index {} outside class of size {}", out.truth_index, n));
  return out;
}

namespace {

std::vector<TabularCdp> as_tabular(const BuiltClass& bc) {
  if (!bc.is_factored()) return bc.tabular;
  std::vector<TabularCdp> out;
  out.reserve(bc.factored.size());
  for (const auto& f : bc.factored) out.push_back(expand(f));
  return out;
}

struct SeedRow {
  std::uint64_t seed = 0;
  RunRecord rec;
  double v_pi = 0.0;
  bool eps_optimal = false;
};

json seed_rows_json(const std::vector<SeedRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    json j = run_record_to_json(r.rec);
    j["seed"] = r.seed;
    j["v_pi"] = r.v_pi;
    j["eps_optimal"] = r.eps_optimal;
    out.push_back(j);
  }
  return out;
}

std::string seed_rows_csv(const std::vector<SeedRow>& rows) {
  std::string csv = "seed,success,rounds,total_trajectories,v_pi,eps_optimal\n";
  for (const auto& r : rows)
    csv += fmt::format("{},{},{},{},{},{}\n", r.seed, r.rec.success ? 1 : 0, r.rec.rounds.size(),
                       r.rec.total_trajectories, fmt_double(r.v_pi), r.eps_optimal ? 1 : 0);
  return csv;
}

void run_algorithm_experiment(const ExperimentConfig& cfg, std::uint64_t seed_offset,
                              const std::string& out_dir) {
  BuiltClass bc = build_model_class(cfg.models, cfg.truth_index);
  if (cfg.kind == "run-factored" && !bc.is_factored())
    throw ConfigError("run-factored requires a factored model class");
  AlgoConfig algo = cfg.algo;
  algo.oracle = cfg.mode == "oracle";
  std::vector<std::uint64_t> seeds = cfg.seeds.empty() ? std::vector<std::uint64_t>{0} : cfg.seeds;

  std::vector<TabularCdp> tab = as_tabular(bc);
  std::vector<PlannedModel> planned = plan_class(tab);
  const TabularCdp& truth = tab[bc.truth_index];
  double v_star = planned[bc.truth_index].plan.value;

  TestFunctionClass F;
  if (cfg.kind != "run-factored") F = make_test_class(cfg.test_class, planned);

  std::vector<SeedRow> rows(seeds.size());
  for_each_index(seeds.size(), [&](std::size_t i) {
    std::uint64_t seed = seeds[i] + seed_offset;
    RngStream rng(seed, cfg.kind);
    RunRecord rec;
    if (cfg.kind == "run-main")
      rec = run_main(planned, truth, F, algo, rng);
    else if (cfg.kind == "run-doubling")
      rec = run_doubling(planned, truth, F, algo, rng);
    else
      rec = run_factored(bc.factored, bc.truth_index, algo, rng);
    SeedRow row;
    row.seed = seed;
    row.v_pi = rec.output_policy >= 0
                   ? policy_value(truth, planned[rec.output_policy].plan.policy)
                   : 0.0;
    row.eps_optimal = rec.success && row.v_pi >= v_star - algo.epsilon - 1e-12;
    row.rec = std::move(rec);
    rows[i] = std::move(row);
  });

  int successes = 0;
  for (const auto& r : rows) successes += r.eps_optimal ? 1 : 0;
  json result{{"config", config_to_json(cfg)},
              {"v_star", v_star},
              {"runs", seed_rows_json(rows)},
              {"summary",
               {{"seeds", seeds.size()},
                {"eps_optimal_count", successes},
                {"eps_optimal_fraction", static_cast<double>(successes) / seeds.size()}}}};
  write_json_file(out_dir + "/results.json", result);
  write_text_file(out_dir + "/results.csv", seed_rows_csv(rows));
}

void run_plan_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
  BuiltClass bc = build_model_class(cfg.models, cfg.truth_index);
  std::vector<TabularCdp> tab = as_tabular(bc);
  const TabularCdp& model = tab[bc.truth_index];
  validate(model);
  PlanResult p = plan(model);
  json result = plan_to_json(p);
  result["config"] = config_to_json(cfg);
  write_json_file(out_dir + "/results.json", result);
}

void run_misfit_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
  BuiltClass bc = build_model_class(cfg.models, cfg.truth_index);
  std::vector<TabularCdp> tab = as_tabular(bc);
  std::vector<PlannedModel> planned = plan_class(tab);
  const TabularCdp& truth = tab[bc.truth_index];
  const int H = truth.horizon;
  const int n = static_cast<int>(planned.size());
  TestFunctionClass F = make_test_class(cfg.test_class, planned);

  std::string csv = "roll_in,target,h,bellman,misfit\n";
  json entries = json::array();
  for (int h = 1; h <= H; ++h)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double eb = bellman_error_exact(planned[i], planned[j], truth, h);
        double w = bc.is_factored()
                       ? factored_misfit_exact(truth, planned[i].plan.policy, bc.factored[j],
                                               bc.factored[bc.truth_index], h)
                       : witnessed_misfit_exact(planned[i], planned[j], truth, h, F);
        csv += fmt::format("{},{},{},{},{}\n", i, j, h, fmt_double(eb), fmt_double(w));
        entries.push_back(json{{"roll_in", i}, {"target", j}, {"h", h}, {"bellman", eb}, {"misfit", w}});
      }
  json result{{"config", config_to_json(cfg)}, {"entries", entries}};
  write_json_file(out_dir + "/results.json", result);
  write_text_file(out_dir + "/results.csv", csv);
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
  std::string csv = "roll_in";
  for (int j = 0; j < m.cols(); ++j) csv += fmt::format(",m{}", j);
  csv += "\n";
  for (int i = 0; i < m.rows(); ++i) {
    csv += fmt::format("m{}", i);
    for (int j = 0; j < m.cols(); ++j) csv += fmt::format(",{}", fmt_double(m(i, j)));
    csv += "\n";
  }
  return csv;
}

void run_rank_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
  BuiltClass bc = build_model_class(cfg.models, cfg.truth_index);
  std::vector<TabularCdp> tab = as_tabular(bc);
  std::vector<PlannedModel> planned = plan_class(tab);
  const TabularCdp& truth = tab[bc.truth_index];
  const int H = truth.horizon;
  TestFunctionClass F = make_test_class(cfg.test_class, planned);
  double tol = cfg.extra.contains("svd_tol") ? cfg.extra.at("svd_tol").get<double>() : kRankTol;

  json levels = json::array();
  for (int h = 1; h <= H; ++h) {
    PairwiseMatrix eb = build_matrix(planned, truth, bc.truth_index, h, MatrixKind::Bellman);
    json entry{{"h", h},
               {"bellman_rank", numerical_rank(eb.values, tol)},
               {"bellman_beta", beta_from_svd(eb.values, tol)}};
    write_text_file(out_dir + fmt::format("/matrix_bellman_h{}.csv", h), matrix_csv(eb.values));
    if (bc.is_factored()) {
      std::vector<Policy> policies;
      for (const auto& pm : planned) policies.push_back(pm.plan.policy);
      PairwiseMatrix wf =
          build_factored_matrix(bc.factored, policies, truth, bc.truth_index, h);
      Factorization fz =
          factored_factorization(bc.factored, policies, truth, bc.truth_index, h);
      entry["factored_rank"] = numerical_rank(wf.values, tol);
      entry["factored_dim"] = fz.dim;
      entry["factored_beta"] = fz.beta;
      entry["sandwich_ok"] = sandwich_check(wf.values, 1.0 / truth.actions, eb.values, wf.values);
      write_text_file(out_dir + fmt::format("/matrix_factored_h{}.csv", h), matrix_csv(wf.values));
    } else {
      PairwiseMatrix w =
          build_matrix(planned, truth, bc.truth_index, h, MatrixKind::Misfit, &F);
      entry["misfit_rank"] = numerical_rank(w.values, tol);
      entry["misfit_beta"] = beta_from_svd(w.values, tol);
      if (cfg.test_class == "bellman")
        entry["sandwich_ok"] = sandwich_check(w.values, 1.0, eb.values, w.values);
      write_text_file(out_dir + fmt::format("/matrix_misfit_h{}.csv", h), matrix_csv(w.values));
    }
    levels.push_back(entry);
  }
  json result{{"config", config_to_json(cfg)}, {"svd_tol", tol}, {"levels", levels}};
  write_json_file(out_dir + "/results.json", result);
}

void run_separation_demo(const ExperimentConfig& cfg, std::uint64_t seed_offset,
                         const std::string& out_dir) {
  int d = cfg.extra.contains("d") ? cfg.extra.at("d").get<int>() : 4;
  auto fam = build_separation_family(d);
  int truth = cfg.truth_index;
  TabularCdp expanded_truth = expand(fam[truth]);
  PlanResult truth_plan = plan(expanded_truth);
  AlgoConfig algo = cfg.algo;
  algo.oracle = cfg.mode == "oracle";
  std::vector<std::uint64_t> seeds = cfg.seeds.empty() ? std::vector<std::uint64_t>{0} : cfg.seeds;

  struct DemoRow {
    std::uint64_t seed;
    long long model_based_traj;
    double model_based_v;
    long long profile_traj;
    double profile_v;
  };
  std::vector<DemoRow> rows(seeds.size());
  for_each_index(seeds.size(), [&](std::size_t i) {
    std::uint64_t seed = seeds[i] + seed_offset;
    RunRecord rec = run_factored(fam, truth, algo, RngStream(seed, "separation-model-based"));
    double v_model = 0.0;
    if (rec.output_policy >= 0) {
      TabularCdp out_model = expand(fam[rec.output_policy]);
      v_model = policy_value(expanded_truth, plan(out_model).policy);
    }
    RngStream lrng(seed, "separation-profile");
    LearnerResult lr =
        profile_restricted_learner(expanded_truth, d, algo.max_trajectories, lrng);
    double v_profile = lr.found ? policy_value(expanded_truth, lr.policy) : 0.0;
    rows[i] = {seed, rec.total_trajectories, v_model, lr.trajectories, v_profile};
  });

  std::string csv = "learner,seed,trajectories,v_pi\n";
  double sum_model = 0.0, sum_profile = 0.0;
  for (const auto& r : rows) {
    csv += fmt::format("model_based,{},{},{}\n", r.seed, r.model_based_traj,
                       fmt_double(r.model_based_v));
    csv += fmt::format("profile_restricted,{},{},{}\n", r.seed, r.profile_traj,
                       fmt_double(r.profile_v));
    sum_model += static_cast<double>(r.model_based_traj);
    sum_profile += static_cast<double>(r.profile_traj);
  }
  json result{{"config", config_to_json(cfg)},
              {"d", d},
              {"v_star", truth_plan.value},
              {"mean_model_based_trajectories", sum_model / rows.size()},
              {"mean_profile_trajectories", sum_profile / rows.size()}};
  write_json_file(out_dir + "/results.json", result);
  write_text_file(out_dir + "/results.csv", csv);
}

void run_scheffe_check(const ExperimentConfig& cfg, const std::string& out_dir) {
  BuiltClass bc = build_model_class(cfg.models, cfg.truth_index);
  std::vector<TabularCdp> tab = as_tabular(bc);
  std::vector<PlannedModel> planned = plan_class(tab);
  const TabularCdp& truth = tab[bc.truth_index];
  TestFunctionClass scheffe = build_scheffe_class(planned);
  TestFunctionClass tv = TestFunctionClass::tv_ball(1.0);
  const int n = static_cast<int>(planned.size());
  double max_diff = 0.0;
  json entries = json::array();
  for (int h = 1; h <= truth.horizon; ++h)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double ws = witnessed_misfit_exact(planned[i], planned[j], truth, h, scheffe);
        double wt = witnessed_misfit_exact(planned[i], planned[j], truth, h, tv);
        max_diff = std::max(max_diff, std::abs(ws - wt));
        entries.push_back(json{
            {"roll_in", i}, {"target", j}, {"h", h}, {"scheffe", ws}, {"tv", wt}});
      }
  json result{{"config", config_to_json(cfg)},
              {"class_size", scheffe.size()},
              {"max_abs_diff", max_diff},
              {"ok", max_diff <= 1e-9},
              {"entries", entries}};
  write_json_file(out_dir + "/results.json", result);
}

}  // namespace

void run_experiment(const ExperimentConfig& cfg, std::uint64_t seed_offset,
                    const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  if (cfg.kind == "plan")
    run_plan_experiment(cfg, out_dir);
  else if (cfg.kind == "misfit")
    run_misfit_experiment(cfg, out_dir);
  else if (cfg.kind == "rank")
    run_rank_experiment(cfg, out_dir);
  else if (cfg.kind == "run-main" || cfg.kind == "run-doubling" || cfg.kind == "run-factored")
    run_algorithm_experiment(cfg, seed_offset, out_dir);
  else if (cfg.kind == "separation-demo")
    run_separation_demo(cfg, seed_offset, out_dir);
  else if (cfg.kind == "scheffe-check")
    run_scheffe_check(cfg, out_dir);
  else
    throw ConfigError(fmt::format("unknown experiment kind '{}'", cfg.kind));
}

int run_experiment_file(const std::string& config_path, const std::string& expected_kind,
                        std::uint64_t seed_offset, const std::string& out_dir) {
  auto emit_error = [&](const json& err, int code) {
    json doc{{"error", err}};
    std::cerr << doc.dump(2) << std::endl;
    try {
      std::filesystem::create_directories(out_dir);
      write_json_file(out_dir + "/error.json", doc);
    } catch (...) {
    }
    return code;
  };
  try {
    json j = json::parse(read_text_file(config_path));
    ExperimentConfig cfg = config_from_json(j);
    if (!expected_kind.empty() && cfg.kind != expected_kind)
      throw ConfigError(fmt::format("config kind '{}' does not match subcommand '{}'", cfg.kind,
                                    expected_kind));
    run_experiment(cfg, seed_offset, out_dir);
    return 0;
  } catch (const ValidationError& e) {
    return emit_error(
        json{{"type", "validation"}, {"message", e.what()}, {"h", e.h}, {"x", e.x}, {"a", e.a}},
        2);
  } catch (const StructuralError& e) {
    return emit_error(json{{"type", "structural"}, {"message", e.what()}}, 2);
  } catch (const json::exception& e) {
    return emit_error(json{{"type", "parse"}, {"message", e.what()}}, 2);
  } catch (const CapacityError& e) {
    return emit_error(json{{"type", "capacity"}, {"message", e.what()}}, 1);
  } catch (const BudgetError& e) {
    return emit_error(json{{"type", "budget"}, {"message", e.what()}}, 1);
  } catch (const ConfigError& e) {
    return emit_error(json{{"type", "config"}, {"message", e.what()}}, 1);
  } catch (const std::exception& e) {
    return emit_error(json{{"type", "internal"}, {"message", e.what()}}, 1);
  }
}

}  // namespace witlab
