#pragma once

#include <string>
#include <vector>

#include "core/json_io.hpp"

namespace witlab {

struct ExperimentConfig {
  // plan | misfit | rank | run-main | run-doubling | run-factored |
  // separation-demo | scheffe-check
  std::string kind;
  std::string mode = "oracle";  // oracle | sampling
  // {"builder": "...", "params": {...}} or {"files": ["..."]}
  json models = json::object();
  int truth_index = 0;
  AlgoConfig algo;
  std::string test_class = "bellman";  // bellman | tv | tv2 | scheffe
  std::vector<std::uint64_t> seeds;
  json extra = json::object();
};

ExperimentConfig config_from_json(const json& j);
json config_to_json(const ExperimentConfig& c);

// A loaded model class, tabular or factored.
struct BuiltClass {
  std::vector<TabularCdp> tabular;
  std::vector<FactoredMdp> factored;
  int truth_index = 0;
  bool is_factored() const { return !factored.empty(); }
};
BuiltClass build_model_class(const json& models_spec, int truth_index);

// Execute the experiment and write result files into out_dir.  Throws on
// error; run_experiment_file wraps this with the exit-code/error-JSON
// contract.
void run_experiment(const ExperimentConfig& config, std::uint64_t seed_offset,
                    const std::string& out_dir);

// Full CLI semantics: parse config file, check the expected kind, run, and
// on failure write error JSON (to out_dir/error.json and stderr).  Returns
// the process exit code: 0 ok, 2 model validation/schema errors, 1 others.
int run_experiment_file(const std::string& config_path, const std::string& expected_kind,
                        std::uint64_t seed_offset, const std::string& out_dir);

}  // namespace witlab
