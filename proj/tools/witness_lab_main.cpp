// witness-lab: CLI over the witness-lab C API.
//
//   witness-lab <subcommand> --config <file> [--seed-offset N] [--out DIR]
//
// Subcommands: plan, misfit, rank, run-main, run-doubling, run-factored,
// separation-demo, scheffe-check.  The config file's "kind" must match the
// subcommand.  Results are written into the output directory; on failure an
// error JSON is printed and a nonzero exit code returned (2 for malformed
// models / schemas, 1 otherwise).

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "witness_lab.h"

namespace {

int status_to_exit(wl_status s) {
  switch (s) {
    case WL_OK:
      return 0;
    case WL_ERR_PARSE:
    case WL_ERR_VALIDATION:
      return 2;
    default:
      return 1;
  }
}

const char* status_name(wl_status s) {
  switch (s) {
    case WL_OK: return "ok";
    case WL_ERR_IO: return "io";
    case WL_ERR_PARSE: return "parse";
    case WL_ERR_VALIDATION: return "validation";
    case WL_ERR_CAPACITY: return "capacity";
    case WL_ERR_BUDGET: return "budget";
    case WL_ERR_CONFIG: return "config";
    case WL_ERR_INVALID_ARG: return "invalid_arg";
    default: return "internal";
  }
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"witness-lab: model-elimination RL experiments"};
  app.require_subcommand(1);

  const std::vector<std::string> kinds = {"plan",          "misfit",        "rank",
                                          "run-main",      "run-doubling",  "run-factored",
                                          "separation-demo", "scheffe-check"};
  std::string config_path;
  unsigned long long seed_offset = 0;
  std::string out_dir = "out";
  bool version = false;
  app.add_flag("--version", version, "print the library version and exit");

  for (const auto& kind : kinds) {
    CLI::App* sub = app.add_subcommand(kind, "run a '" + kind + "' experiment");
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--seed-offset", seed_offset, "offset added to every configured seed");
    sub->add_option("--out", out_dir, "output directory (default: out)");
  }

  CLI11_PARSE(app, argc, argv);
  if (version) {
    std::printf("%s\n", wl_version());
    return 0;
  }

  const std::string kind = app.get_subcommands().front()->get_name();
  wl_status s = wl_run_experiment(config_path.c_str(), kind.c_str(), seed_offset, out_dir.c_str());
  if (s != WL_OK) {
    int h = -1, x = -1, a = -1;
    wl_last_error_location(&h, &x, &a);
    std::printf(
        "{\"error\":{\"type\":\"%s\",\"message\":\"%s\",\"h\":%d,\"x\":%d,\"a\":%d}}\n",
        status_name(s), json_escape(wl_last_error()).c_str(), h, x, a);
  }
  return status_to_exit(s);
}
