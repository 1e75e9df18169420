#include "core/json_io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/core.h>

namespace witlab {

namespace {

json reward_to_json(const RewardDist& r) {
  return json{{"values", r.values}, {"probs", r.probs}};
}

RewardDist reward_from_json(const json& j) {
  if (j.is_number()) return RewardDist::point(j.get<double>());
  RewardDist r;
  r.values = j.at("values").get<std::vector<double>>();
  r.probs = j.at("probs").get<std::vector<double>>();
  return r;
}

}  // namespace

json tabular_to_json(const TabularCdp& m) {
  json levels = json::array();
  for (int h = 1; h <= m.horizon; ++h) {
    json transitions = json::array();
    json rewards = json::array();
    for (int x = 0; x < m.states(h); ++x) {
      json tx = json::array();
      json rx = json::array();
      for (int a = 0; a < m.actions; ++a) {
        tx.push_back(m.transitions[h - 1][x][a]);
        rx.push_back(reward_to_json(m.rewards[h - 1][x][a]));
      }
      transitions.push_back(tx);
      rewards.push_back(rx);
    }
    levels.push_back(json{
        {"states", m.states(h)}, {"transitions", transitions}, {"rewards", rewards}});
  }
  levels.push_back(json{{"states", m.states(m.horizon + 1)}});
  return json{{"horizon", m.horizon},
              {"actions", m.actions},
              {"initial", m.initial},
              {"levels", levels}};
}

TabularCdp tabular_from_json(const json& j) {
  TabularCdp m;
  m.horizon = j.at("horizon").get<int>();
  m.actions = j.at("actions").get<int>();
  m.initial = j.at("initial").get<std::vector<double>>();
  const json& levels = j.at("levels");
  if (static_cast<int>(levels.size()) != m.horizon + 1)
    throw StructuralError(fmt::format("model file: expected {} levels, found {}", m.horizon + 1,
                                      levels.size()));
  m.level_sizes.resize(m.horizon + 1);
  m.transitions.resize(m.horizon);
  m.rewards.resize(m.horizon);
  for (int h = 1; h <= m.horizon + 1; ++h)
    m.level_sizes[h - 1] = levels[h - 1].at("states").get<int>();
  for (int h = 1; h <= m.horizon; ++h) {
    const json& tx = levels[h - 1].at("transitions");
    const json& rx = levels[h - 1].at("rewards");
    m.transitions[h - 1].resize(m.states(h));
    m.rewards[h - 1].resize(m.states(h));
    if (static_cast<int>(tx.size()) != m.states(h) || static_cast<int>(rx.size()) != m.states(h))
      throw StructuralError(fmt::format("model file: level {} row count mismatch", h));
    for (int x = 0; x < m.states(h); ++x) {
      m.transitions[h - 1][x].resize(m.actions);
      m.rewards[h - 1][x].resize(m.actions);
      for (int a = 0; a < m.actions; ++a) {
        m.transitions[h - 1][x][a] = tx[x][a].get<std::vector<double>>();
        m.rewards[h - 1][x][a] = reward_from_json(rx[x][a]);
      }
    }
  }
  validate(m);
  return m;
}

json factored_to_json(const FactoredMdp& f) {
  return json{{"factored", true},
              {"d", f.d},
              {"values", f.num_values},
              {"horizon", f.horizon},
              {"actions", f.actions},
              {"parents", f.parents},
              {"cpts", f.cpts},
              {"reward", f.rewards},
              {"initial", f.initial}};
}

FactoredMdp factored_from_json(const json& j) {
  FactoredMdp f;
  f.d = j.at("d").get<int>();
  f.num_values = j.at("values").get<int>();
  f.horizon = j.at("horizon").get<int>();
  f.actions = j.at("actions").get<int>();
  f.parents = j.at("parents").get<std::vector<std::vector<int>>>();
  f.cpts = j.at("cpts")
               .get<std::vector<std::vector<std::vector<std::vector<std::vector<double>>>>>>();
  f.rewards = j.at("reward").get<std::vector<std::vector<double>>>();
  if (j.contains("initial")) f.initial = j.at("initial").get<std::vector<double>>();
  validate(f);
  return f;
}

LoadedModel model_from_json(const json& j) {
  LoadedModel out;
  if (j.contains("factored") && j.at("factored").get<bool>())
    out.factored = factored_from_json(j);
  else
    out.tabular = tabular_from_json(j);
  return out;
}

LoadedModel load_model_file(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw StructuralError(fmt::format("model file {}: {}", path, e.what()));
  }
  return model_from_json(j);
}

json plan_to_json(const PlanResult& p) {
  json policy = json::array();
  for (const auto& level : p.policy.probs) {
    json acts = json::array();
    for (const auto& row : level) {
      int best = 0;
      for (std::size_t a = 0; a < row.size(); ++a)
        if (row[a] > row[best]) best = static_cast<int>(a);
      acts.push_back(best);
    }
    policy.push_back(acts);
  }
  return json{{"v_star", p.value}, {"policy", policy}, {"V", p.V}, {"Q", p.Q}};
}

json run_record_to_json(const RunRecord& r) {
  json rounds = json::array();
  for (const auto& rd : r.rounds)
    rounds.push_back(json{{"round", rd.round},
                          {"chosen", rd.chosen},
                          {"v_model", rd.v_model},
                          {"v_hat", rd.v_hat},
                          {"terminated", rd.terminated},
                          {"h_t", rd.h_t},
                          {"misfits", rd.misfits},
                          {"survivors_before", rd.survivors_before},
                          {"eliminated", rd.eliminated},
                          {"trajectories", rd.trajectories}});
  json doubling = json::array();
  for (const auto& st : r.doubling)
    doubling.push_back(json{{"i", st.i},
                            {"j", st.j},
                            {"kappa", st.kappa_ij},
                            {"wrank", st.wrank_ij},
                            {"succeeded", st.succeeded}});
  return json{{"rounds", rounds},
              {"final_version_space", r.final_version_space},
              {"output_policy", r.output_policy},
              {"total_trajectories", r.total_trajectories},
              {"success", r.success},
              {"fault", r.fault},
              {"doubling", doubling}};
}

json algo_config_to_json(const AlgoConfig& c) {
  return json{{"epsilon", c.epsilon},
              {"delta", c.delta},
              {"oracle", c.oracle},
              {"phi", c.phi},
              {"n", c.n},
              {"n_e", c.n_e},
              {"n_multiplier", c.n_multiplier},
              {"ne_multiplier", c.ne_multiplier},
              {"kappa", c.kappa},
              {"wrank", c.wrank},
              {"beta", c.beta},
              {"max_rounds", c.max_rounds},
              {"f_size", c.f_size},
              {"max_trajectories", c.max_trajectories}};
}

AlgoConfig algo_config_from_json(const json& j) {
  AlgoConfig c;
  if (j.contains("epsilon")) c.epsilon = j.at("epsilon").get<double>();
  if (j.contains("delta")) c.delta = j.at("delta").get<double>();
  if (j.contains("oracle")) c.oracle = j.at("oracle").get<bool>();
  if (j.contains("phi")) c.phi = j.at("phi").get<double>();
  if (j.contains("n")) c.n = j.at("n").get<long long>();
  if (j.contains("n_e")) c.n_e = j.at("n_e").get<long long>();
  if (j.contains("n_multiplier")) c.n_multiplier = j.at("n_multiplier").get<double>();
  if (j.contains("ne_multiplier")) c.ne_multiplier = j.at("ne_multiplier").get<double>();
  if (j.contains("kappa")) c.kappa = j.at("kappa").get<double>();
  if (j.contains("wrank")) c.wrank = j.at("wrank").get<double>();
  if (j.contains("beta")) c.beta = j.at("beta").get<double>();
  if (j.contains("max_rounds")) c.max_rounds = j.at("max_rounds").get<int>();
  if (j.contains("f_size")) c.f_size = j.at("f_size").get<long long>();
  if (j.contains("max_trajectories"))
    c.max_trajectories = j.at("max_trajectories").get<long long>();
  return c;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open file: {}", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write file: {}", path));
  out << content;
}

}  // namespace witlab
