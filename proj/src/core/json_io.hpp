#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "core/factored.hpp"
#include "core/model.hpp"
#include "core/olime.hpp"

namespace witlab {

using nlohmann::json;

json tabular_to_json(const TabularCdp& m);
TabularCdp tabular_from_json(const json& j);

json factored_to_json(const FactoredMdp& f);
FactoredMdp factored_from_json(const json& j);

// Either a tabular or a factored model, depending on the file's schema.
struct LoadedModel {
  std::optional<TabularCdp> tabular;
  std::optional<FactoredMdp> factored;
};
LoadedModel model_from_json(const json& j);
LoadedModel load_model_file(const std::string& path);

json plan_to_json(const PlanResult& p);
json run_record_to_json(const RunRecord& r);

// Round-trippable JSON for the algorithm configuration.
json algo_config_to_json(const AlgoConfig& c);
AlgoConfig algo_config_from_json(const json& j);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace witlab
