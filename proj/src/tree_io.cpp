#include "ats/tree_io.hpp"

#include <fstream>

#include "ats/errors.hpp"

namespace ats {

nlohmann::json tree_to_json(const ScenarioTree& tree) {
  nlohmann::json j;
  j["version"] = 1;
  j["stage_count"] = tree.stage_count();
  std::vector<int> parents(tree.size());
  std::vector<double> probs(tree.size());
  for (int n = 0; n < tree.size(); ++n) {
    parents[n] = tree.parent(n);
    probs[n] = tree.probability(n);
  }
  j["parents"] = parents;
  j["probabilities"] = probs;
  j["payloads"] = nlohmann::json::object();
  for (const auto& [field, values] : tree.payloads()) j["payloads"][field] = values;
  return j;
}

ScenarioTree tree_from_json(const nlohmann::json& j) {
  try {
    if (!j.contains("version") || j.at("version").get<int>() != 1)
      throw ParseError("tree JSON: unsupported or missing schema version");
    auto parents = j.at("parents").get<std::vector<int>>();
    auto probs = j.at("probabilities").get<std::vector<double>>();
    std::map<std::string, std::vector<double>> payloads;
    if (j.contains("payloads"))
      for (const auto& [field, values] : j.at("payloads").items())
        payloads[field] = values.get<std::vector<double>>();
    ScenarioTree tree(std::move(parents), std::move(probs), std::move(payloads));
    if (j.contains("stage_count") && j.at("stage_count").get<int>() != tree.stage_count())
      throw ParseError("tree JSON: stage_count does not match parent structure");
    return tree;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("tree JSON: ") + e.what());
  }
}

void save_tree(const ScenarioTree& tree, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  out << tree_to_json(tree).dump(2) << "\n";
}

ScenarioTree load_tree(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("cannot parse '") + path + "': " + e.what());
  }
  return tree_from_json(j);
}

}  // namespace ats
