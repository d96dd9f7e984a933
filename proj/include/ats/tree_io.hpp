#pragma once

#include <string>

#include <json.hpp>

#include "ats/scenario_tree.hpp"

namespace ats {

// Canonical tree serialization:
//   {"version": 1, "stage_count": T, "parents": [-1, ...],
//    "probabilities": [...], "payloads": {"field": [...], ...}}
// Root parent is encoded as -1. Readers validate through the ScenarioTree
// constructor, so malformed structure surfaces as InvalidTree and malformed
// JSON as ParseError.
nlohmann::json tree_to_json(const ScenarioTree& tree);
ScenarioTree tree_from_json(const nlohmann::json& j);

void save_tree(const ScenarioTree& tree, const std::string& path);
ScenarioTree load_tree(const std::string& path);

}  // namespace ats
