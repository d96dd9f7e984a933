#pragma once

#include <string>

#include "ats/model.hpp"

namespace ats {

// Canonical model text in the industry-standard LP-file layout (see
// README.md, "Model text format", for the exact grammar and byte-level
// conventions). Deterministic: equal models serialize to identical bytes.
std::string to_lp_string(const ModelInstance& model);

// Parses the LP subset documented in README.md: objective sense + expression,
// Subject To rows, Bounds, General(s), Binar(y|ies), End. Variables are
// created in order of first appearance. Throws ParseError on malformed input.
ModelInstance model_from_lp_string(const std::string& text);

void save_lp(const ModelInstance& model, const std::string& path);
ModelInstance load_lp(const std::string& path);

}  // namespace ats
