#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ats/scenario_tree.hpp"

namespace ats {

// Random scenario-tree construction: an M-ary balanced tree over T stages
// where each child's demand is its parent's demand scaled by a multiplier
// drawn from an equisized sub-interval of [alpha_low[t], alpha_high[t]].
// Child of branch order j (0-based index within its parent) draws from
// [alpha_t^j, alpha_t^{j+1}] with alpha_t^j = alpha_low + j*(alpha_high -
// alpha_low)/M, so low branches shrink demand and high branches grow it.
// Branch probabilities are uniform 1/M. Deterministic given seed.
struct TreeGenConfig {
  int branch_count = 2;  // M >= 1
  int stage_count = 3;   // T >= 1
  // Multiplier interval per stage 2..T (size T-1, or size 1 to share).
  std::vector<double> alpha_low;
  std::vector<double> alpha_high;
  // Demand payload fields and their root values, e.g. {"demand[peak]", 11000}.
  std::map<std::string, double> root_demand;
  // One multiplier draw per (stage, branch order) shared by all nodes of that
  // branch order, instead of the default independent draw per node.
  bool share_draw_per_branch = false;
  std::uint64_t seed = 0;
};

ScenarioTree generate_tree(const TreeGenConfig& config);

// Node count of the balanced M-ary tree with T stages: (M^T - 1)/(M - 1),
// or T when M = 1. Used by the experiment harness to size sweeps.
long long balanced_tree_size(int branch_count, int stage_count);

}  // namespace ats
