#include "ats/tree_gen.hpp"

#include <string>

#include "ats/errors.hpp"
#include "ats/rng.hpp"

namespace ats {

long long balanced_tree_size(int branch_count, int stage_count) {
  if (branch_count < 1 || stage_count < 1)
    throw InvalidConfig("balanced_tree_size: branch and stage counts must be >= 1");
  if (branch_count == 1) return stage_count;
  long long total = 0, level = 1;
  for (int t = 0; t < stage_count; ++t) {
    total += level;
    level *= branch_count;
  }
  return total;
}

namespace {

// Bounds for stage t (2-based); a single shared entry is allowed.
double stage_entry(const std::vector<double>& v, int t) {
  return v.size() == 1 ? v[0] : v[t - 2];
}

void validate(const TreeGenConfig& c) {
  if (c.branch_count < 1) throw InvalidConfig("generate_tree: branch_count must be >= 1");
  if (c.stage_count < 1) throw InvalidConfig("generate_tree: stage_count must be >= 1");
  if (c.stage_count > 1) {
    auto check_size = [&](const std::vector<double>& v, const char* name) {
      if (v.size() != 1 && static_cast<int>(v.size()) != c.stage_count - 1)
        throw InvalidConfig(std::string("generate_tree: ") + name + " must have 1 or T-1 entries");
    };
    check_size(c.alpha_low, "alpha_low");
    check_size(c.alpha_high, "alpha_high");
    for (int t = 2; t <= c.stage_count; ++t)
      if (stage_entry(c.alpha_low, t) > stage_entry(c.alpha_high, t))
        throw InvalidConfig("generate_tree: alpha_low > alpha_high at stage " + std::to_string(t));
  }
  if (c.root_demand.empty()) throw InvalidConfig("generate_tree: root_demand is empty");
  for (const auto& [field, value] : c.root_demand)
    if (!(value >= 0.0)) throw InvalidConfig("generate_tree: negative root demand for " + field);
}

}  // namespace

ScenarioTree generate_tree(const TreeGenConfig& config) {
  validate(config);
  const int M = config.branch_count;
  const int T = config.stage_count;
  const long long total = balanced_tree_size(M, T);

  std::vector<int> parents(total, ScenarioTree::kNoParent);
  std::vector<double> probs(total, 1.0);
  std::map<std::string, std::vector<double>> payloads;
  for (const auto& [field, root_value] : config.root_demand) {
    payloads[field].assign(total, 0.0);
    payloads[field][0] = root_value;
  }

  Rng rng(config.seed);
  long long stage_begin = 0, stage_size = 1;  // root level
  for (int t = 2; t <= T; ++t) {
    const double lo = stage_entry(config.alpha_low, t);
    const double hi = stage_entry(config.alpha_high, t);
    const double step = (hi - lo) / M;

    // Shared mode: one multiplier per branch order for the whole stage.
    std::vector<double> shared(M);
    if (config.share_draw_per_branch)
      for (int j = 0; j < M; ++j) shared[j] = rng.uniform(lo + j * step, lo + (j + 1) * step);

    const long long child_begin = stage_begin + stage_size;
    for (long long p = 0; p < stage_size; ++p) {
      const long long parent_id = stage_begin + p;
      for (int j = 0; j < M; ++j) {
        const long long child = child_begin + p * M + j;
        parents[child] = static_cast<int>(parent_id);
        probs[child] = probs[parent_id] / M;
        const double beta = config.share_draw_per_branch
                                ? shared[j]
                                : rng.uniform(lo + j * step, lo + (j + 1) * step);
        for (auto& [field, values] : payloads)
          values[child] = beta * values[parent_id];
      }
    }
    stage_begin = child_begin;
    stage_size *= M;
  }

  return ScenarioTree(std::move(parents), std::move(probs), std::move(payloads));
}

}  // namespace ats
