#include "ats/scenario_tree.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ats/errors.hpp"

namespace ats {

namespace {
constexpr double kProbTol = 1e-9;
}

ScenarioTree::ScenarioTree(std::vector<int> parents, std::vector<double> probabilities,
                           std::map<std::string, std::vector<double>> payloads)
    : parent_(std::move(parents)),
      probability_(std::move(probabilities)),
      payloads_(std::move(payloads)) {
  const int n = size();
  if (n == 0) throw InvalidTree("tree has no nodes");
  if (static_cast<int>(probability_.size()) != n)
    throw InvalidTree("probability count does not match node count");
  if (parent_[0] != kNoParent) throw InvalidTree("node 0 must be the root");

  stage_.assign(n, 0);
  children_.assign(n, {});
  stage_[0] = 1;
  for (int i = 1; i < n; ++i) {
    if (parent_[i] == kNoParent) throw InvalidTree("multiple roots: node " + std::to_string(i));
    if (parent_[i] < 0 || parent_[i] >= i)
      throw InvalidTree("parent of node " + std::to_string(i) +
                        " must be an earlier node (breadth-first stage order)");
    stage_[i] = stage_[parent_[i]] + 1;
    children_[parent_[i]].push_back(i);
  }
  stage_count_ = *std::max_element(stage_.begin(), stage_.end());

  // Breadth-first stage order: stages must be nondecreasing in id.
  for (int i = 1; i < n; ++i)
    if (stage_[i] < stage_[i - 1])
      throw InvalidTree("node ids are not in breadth-first stage order");

  stage_nodes_.assign(stage_count_, {});
  for (int i = 0; i < n; ++i) stage_nodes_[stage_[i] - 1].push_back(i);

  for (int i = 0; i < n; ++i) {
    if (!(probability_[i] > 0.0) || probability_[i] > 1.0 + kProbTol)
      throw InvalidTree("probability of node " + std::to_string(i) + " outside (0,1]");
  }
  for (int t = 1; t <= stage_count_; ++t) {
    double sum = 0.0;
    for (int node : stage_nodes_[t - 1]) sum += probability_[node];
    if (std::abs(sum - 1.0) > kProbTol)
      throw InvalidTree("stage " + std::to_string(t) + " probabilities sum to " +
                        std::to_string(sum));
  }
  for (int i = 0; i < n; ++i) {
    if (children_[i].empty()) {
      if (stage_[i] != stage_count_)
        throw InvalidTree("interior node " + std::to_string(i) + " has no children");
      continue;
    }
    double sum = 0.0;
    for (int c : children_[i]) sum += probability_[c];
    if (std::abs(sum - probability_[i]) > kProbTol)
      throw InvalidTree("children probabilities of node " + std::to_string(i) +
                        " do not sum to the node's probability");
  }

  for (const auto& [field, values] : payloads_)
    if (static_cast<int>(values.size()) != n)
      throw InvalidTree("payload '" + field + "' has " + std::to_string(values.size()) +
                        " values for " + std::to_string(n) + " nodes");
}

void ScenarioTree::check_node(int node) const {
  if (node < 0 || node >= size())
    throw UnknownNode("node " + std::to_string(node) + " outside [0," +
                      std::to_string(size()) + ")");
}

const std::vector<int>& ScenarioTree::nodes_at_stage(int t) const {
  if (t < 1 || t > stage_count_)
    throw InvalidRange("stage " + std::to_string(t) + " outside [1," +
                       std::to_string(stage_count_) + "]");
  return stage_nodes_[t - 1];
}

std::vector<int> ScenarioTree::path_to_root(int node) const {
  check_node(node);
  std::vector<int> path;
  for (int cur = node; cur != kNoParent; cur = parent_[cur]) path.push_back(cur);
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<int> ScenarioTree::subtree(int node, int t_end) const {
  check_node(node);
  if (t_end < stage_[node] || t_end > stage_count_)
    throw InvalidRange("subtree horizon " + std::to_string(t_end) + " outside [" +
                       std::to_string(stage_[node]) + "," + std::to_string(stage_count_) + "]");
  std::vector<int> result;
  std::vector<int> frontier = {node};
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int cur : frontier) {
      result.push_back(cur);
      if (stage_[cur] < t_end)
        for (int c : children_[cur]) next.push_back(c);
    }
    frontier = std::move(next);
  }
  std::sort(result.begin(), result.end());
  return result;
}

bool ScenarioTree::has_payload(const std::string& field) const {
  return payloads_.count(field) > 0;
}

const std::vector<double>& ScenarioTree::payload(const std::string& field) const {
  auto it = payloads_.find(field);
  if (it == payloads_.end()) throw MissingField("payload field '" + field + "' not present");
  return it->second;
}

std::vector<int> CondensedTree::path_to_root(int node) const {
  std::vector<int> path;
  for (int cur = node; cur != ScenarioTree::kNoParent; cur = parent[cur]) path.push_back(cur);
  std::reverse(path.begin(), path.end());
  return path;
}

CondensedTree condense_structure(const ScenarioTree& tree, int revision_time) {
  const int T = tree.stage_count();
  if (revision_time < 1 || revision_time > T)
    throw InvalidRange("revision time " + std::to_string(revision_time) + " outside [1," +
                       std::to_string(T) + "]");

  CondensedTree ct;
  ct.base = &tree;
  ct.revision_time = revision_time;

  // Prefix: one condensed node per stage t < t*, a single committed chain.
  for (int t = 1; t < revision_time; ++t) {
    ct.parent.push_back(t == 1 ? ScenarioTree::kNoParent : static_cast<int>(ct.parent.size()) - 1);
    ct.stage.push_back(t);
    ct.branch.push_back(ScenarioTree::kNoParent);
    ct.cluster.push_back(tree.nodes_at_stage(t));
  }
  const int prefix_end = static_cast<int>(ct.parent.size()) - 1;  // -1 when t*=1

  // One chain per branch node j in S_{t*}, covering stages t*..T inside T(j).
  for (int j : tree.nodes_at_stage(revision_time)) {
    std::vector<int> sub = tree.subtree(j);
    for (int t = revision_time; t <= T; ++t) {
      int id = static_cast<int>(ct.parent.size());
      ct.parent.push_back(t == revision_time ? prefix_end : id - 1);
      ct.stage.push_back(t);
      ct.branch.push_back(j);
      std::vector<int> members;
      for (int m : sub)
        if (tree.stage_of(m) == t) members.push_back(m);
      ct.cluster.push_back(std::move(members));
    }
  }

  ct.cover.assign(tree.size(), -1);
  ct.p_hat.assign(ct.size(), 0.0);
  for (int c = 0; c < ct.size(); ++c) {
    for (int m : ct.cluster[c]) {
      ct.cover[m] = c;
      ct.p_hat[c] += tree.probability(m);
    }
  }
  return ct;
}

CondensedTree condense(const ScenarioTree& tree, int revision_time,
                       const std::string& cost_field, const std::string& demand_field) {
  const std::vector<double>& a = tree.payload(cost_field);
  const std::vector<double>& delta = tree.payload(demand_field);
  CondensedTree ct = condense_structure(tree, revision_time);
  ct.a_hat.assign(ct.size(), 0.0);
  ct.delta_hat.assign(ct.size(), 0.0);
  for (int c = 0; c < ct.size(); ++c) {
    double dmax = 0.0;
    bool first = true;
    for (int m : ct.cluster[c]) {
      ct.a_hat[c] += tree.probability(m) * a[m];
      dmax = first ? delta[m] : std::max(dmax, delta[m]);
      first = false;
    }
    ct.delta_hat[c] = dmax;
  }
  return ct;
}

}  // namespace ats
