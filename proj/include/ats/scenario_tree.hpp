#pragma once

#include <map>
#include <string>
#include <vector>

namespace ats {

// Finite scenario tree over stages 1..stage_count(). Node ids are dense in
// [0, size()); node 0 is the root and ids follow breadth-first stage order
// (every node of stage t precedes every node of stage t+1). Probabilities
// must sum to one within each stage and telescope from parent to children.
// Arbitrary named per-node data (costs, demands) rides along as payload
// fields. Immutable after construction; safe to share across threads.
class ScenarioTree {
 public:
  static constexpr int kNoParent = -1;

  // Validates the structure; throws InvalidTree on any violation.
  ScenarioTree(std::vector<int> parents, std::vector<double> probabilities,
               std::map<std::string, std::vector<double>> payloads = {});

  int size() const { return static_cast<int>(parent_.size()); }
  int stage_count() const { return stage_count_; }

  int stage_of(int node) const { check_node(node); return stage_[node]; }
  int parent(int node) const { check_node(node); return parent_[node]; }
  double probability(int node) const { check_node(node); return probability_[node]; }
  const std::vector<int>& children(int node) const { check_node(node); return children_[node]; }

  // S_t for t in [1, stage_count], ascending node ids.
  const std::vector<int>& nodes_at_stage(int t) const;
  // S_T.
  const std::vector<int>& leaves() const { return nodes_at_stage(stage_count_); }

  // Root path P(n): [root, ..., n]; length equals stage_of(n).
  std::vector<int> path_to_root(int node) const;

  // Subtree T(node, t_end): all descendants of `node` (inclusive) with stage
  // <= t_end, in ascending id order. Requires stage_of(node) <= t_end <= T.
  std::vector<int> subtree(int node, int t_end) const;
  std::vector<int> subtree(int node) const { return subtree(node, stage_count_); }

  bool has_payload(const std::string& field) const;
  // Per-node values for a payload field; throws MissingField.
  const std::vector<double>& payload(const std::string& field) const;
  const std::map<std::string, std::vector<double>>& payloads() const { return payloads_; }

 private:
  void check_node(int node) const;

  int stage_count_ = 0;
  std::vector<int> parent_;
  std::vector<double> probability_;
  std::vector<int> stage_;
  std::vector<std::vector<int>> children_;
  std::vector<std::vector<int>> stage_nodes_;  // [t-1] -> S_t
  std::map<std::string, std::vector<double>> payloads_;
};

// Stage-cluster condensation of a tree for one revision time t*: one
// condensed node per stage t < t* (whole stage committed together), then one
// condensed node per (branch node j in S_{t*}, stage t >= t*) covering
// S_t within the subtree of j. Cumulative-acquisition constraints written on
// this structure are exactly the fixed-revision design restricted to its
// distinct variables. p_hat sums cluster probability, a_hat sums
// probability-weighted cost (so it is already an expectation term, usable
// directly as an objective coefficient), delta_hat takes the cluster demand
// maximum.
struct CondensedTree {
  const ScenarioTree* base = nullptr;
  int revision_time = 1;
  std::vector<int> parent;               // per condensed node; kNoParent at the root
  std::vector<int> stage;                // original stage of each condensed node
  std::vector<int> branch;               // base node j in S_{t*} owning the chain; kNoParent on prefix nodes
  std::vector<std::vector<int>> cluster;  // condensed node -> base nodes, ascending
  std::vector<int> cover;                // base node -> its condensed node
  std::vector<double> p_hat;
  std::vector<double> a_hat;             // empty when built without a cost field
  std::vector<double> delta_hat;         // empty when built without a demand field

  int size() const { return static_cast<int>(parent.size()); }
  // Condensed ancestor chain, root first; mirrors path_to_root.
  std::vector<int> path_to_root(int node) const;
};

// Structure and probabilities only; cost/demand aggregates left empty.
CondensedTree condense_structure(const ScenarioTree& tree, int revision_time);

// Full condensation with a_hat/delta_hat aggregated from payload fields.
CondensedTree condense(const ScenarioTree& tree, int revision_time,
                       const std::string& cost_field, const std::string& demand_field);

}  // namespace ats
