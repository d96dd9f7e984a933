#pragma once

#include <string>
#include <vector>

#include "ats/model.hpp"
#include "ats/scenario_tree.hpp"

namespace ats {

// Capacity expansion data over a scenario tree: I resource types accumulate
// integer acquisition units x; continuous allocations y consume capacity and
// serve demand at every node. At node n the allocation must satisfy
//   A_n y_n <= sum of x over the root path (per resource row)
//   B_n y_n >= d_n                        (per item row)
// Each field holds either one entry shared by all nodes or one entry per
// node id. Matrices are stored row-major (A: I rows x J cols, B: K x J).
struct CapacityExpansionData {
  int resource_count = 0;  // I
  int task_count = 0;      // J
  int item_count = 0;      // K
  std::vector<std::vector<double>> a;  // acquisition cost, entry size I
  std::vector<std::vector<double>> b;  // allocation cost, entry size J
  std::vector<std::vector<double>> A;  // capacity usage, entry size I*J
  std::vector<std::vector<double>> B;  // demand coverage, entry size K*J
  std::vector<std::vector<double>> d;  // demand, entry size K

  const std::vector<double>& a_at(int node) const { return a[a.size() == 1 ? 0 : node]; }
  const std::vector<double>& b_at(int node) const { return b[b.size() == 1 ? 0 : node]; }
  const std::vector<double>& A_at(int node) const { return A[A.size() == 1 ? 0 : node]; }
  const std::vector<double>& B_at(int node) const { return B[B.size() == 1 ? 0 : node]; }
  const std::vector<double>& d_at(int node) const { return d[d.size() == 1 ? 0 : node]; }

  // Throws DimensionMismatch when any field is neither shared nor per-node
  // or an entry has the wrong size, InvalidConfig on negative costs or
  // non-finite data.
  void validate(const ScenarioTree& tree) const;
};

// JSON schema (see README): {"resources": I, "tasks": J, "items": K,
// "a": [[...]], "b": [[...]], "A": [[...]], "B": [[...]], "d": [[...]]}
// where each outer array has either one inner entry (shared across nodes) or
// one per node.
CapacityExpansionData capex_from_json(const std::string& text);
CapacityExpansionData load_capex(const std::string& path);
std::string capex_to_json(const CapacityExpansionData& data);

// Revision time per resource, each in [1, stage_count].
using RevisionVector = std::vector<int>;

// Throws DimensionMismatch on wrong length, InvalidRange on out-of-range t*.
void validate_revisions(const RevisionVector& revisions, int resource_count,
                        int stage_count);

// Variable names shared by builders, solution readers, and reports. Node,
// stage, and condensed-node ids appear verbatim, e.g. x(0,5), x(1,s3),
// x(0,c12), y(2,7), r(0,3). The single-resource builders drop the resource
// index: x(5), x(s3), x(c12).
std::string ms_x_name(int i, int node);
std::string ts_x_name(int i, int t);
std::string fixed_x_name(int i, int cnode);
std::string y_name(int j, int node);
std::string r_name(int i, int t);

// Fully adaptive design: one x per (resource, node). Minimizes
// sum_n p_n (a_n'x_n + b_n'y_n). x integer, y continuous.
ModelInstance build_multistage(const ScenarioTree& tree,
                               const CapacityExpansionData& data);

// Static design: one x per (resource, stage), shared by every node of the
// stage; y stays per-node.
ModelInstance build_twostage(const ScenarioTree& tree,
                             const CapacityExpansionData& data);

// Design committed per stage before each resource's revision time and per
// revision-stage subtree afterwards. Implemented by variable unification on
// each resource's condensed tree, so the model stays as tight as the
// multistage one (no big-M rows).
ModelInstance build_adaptive_fixed(const ScenarioTree& tree,
                                   const CapacityExpansionData& data,
                                   const RevisionVector& revisions);

// Joint revision-time optimization: binary r(i,t) picks each resource's
// revision stage (sum_t r(i,t) = 1); deactivatable equalities tie x across
// stage siblings before the chosen stage and within revision subtrees
// afterwards. x_upper supplies the per-resource bound x̄ used both as a hard
// variable bound and as the deactivation constant, so it must dominate some
// optimal design. Throws InvalidConfig when x_upper is missing/non-positive
// and BadBigM when a node provably needs more cumulative capacity than
// stage_of(n) * x̄_i allows (checked with one small allocation LP per node).
ModelInstance build_adaptive_joint(const ScenarioTree& tree,
                                   const CapacityExpansionData& data,
                                   const std::vector<double>& x_upper);

// Per-resource bound valid for every optimal design: any objective-value
// upper bound W (e.g. the two-stage optimum) caps each x_in at
// W / min_n(p_n a_in) because every objective term is nonnegative. Throws
// InvalidConfig when some resource has min_n p_n a_in = 0 (no finite bound
// derivable from the objective).
std::vector<double> x_upper_from_objective_bound(const ScenarioTree& tree,
                                                 const CapacityExpansionData& data,
                                                 double objective_bound);

enum class PolicyShape { MultiStage, TwoStage, AdaptiveFixed };

// Single-resource cumulative-coverage form: integer x accumulates along the
// tree and must cover the per-node demand payload,
//   sum_{m in P(n)} x_m >= delta_n,
// with cost payload weighting the objective. MultiStage keeps one x per
// node, TwoStage one per stage, AdaptiveFixed one per condensed node of
// condense(tree, revision_time) with delta_hat cluster maxima on the rows.
// The AdaptiveFixed coverage matrix is an interval/laminar structure, so its
// LP relaxation has integral vertices whenever the condensed demands are
// integral.
ModelInstance build_single_resource(const ScenarioTree& tree,
                                    const std::string& cost_field,
                                    const std::string& demand_field,
                                    PolicyShape mode, int revision_time = 0);

// Reads the revision stage chosen for each resource from a joint-model
// solution: t*_i = sum_t t * r(i,t). Throws InvalidConfig when the solution
// carries no values or a once-row is violated.
RevisionVector revisions_from_solution(const ModelInstance& model,
                                       const Solution& solution,
                                       int resource_count, int stage_count);

}  // namespace ats
