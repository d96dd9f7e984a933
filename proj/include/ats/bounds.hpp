#pragma once

#include <string>
#include <vector>

#include "ats/formulations.hpp"
#include "ats/model.hpp"
#include "ats/scenario_tree.hpp"

namespace ats {

// Whole-tree extrema of a single-resource cost/demand view.
struct TreeStats {
  double a_min = 0.0;      // smallest per-node cost
  double a_max = 0.0;      // largest per-node cost
  double delta_max = 0.0;  // largest per-node demand
  double delta_bar = 0.0;  // expected maximum demand along a scenario path
};

// The same extrema split at a candidate revision stage t, plus the demand
// aggregates that drive the analytic gap intervals. "before" covers stages
// strictly below t, "after" covers stages t..T. At t = 1 the before set is
// empty: delta_minus is 0 and the before extrema fall back to the whole-tree
// values so reports stay within [a_min, a_max].
struct RevisionStats {
  int t = 1;
  double a_min_before = 0.0;
  double a_min_after = 0.0;
  double a_max_before = 0.0;
  double a_max_after = 0.0;
  double delta_minus = 0.0;  // max demand before stage t
  double delta_plus = 0.0;   // sum over n in S_t of p_n * max demand over prefix + subtree(n)
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Bounds the optimality gaps of a fixed-revision single-resource design
// against the static and fully adaptive designs, for every candidate t.
struct BoundsReport {
  TreeStats tree;
  std::vector<RevisionStats> per_t;          // index t-1 for t = 1..T
  std::vector<Interval> gain_vs_twostage;    // contains v^T - v^R(t)
  std::vector<Interval> loss_vs_multistage;  // contains v^R(t) - v^M
};

TreeStats compute_tree_stats(const ScenarioTree& tree, const std::string& a_field,
                             const std::string& delta_field);

RevisionStats compute_revision_stats(const ScenarioTree& tree, const std::string& a_field,
                                     const std::string& delta_field, int t);

// Analytic interval guaranteed to contain v^T - v^R(t): the objective gap
// between the static and the fixed-revision LP designs of the
// single-resource problem.
Interval gain_interval(const TreeStats& tree, const RevisionStats& rev);
// Likewise for v^R(t) - v^M against the fully adaptive design.
Interval loss_interval(const TreeStats& tree, const RevisionStats& rev);

BoundsReport compute_bounds_report(const ScenarioTree& tree, const std::string& a_field,
                                   const std::string& delta_field);

// CSV layout: one labeled row per quantity (gain lo/hi, loss lo/hi,
// delta_plus), one column per revision time.
std::string bounds_report_csv(const BoundsReport& report);

// Revision stage minimizing delta_plus over 2..T (smallest minimizer).
// Favors instances whose variability, not cost drift, decides the revision.
int select_revision_by_demand(const ScenarioTree& tree, const std::string& delta_field);

// Revision stage minimizing the maximum cost observed before the revision,
// over 2..T (smallest minimizer).
int select_revision_by_cost(const ScenarioTree& tree, const std::string& a_field);

// Copy of the tree structure carrying exactly two payloads, "a" (cost) and
// "delta" (demand), for feeding per-resource vectors into the single-resource
// machinery.
ScenarioTree single_resource_view(const ScenarioTree& tree, const std::vector<double>& cost,
                                  const std::vector<double>& demand);

// Per-resource demand implied by the allocation decisions of a solved
// capacity model: delta[i][n] = [A_n y_n]_i. The model must carry the y(j,n)
// variables; throws InvalidConfig otherwise.
std::vector<std::vector<double>> implied_demands(const ScenarioTree& tree,
                                                 const CapacityExpansionData& data,
                                                 const ModelInstance& model,
                                                 const Solution& solution);

// Largest fractional-rounding residual ceil(d) - d over the condensed
// cluster maxima of the demand field at the given revision time.
double max_rounding_residual(const ScenarioTree& tree, const std::string& delta_field,
                             int revision_time);

enum class GapSide { VsTwoStage, VsMultiStage };

// Certified gap estimate for a multi-resource fixed-revision design, from
// LP relaxations only. VsTwoStage returns a lower bound on
// V^TS - V^ATS(revisions); VsMultiStage returns an upper bound on
// V^ATS(revisions) - V^MS. Per resource the estimate combines the implied
// single-resource LP values with a rounding penalty at the root acquisition
// cost.
double capex_gap_bounds(const ScenarioTree& tree, const CapacityExpansionData& data,
                        const RevisionVector& revisions, GapSide which);

}  // namespace ats
