#include "ats/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "ats/errors.hpp"

namespace ats {
namespace {

const char* kCsvFormat = "%.10g";

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), kCsvFormat, v);
  return buf;
}

}  // namespace

TreeStats compute_tree_stats(const ScenarioTree& tree, const std::string& a_field,
                             const std::string& delta_field) {
  const std::vector<double>& a = tree.payload(a_field);
  const std::vector<double>& delta = tree.payload(delta_field);
  TreeStats stats;
  stats.a_min = *std::min_element(a.begin(), a.end());
  stats.a_max = *std::max_element(a.begin(), a.end());
  stats.delta_max = *std::max_element(delta.begin(), delta.end());
  stats.delta_bar = 0.0;
  for (int leaf : tree.leaves()) {
    double path_max = -std::numeric_limits<double>::infinity();
    for (int m : tree.path_to_root(leaf)) path_max = std::max(path_max, delta[m]);
    stats.delta_bar += tree.probability(leaf) * path_max;
  }
  return stats;
}

RevisionStats compute_revision_stats(const ScenarioTree& tree, const std::string& a_field,
                                     const std::string& delta_field, int t) {
  if (t < 1 || t > tree.stage_count())
    throw InvalidRange("revision stats: t = " + std::to_string(t) + " outside [1, " +
                       std::to_string(tree.stage_count()) + "]");
  const std::vector<double>& a = tree.payload(a_field);
  const std::vector<double>& delta = tree.payload(delta_field);
  RevisionStats rev;
  rev.t = t;
  double a_min_before = std::numeric_limits<double>::infinity();
  double a_max_before = -std::numeric_limits<double>::infinity();
  double a_min_after = std::numeric_limits<double>::infinity();
  double a_max_after = -std::numeric_limits<double>::infinity();
  double delta_minus = -std::numeric_limits<double>::infinity();
  for (int n = 0; n < tree.size(); ++n) {
    if (tree.stage_of(n) < t) {
      a_min_before = std::min(a_min_before, a[n]);
      a_max_before = std::max(a_max_before, a[n]);
      delta_minus = std::max(delta_minus, delta[n]);
    } else {
      a_min_after = std::min(a_min_after, a[n]);
      a_max_after = std::max(a_max_after, a[n]);
    }
  }
  if (t == 1) {
    // Empty prefix: no demand can be observed before the revision, and the
    // cost split degenerates to the whole-tree range.
    delta_minus = 0.0;
    a_min_before = a_min_after;
    a_max_before = a_max_after;
  }
  rev.a_min_before = a_min_before;
  rev.a_max_before = a_max_before;
  rev.a_min_after = a_min_after;
  rev.a_max_after = a_max_after;
  rev.delta_minus = delta_minus;
  rev.delta_plus = 0.0;
  for (int n : tree.nodes_at_stage(t)) {
    double branch_max = t == 1 ? -std::numeric_limits<double>::infinity() : delta_minus;
    for (int m : tree.subtree(n)) branch_max = std::max(branch_max, delta[m]);
    rev.delta_plus += tree.probability(n) * branch_max;
  }
  return rev;
}

Interval gain_interval(const TreeStats& tree, const RevisionStats& rev) {
  Interval iv;
  iv.lo = tree.a_min * tree.delta_max - (rev.a_max_before - rev.a_max_after) * rev.delta_minus -
          rev.a_max_after * rev.delta_plus;
  iv.hi = tree.a_max * tree.delta_max - (rev.a_min_before - rev.a_min_after) * rev.delta_minus -
          rev.a_min_after * rev.delta_plus;
  return iv;
}

Interval loss_interval(const TreeStats& tree, const RevisionStats& rev) {
  Interval iv;
  iv.lo = (rev.a_min_before - rev.a_min_after) * rev.delta_minus +
          rev.a_min_after * rev.delta_plus - tree.a_max * tree.delta_bar;
  iv.hi = (rev.a_max_before - rev.a_max_after) * rev.delta_minus +
          rev.a_max_after * rev.delta_plus - tree.a_min * tree.delta_bar;
  return iv;
}

BoundsReport compute_bounds_report(const ScenarioTree& tree, const std::string& a_field,
                                   const std::string& delta_field) {
  BoundsReport report;
  report.tree = compute_tree_stats(tree, a_field, delta_field);
  const int T = tree.stage_count();
  report.per_t.reserve(T);
  report.gain_vs_twostage.reserve(T);
  report.loss_vs_multistage.reserve(T);
  for (int t = 1; t <= T; ++t) {
    report.per_t.push_back(compute_revision_stats(tree, a_field, delta_field, t));
    report.gain_vs_twostage.push_back(gain_interval(report.tree, report.per_t.back()));
    report.loss_vs_multistage.push_back(loss_interval(report.tree, report.per_t.back()));
  }
  return report;
}

std::string bounds_report_csv(const BoundsReport& report) {
  const int T = static_cast<int>(report.per_t.size());
  std::ostringstream out;
  out << "quantity";
  for (int t = 1; t <= T; ++t) out << ",t=" << t;
  out << "\n";
  auto row = [&](const char* label, auto value_at) {
    out << label;
    for (int t = 0; t < T; ++t) out << "," << fmt(value_at(t));
    out << "\n";
  };
  row("gain_vs_twostage_lo", [&](int t) { return report.gain_vs_twostage[t].lo; });
  row("gain_vs_twostage_hi", [&](int t) { return report.gain_vs_twostage[t].hi; });
  row("loss_vs_multistage_lo", [&](int t) { return report.loss_vs_multistage[t].lo; });
  row("loss_vs_multistage_hi", [&](int t) { return report.loss_vs_multistage[t].hi; });
  row("delta_plus", [&](int t) { return report.per_t[t].delta_plus; });
  return out.str();
}

int select_revision_by_demand(const ScenarioTree& tree, const std::string& delta_field) {
  const int T = tree.stage_count();
  if (T < 2) throw InvalidRange("revision selection needs at least two stages");
  // Cost values are irrelevant to delta_plus; reuse the demand field so the
  // payload lookup succeeds.
  int best_t = 2;
  double best = std::numeric_limits<double>::infinity();
  for (int t = 2; t <= T; ++t) {
    const double v = compute_revision_stats(tree, delta_field, delta_field, t).delta_plus;
    if (v < best - 1e-12) {
      best = v;
      best_t = t;
    }
  }
  return best_t;
}

int select_revision_by_cost(const ScenarioTree& tree, const std::string& a_field) {
  const int T = tree.stage_count();
  if (T < 2) throw InvalidRange("revision selection needs at least two stages");
  const std::vector<double>& a = tree.payload(a_field);
  int best_t = 2;
  double best = std::numeric_limits<double>::infinity();
  for (int t = 2; t <= T; ++t) {
    double before_max = -std::numeric_limits<double>::infinity();
    for (int n = 0; n < tree.size(); ++n)
      if (tree.stage_of(n) < t) before_max = std::max(before_max, a[n]);
    if (before_max < best - 1e-12) {
      best = before_max;
      best_t = t;
    }
  }
  return best_t;
}

ScenarioTree single_resource_view(const ScenarioTree& tree, const std::vector<double>& cost,
                                  const std::vector<double>& demand) {
  if (static_cast<int>(cost.size()) != tree.size() ||
      static_cast<int>(demand.size()) != tree.size())
    throw DimensionMismatch("single-resource view: cost/demand must have one value per node");
  std::vector<int> parents(tree.size());
  std::vector<double> probs(tree.size());
  for (int n = 0; n < tree.size(); ++n) {
    parents[n] = tree.parent(n);
    probs[n] = tree.probability(n);
  }
  return ScenarioTree(std::move(parents), std::move(probs),
                      {{"a", cost}, {"delta", demand}});
}

std::vector<std::vector<double>> implied_demands(const ScenarioTree& tree,
                                                 const CapacityExpansionData& data,
                                                 const ModelInstance& model,
                                                 const Solution& solution) {
  if (!solution.has_values())
    throw InvalidConfig("implied demands: solution carries no variable values");
  const int n_nodes = tree.size();
  const int I = data.resource_count, J = data.task_count;
  std::vector<double> y(static_cast<std::size_t>(J) * n_nodes);
  for (int j = 0; j < J; ++j)
    for (int n = 0; n < n_nodes; ++n) {
      const int id = model.find_variable(y_name(j, n));
      if (id < 0) throw InvalidConfig("implied demands: model lacks variable " + y_name(j, n));
      y[static_cast<std::size_t>(j) * n_nodes + n] = solution.value(id);
    }
  std::vector<std::vector<double>> delta(I, std::vector<double>(n_nodes, 0.0));
  for (int n = 0; n < n_nodes; ++n) {
    const auto& A = data.A_at(n);
    for (int i = 0; i < I; ++i) {
      double v = 0.0;
      for (int j = 0; j < J; ++j)
        v += A[static_cast<std::size_t>(i) * J + j] * y[static_cast<std::size_t>(j) * n_nodes + n];
      delta[i][n] = v;
    }
  }
  return delta;
}

double max_rounding_residual(const ScenarioTree& tree, const std::string& delta_field,
                             int revision_time) {
  const CondensedTree cond = condense(tree, revision_time, delta_field, delta_field);
  double residual = 0.0;
  for (int c = 0; c < cond.size(); ++c)
    residual = std::max(residual, std::ceil(cond.delta_hat[c]) - cond.delta_hat[c]);
  return residual;
}

double capex_gap_bounds(const ScenarioTree& tree, const CapacityExpansionData& data,
                        const RevisionVector& revisions, GapSide which) {
  data.validate(tree);
  validate_revisions(revisions, data.resource_count, tree.stage_count());
  const ModelInstance full = which == GapSide::VsTwoStage ? build_twostage(tree, data)
                                                          : build_multistage(tree, data);
  const Solution sol = solve(relax(full));
  if (sol.status != SolveStatus::Optimal)
    throw SolverFailure(std::string("gap bounds: relaxed capacity model finished ") +
                        to_string(sol.status));
  const std::vector<std::vector<double>> delta = implied_demands(tree, data, full, sol);

  auto lp_value = [](const ModelInstance& m) {
    const Solution s = solve(relax(m));
    if (s.status != SolveStatus::Optimal)
      throw SolverFailure(std::string("gap bounds: single-resource relaxation finished ") +
                          to_string(s.status));
    return s.objective;
  };

  double total = 0.0;
  for (int i = 0; i < data.resource_count; ++i) {
    std::vector<double> cost(tree.size());
    for (int n = 0; n < tree.size(); ++n) cost[n] = data.a_at(n)[i];
    const ScenarioTree view = single_resource_view(tree, cost, delta[i]);
    const double v_r =
        lp_value(build_single_resource(view, "a", "delta", PolicyShape::AdaptiveFixed, revisions[i]));
    const double residual = max_rounding_residual(view, "delta", revisions[i]);
    const double a_root = data.a_at(0)[i];
    if (which == GapSide::VsTwoStage) {
      const double v_t = lp_value(build_single_resource(view, "a", "delta", PolicyShape::TwoStage));
      total += v_t - v_r - residual * a_root;
    } else {
      const double v_m = lp_value(build_single_resource(view, "a", "delta", PolicyShape::MultiStage));
      total += v_r - v_m + residual * a_root;
    }
  }
  return total;
}

}  // namespace ats
