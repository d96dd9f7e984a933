#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <queue>
#include <vector>

#include "ats/errors.hpp"
#include "ats/model.hpp"
#include "ats/simplex.hpp"

namespace ats {

namespace {

struct BranchNode {
  double key;    // sign-adjusted parent LP bound (lower bound for this node)
  long id;       // creation order, FIFO tie-break
  int parent;    // index into the node pool, -1 for root children
  int var;       // branched variable
  double lo, hi; // its bounds in this subtree (cumulative, not incremental)
};

struct NodeOrder {
  // Min-heap on (key, id): best bound first, earliest created on ties.
  bool operator()(const BranchNode& a, const BranchNode& b) const {
    if (a.key != b.key) return a.key > b.key;
    return a.id > b.id;
  }
};

double remaining_time(double limit, std::chrono::steady_clock::time_point start) {
  const std::chrono::duration<double> el = std::chrono::steady_clock::now() - start;
  return limit - el.count();
}

// Most fractional integral variable (fraction closest to 1/2), lowest index
// on ties; -1 when integral within tol. Fractional binaries take precedence
// over wider integers: they usually encode structural on/off choices whose
// resolution moves the bound most.
int pick_branch_var(const ModelInstance& model, const std::vector<double>& x, double tol) {
  int best = -1;
  double best_score = kInfinity;
  bool best_binary = false;
  for (int j = 0; j < model.variable_count(); ++j) {
    const Variable& v = model.variable(j);
    if (!v.integral) continue;
    const double frac = x[j] - std::floor(x[j]);
    if (std::min(frac, 1.0 - frac) <= tol) continue;
    const bool binary = v.lower >= 0.0 && v.upper <= 1.0;
    if (best_binary && !binary) continue;
    const double score = std::abs(frac - 0.5);
    if ((binary && !best_binary) || score < best_score) {
      best_score = score;
      best = j;
      best_binary = binary;
    }
  }
  return best;
}

void snap_integers(const ModelInstance& model, std::vector<double>& x) {
  for (int j = 0; j < model.variable_count(); ++j)
    if (model.variable(j).integral) x[j] = std::round(x[j]);
}

}  // namespace

Solution solve(const ModelInstance& model, const SolverConfig& config) {
  if (config.backend != "simplex")
    throw BackendUnavailable("unknown solver backend '" + config.backend + "'");
  const auto start = std::chrono::steady_clock::now();
  const double sgn = model.minimize() ? 1.0 : -1.0;

  Solution out;
  SimplexSolver solver(model);

  bool any_integral = false;
  for (int j = 0; j < model.variable_count(); ++j)
    if (model.variable(j).integral) { any_integral = true; break; }

  LpOptions lp_options;
  lp_options.time_limit_s = config.time_limit_s;
  const LpStatus root = solver.solve(lp_options);
  out.iterations = solver.iterations();
  out.nodes = 1;

  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  if (root != LpStatus::Optimal) {
    switch (root) {
      case LpStatus::Infeasible: out.status = SolveStatus::Infeasible; break;
      case LpStatus::Unbounded:  out.status = SolveStatus::Unbounded; break;
      case LpStatus::TimeLimit:  out.status = SolveStatus::TimeLimit; break;
      default: throw SolverFailure("simplex hit its iteration limit on '" + model.name + "'");
    }
    out.wall_time_s = elapsed();
    return out;
  }

  if (!any_integral) {
    out.status = SolveStatus::Optimal;
    out.objective = solver.objective();
    out.best_bound = solver.objective();
    out.rel_gap = 0.0;
    out.values = solver.solution();
    out.wall_time_s = elapsed();
    return out;
  }

  // Branch and bound, best-first. Node bounds are stored cumulatively, so
  // replaying the ancestor chain (deepest entry per variable wins) restores
  // the subproblem exactly; the simplex warm-starts from the last basis.
  std::vector<BranchNode> pool;
  std::priority_queue<BranchNode, std::vector<BranchNode>, NodeOrder> open;
  long next_id = 0;

  bool have_incumbent = false;
  double incumbent_key = kInfinity;  // sign-adjusted incumbent objective
  std::vector<double> incumbent_values;
  const double cutoff_key =
      std::isfinite(config.cutoff)
          ? sgn * config.cutoff + 1e-7 * std::max(1.0, std::abs(config.cutoff))
          : kInfinity;

  std::unique_ptr<SimplexSolver> heur_solver;
  long nodes_since_heuristic = 0;

  auto prune_key = [&] {
    const double improve =
        have_incumbent ? incumbent_key - 1e-9 * std::max(1.0, std::abs(incumbent_key)) : kInfinity;
    return std::min(improve, cutoff_key);
  };

  auto accept_incumbent = [&](double objective, const std::vector<double>& values) {
    const double key = sgn * objective;
    if (key >= std::min(incumbent_key, cutoff_key)) return;
    have_incumbent = true;
    incumbent_key = key;
    incumbent_values = values;
    snap_integers(model, incumbent_values);
  };

  // Fix every integral variable to the rounded relaxation value (clamped to
  // its model bounds) and solve the continuous rest.
  auto try_rounding = [&](const std::vector<double>& x) {
    if (!config.rounding_heuristic) return;
    if (!heur_solver) heur_solver = std::make_unique<SimplexSolver>(model);
    heur_solver->reset_bounds();
    for (int j = 0; j < model.variable_count(); ++j) {
      if (!model.variable(j).integral) continue;
      const Variable& v = model.variable(j);
      const double r = std::clamp(std::round(x[j]), v.lower, v.upper);
      heur_solver->set_bound(j, r, r);
    }
    LpOptions ho;
    ho.time_limit_s = remaining_time(config.time_limit_s, start);
    if (ho.time_limit_s <= 0.0) return;
    const LpStatus hs = heur_solver->solve(ho);
    if (hs == LpStatus::Optimal) accept_incumbent(heur_solver->objective(), heur_solver->solution());
  };

  // Fractional diving: repeatedly fix the most fractional integral variable
  // to its rounded value and re-solve, letting the LP repair the rest.
  // Reaches integral points that one-shot rounding misses when integral
  // variables are coupled through equality rows.
  auto try_diving = [&](const std::vector<double>& start_x) {
    if (!config.rounding_heuristic) return;
    if (!heur_solver) heur_solver = std::make_unique<SimplexSolver>(model);
    heur_solver->reset_bounds();
    std::vector<double> x = start_x;
    for (int step = 0; step < model.variable_count(); ++step) {
      const int j = pick_branch_var(model, x, config.integrality_tol);
      if (j < 0) return;  // already integral; the caller records such points
      const Variable& v = model.variable(j);
      const double r = std::clamp(std::round(x[j]), v.lower, v.upper);
      heur_solver->set_bound(j, r, r);
      LpOptions ho;
      ho.time_limit_s = remaining_time(config.time_limit_s, start);
      if (ho.time_limit_s <= 0.0) return;
      if (heur_solver->solve(ho) != LpStatus::Optimal) {
        // Repair once: the fix may have cut off all feasible completions
        // (e.g. rounding up against a path capacity); try the other side.
        const double alt = r > x[j] ? std::clamp(std::floor(x[j]), v.lower, v.upper)
                                    : std::clamp(std::ceil(x[j]), v.lower, v.upper);
        if (alt == r) return;
        heur_solver->set_bound(j, alt, alt);
        ho.time_limit_s = remaining_time(config.time_limit_s, start);
        if (ho.time_limit_s <= 0.0) return;
        if (heur_solver->solve(ho) != LpStatus::Optimal) return;
      }
      x = heur_solver->solution();
      if (pick_branch_var(model, x, config.integrality_tol) < 0) {
        accept_incumbent(heur_solver->objective(), x);
        return;
      }
    }
  };

  auto push_children = [&](double key, int parent, int var, double lo, double hi, double value) {
    const double down = std::floor(value);
    const double up = std::ceil(value);
    if (down >= lo)
      open.push({key, next_id++, parent, var, lo, down});
    if (up <= hi)
      open.push({key, next_id++, parent, var, up, hi});
  };

  // Starting point, if the caller supplied one.
  if (!config.start_values.empty()) {
    if (static_cast<int>(config.start_values.size()) != model.variable_count())
      throw InvalidConfig("start point has " + std::to_string(config.start_values.size()) +
                          " values for " + std::to_string(model.variable_count()) + " variables");
    std::vector<double> sv = config.start_values;
    double sv_obj = 0.0;
    for (int j = 0; j < model.variable_count(); ++j) {
      const Variable& v = model.variable(j);
      const double scale = std::max({1.0, std::abs(v.lower), std::abs(v.upper)});
      if (sv[j] < v.lower - 1e-9 * scale || sv[j] > v.upper + 1e-9 * scale)
        throw InvalidConfig("start point violates bounds of '" + v.name + "'");
      if (v.integral) {
        if (std::abs(sv[j] - std::round(sv[j])) > config.integrality_tol)
          throw InvalidConfig("start point leaves '" + v.name + "' fractional");
        sv[j] = std::round(sv[j]);
      }
      sv_obj += model.objective()[j] * sv[j];
    }
    for (int c = 0; c < model.constraint_count(); ++c) {
      const Constraint& row = model.constraint(c);
      double lhs = 0.0;
      double norm = 1.0;
      for (const LinearTerm& term : row.terms) {
        lhs += term.coeff * sv[term.var];
        norm = std::max(norm, std::abs(term.coeff * sv[term.var]));
      }
      const double resid = lhs - row.rhs;
      const double tol = 1e-6 * std::max(norm, std::abs(row.rhs));
      const bool ok = row.sense == Sense::LessEqual      ? resid <= tol
                      : row.sense == Sense::GreaterEqual ? resid >= -tol
                                                         : std::abs(resid) <= tol;
      if (!ok) throw InvalidConfig("start point violates row '" + row.name + "'");
    }
    accept_incumbent(sv_obj, sv);
  }

  // Root node.
  {
    const std::vector<double>& x = solver.solution();
    const int branch = pick_branch_var(model, x, config.integrality_tol);
    if (branch < 0) {
      // The relaxation optimum is integral: report it even when a cutoff
      // would have pruned it, since it is the true optimum of the model.
      out.status = SolveStatus::Optimal;
      out.objective = solver.objective();
      out.best_bound = out.objective;
      out.rel_gap = 0.0;
      out.values = solver.solution();
      snap_integers(model, out.values);
      out.wall_time_s = elapsed();
      return out;
    }
    try_rounding(x);
    if (!have_incumbent) try_diving(x);
    const Variable& v = model.variable(branch);
    push_children(sgn * solver.objective(), -1, branch, v.lower, v.upper, x[branch]);
  }

  double best_open_key = open.empty() ? incumbent_key : open.top().key;
  bool out_of_time = false;
  bool hit_node_limit = false;

  std::vector<int> chain;
  std::vector<bool> seen(model.variable_count());
  while (!open.empty()) {
    best_open_key = open.top().key;
    if (best_open_key >= prune_key()) break;  // nothing left can improve
    if (have_incumbent) {
      const double gap =
          (incumbent_key - best_open_key) / std::max(std::abs(incumbent_key), 1e-9);
      if (gap <= config.gap_tol) break;
    }
    if (remaining_time(config.time_limit_s, start) <= 0.0) { out_of_time = true; break; }
    if (config.node_limit >= 0 && out.nodes >= config.node_limit) { hit_node_limit = true; break; }

    BranchNode node = open.top();
    open.pop();
    pool.push_back(node);
    const int self = static_cast<int>(pool.size()) - 1;

    // Restore this subtree's bounds: walk to the root, deepest change per
    // variable wins (entries are cumulative).
    solver.reset_bounds();
    chain.clear();
    for (int i = self; i >= 0; i = pool[i].parent) chain.push_back(i);
    std::fill(seen.begin(), seen.end(), false);
    for (int i : chain) {
      const BranchNode& bn = pool[i];
      if (seen[bn.var]) continue;
      seen[bn.var] = true;
      solver.set_bound(bn.var, bn.lo, bn.hi);
    }

    LpOptions no;
    no.time_limit_s = remaining_time(config.time_limit_s, start);
    if (no.time_limit_s <= 0.0) { out_of_time = true; break; }
    const LpStatus st = solver.solve(no);
    ++out.nodes;
    if (st == LpStatus::Infeasible) continue;
    if (st == LpStatus::TimeLimit) { out_of_time = true; break; }
    if (st != LpStatus::Optimal)
      throw SolverFailure("branch-and-bound subproblem did not settle on '" + model.name + "'");

    const double node_key = sgn * solver.objective();
    if (node_key >= prune_key()) continue;

    const std::vector<double>& x = solver.solution();
    const int branch = pick_branch_var(model, x, config.integrality_tol);
    if (branch < 0) {
      accept_incumbent(solver.objective(), x);
      continue;
    }
    if (++nodes_since_heuristic >= 50) {
      nodes_since_heuristic = 0;
      try_rounding(x);
      if (!have_incumbent) try_diving(x);
    }
    // The child's cumulative pair starts from this node's effective bounds.
    double lo = model.variable(branch).lower;
    double hi = model.variable(branch).upper;
    for (int i : chain) {
      if (pool[i].var == branch) { lo = pool[i].lo; hi = pool[i].hi; break; }
    }
    push_children(node_key, self, branch, lo, hi, x[branch]);
  }

  out.iterations = solver.iterations() + (heur_solver ? heur_solver->iterations() : 0);
  out.wall_time_s = elapsed();

  double bound_key = open.empty() ? incumbent_key : std::min(best_open_key, incumbent_key);
  if (!have_incumbent) bound_key = open.empty() ? kInfinity : best_open_key;

  if (have_incumbent) {
    out.objective = sgn * incumbent_key;
    out.best_bound = sgn * bound_key;
    out.rel_gap = (incumbent_key - bound_key) / std::max(std::abs(incumbent_key), 1e-9);
    out.values = incumbent_values;
    if (out_of_time) out.status = SolveStatus::TimeLimit;
    else if (hit_node_limit) out.status = SolveStatus::Feasible;
    else out.status = SolveStatus::Optimal;
    return out;
  }

  if (out_of_time || hit_node_limit) {
    out.status = SolveStatus::TimeLimit;
  } else {
    // Search exhausted without an integral point: infeasible outright, or
    // every branch was cut off by config.cutoff.
    out.status = SolveStatus::Infeasible;
    if (std::isfinite(cutoff_key) && !open.empty()) out.best_bound = sgn * best_open_key;
  }
  return out;
}

}  // namespace ats
