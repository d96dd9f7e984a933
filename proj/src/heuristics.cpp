#include "ats/heuristics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "ats/bounds.hpp"
#include "ats/errors.hpp"

namespace ats {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void require_values(const Solution& sol, const char* what) {
  if (sol.has_values() && (sol.status == SolveStatus::Optimal ||
                           sol.status == SolveStatus::Feasible ||
                           sol.status == SolveStatus::TimeLimit))
    return;
  throw SolverFailure(std::string(what) + " finished " + to_string(sol.status) +
                      (sol.has_values() ? "" : " without a feasible point"));
}

double percent_gap(double objective, double lower) {
  const double diff = objective - lower;
  if (objective <= 0.0 || diff <= 0.0) return 0.0;
  return 100.0 * diff / objective;
}

void check_hooks(const MethodHooks& hooks) {
  if (hooks.resource_count <= 0 || !hooks.multistage || !hooks.twostage || !hooks.fixed ||
      !hooks.joint || !hooks.joint_bounds || !hooks.implied || !hooks.unit_costs)
    throw InvalidConfig("method hooks incomplete");
}

// Sum over resources of the rounding-residual certificate at the chosen
// revision times, priced at the root acquisition cost.
double rounding_certificate(const ScenarioTree& tree, const MethodHooks& hooks,
                            const std::vector<std::vector<double>>& delta,
                            const RevisionVector& revisions) {
  double total = 0.0;
  for (int i = 0; i < hooks.resource_count; ++i) {
    const std::vector<double> cost = hooks.unit_costs(i);
    const ScenarioTree view = single_resource_view(tree, cost, delta[i]);
    total += max_rounding_residual(view, "delta", revisions[i]) * cost[0];
  }
  return total;
}

// Caps and cutoff for the joint model; solves the two-stage model first when
// the caps can only be derived from an incumbent objective.
SolverConfig scrub_start(SolverConfig config) {
  config.start_values.clear();
  return config;
}

struct JointSetup {
  std::vector<double> x_upper;
  SolverConfig config;
};

JointSetup prepare_joint(const MethodHooks& hooks, const SolverConfig& config, const char* what) {
  JointSetup setup;
  setup.config = config;
  if (!hooks.bounds_need_incumbent) {
    setup.x_upper = hooks.joint_bounds(std::numeric_limits<double>::quiet_NaN());
    return setup;
  }
  const Solution ts = solve(hooks.twostage(), scrub_start(config));
  require_values(ts, what);
  setup.x_upper = hooks.joint_bounds(ts.objective);
  setup.config.cutoff = std::min(config.cutoff, ts.objective);
  return setup;
}

void pin_joint_bounds(MethodHooks& hooks, std::vector<double> x_upper) {
  hooks.joint_bounds = [xu = std::move(x_upper)](double) { return xu; };
  hooks.bounds_need_incumbent = false;
}

}  // namespace

MethodHooks capacity_hooks(const ScenarioTree& tree, const CapacityExpansionData& data) {
  MethodHooks hooks;
  hooks.resource_count = data.resource_count;
  hooks.multistage = [&tree, &data] { return build_multistage(tree, data); };
  hooks.twostage = [&tree, &data] { return build_twostage(tree, data); };
  hooks.fixed = [&tree, &data](const RevisionVector& revisions) {
    return build_adaptive_fixed(tree, data, revisions);
  };
  hooks.joint = [&tree, &data](const std::vector<double>& x_upper) {
    return build_adaptive_joint(tree, data, x_upper);
  };
  hooks.joint_bounds = [&tree, &data](double incumbent) {
    return x_upper_from_objective_bound(tree, data, incumbent);
  };
  hooks.bounds_need_incumbent = true;
  hooks.implied = [&tree, &data](const ModelInstance& model, const Solution& solution) {
    return implied_demands(tree, data, model, solution);
  };
  hooks.unit_costs = [&tree, &data](int i) {
    std::vector<double> cost(tree.size());
    for (int n = 0; n < tree.size(); ++n) cost[n] = data.a_at(n)[i];
    return cost;
  };
  return hooks;
}

HeuristicResult ts_relax_with(const ScenarioTree& tree, const MethodHooks& hooks,
                              const SolverConfig& config) {
  check_hooks(hooks);
  const auto t0 = Clock::now();
  const ModelInstance ts_model = hooks.twostage();
  const Solution lp = solve(relax(ts_model), config);
  if (lp.status != SolveStatus::Optimal)
    throw SolverFailure(std::string("ts_relax: two-stage relaxation finished ") +
                        to_string(lp.status));
  const std::vector<std::vector<double>> delta = hooks.implied(ts_model, lp);
  const int T = tree.stage_count();
  RevisionVector revisions(hooks.resource_count, 1);
  for (int i = 0; i < hooks.resource_count; ++i) {
    if (T < 2) continue;
    const std::vector<double> cost = hooks.unit_costs(i);
    const ScenarioTree view = single_resource_view(tree, cost, delta[i]);
    const BoundsReport report = compute_bounds_report(view, "a", "delta");
    int best_t = 2;
    double best = -std::numeric_limits<double>::infinity();
    for (int t = 2; t <= T; ++t) {
      const double score =
          report.gain_vs_twostage[t - 1].lo - max_rounding_residual(view, "delta", t) * cost[0];
      if (score > best + 1e-12) {
        best = score;
        best_t = t;
      }
    }
    revisions[i] = best_t;
  }
  const Solution fixed = solve(hooks.fixed(revisions), scrub_start(config));
  require_values(fixed, "ts_relax: fixed-revision solve");
  HeuristicResult res;
  res.revisions = revisions;
  res.objective = fixed.objective;
  res.status = fixed.status;
  res.wall_time_s = seconds_since(t0);
  return res;
}

HeuristicResult ms_relax_with(const ScenarioTree& tree, const MethodHooks& hooks,
                              const SolverConfig& config) {
  check_hooks(hooks);
  const auto t0 = Clock::now();
  const ModelInstance ms_model = hooks.multistage();
  const Solution lp = solve(relax(ms_model), config);
  if (lp.status != SolveStatus::Optimal)
    throw SolverFailure(std::string("ms_relax: multistage relaxation finished ") +
                        to_string(lp.status));
  const std::vector<std::vector<double>> delta = hooks.implied(ms_model, lp);
  const int T = tree.stage_count();
  RevisionVector revisions(hooks.resource_count, 1);
  for (int i = 0; i < hooks.resource_count; ++i) {
    if (T < 2) continue;
    const std::vector<double> cost = hooks.unit_costs(i);
    const ScenarioTree view = single_resource_view(tree, cost, delta[i]);
    const BoundsReport report = compute_bounds_report(view, "a", "delta");
    int best_t = 2;
    double best = std::numeric_limits<double>::infinity();
    for (int t = 2; t <= T; ++t) {
      const double score =
          report.loss_vs_multistage[t - 1].hi + max_rounding_residual(view, "delta", t) * cost[0];
      if (score < best - 1e-12) {
        best = score;
        best_t = t;
      }
    }
    revisions[i] = best_t;
  }
  const Solution fixed = solve(hooks.fixed(revisions), scrub_start(config));
  require_values(fixed, "ms_relax: fixed-revision solve");
  HeuristicResult res;
  res.revisions = revisions;
  res.objective = fixed.objective;
  res.status = fixed.status;
  res.lower_bound = lp.objective;
  res.gap_percent = percent_gap(res.objective, lp.objective);
  res.wall_time_s = seconds_since(t0);
  return res;
}

HeuristicResult ats_relax_with(const ScenarioTree& tree, const MethodHooks& hooks,
                               const SolverConfig& config, bool relax_revision_binaries) {
  check_hooks(hooks);
  const auto t0 = Clock::now();
  const JointSetup setup = prepare_joint(hooks, config, "ats_relax: two-stage solve");
  ModelInstance joint = hooks.joint(setup.x_upper);
  for (int v = 0; v < joint.variable_count(); ++v) {
    Variable& var = joint.variable(v);
    if (!var.name.empty() &&
        (var.name[0] == 'x' || (relax_revision_binaries && var.name[0] == 'r')))
      var.integral = false;
  }
  const Solution rel = solve(joint, setup.config);
  require_values(rel, "ats_relax: joint relaxation");
  const RevisionVector revisions =
      revisions_from_solution(joint, rel, hooks.resource_count, tree.stage_count());
  const std::vector<std::vector<double>> delta = hooks.implied(joint, rel);
  const Solution fixed = solve(hooks.fixed(revisions), scrub_start(config));
  require_values(fixed, "ats_relax: fixed-revision solve");
  HeuristicResult res;
  res.revisions = revisions;
  res.objective = fixed.objective;
  res.status = fixed.status;
  const double lb = rel.status == SolveStatus::Optimal ? rel.objective : rel.best_bound;
  if (std::isfinite(lb)) {
    res.lower_bound = lb;
    res.gap_percent = percent_gap(res.objective, lb);
  }
  res.guarantee = rounding_certificate(tree, hooks, delta, revisions);
  res.wall_time_s = seconds_since(t0);
  return res;
}

HeuristicResult exact_ats_with(const ScenarioTree& tree, const MethodHooks& hooks,
                               const SolverConfig& config) {
  check_hooks(hooks);
  const auto t0 = Clock::now();
  const JointSetup setup = prepare_joint(hooks, config, "exact joint solve: two-stage warmup");
  const ModelInstance joint = hooks.joint(setup.x_upper);
  const Solution sol = solve(joint, setup.config);
  require_values(sol, "exact joint solve");
  HeuristicResult res;
  res.revisions = revisions_from_solution(joint, sol, hooks.resource_count, tree.stage_count());
  res.objective = sol.objective;
  res.status = sol.status;
  if (std::isfinite(sol.best_bound)) {
    res.lower_bound = sol.best_bound;
    res.gap_percent = percent_gap(sol.objective, sol.best_bound);
  }
  res.wall_time_s = seconds_since(t0);
  return res;
}

HeuristicResult ts_relax(const ScenarioTree& tree, const CapacityExpansionData& data,
                         const SolverConfig& config) {
  return ts_relax_with(tree, capacity_hooks(tree, data), config);
}

HeuristicResult ms_relax(const ScenarioTree& tree, const CapacityExpansionData& data,
                         const SolverConfig& config) {
  return ms_relax_with(tree, capacity_hooks(tree, data), config);
}

HeuristicResult ats_relax(const ScenarioTree& tree, const CapacityExpansionData& data,
                          const SolverConfig& config, const std::vector<double>& x_upper,
                          bool relax_revision_binaries) {
  MethodHooks hooks = capacity_hooks(tree, data);
  if (!x_upper.empty()) pin_joint_bounds(hooks, x_upper);
  return ats_relax_with(tree, hooks, config, relax_revision_binaries);
}

HeuristicResult exact_ats(const ScenarioTree& tree, const CapacityExpansionData& data,
                          const SolverConfig& config, const std::vector<double>& x_upper) {
  MethodHooks hooks = capacity_hooks(tree, data);
  if (!x_upper.empty()) pin_joint_bounds(hooks, x_upper);
  return exact_ats_with(tree, hooks, config);
}

namespace {

// Maps a fixed-revision design onto the joint model's variables: condensed
// acquisitions expand to the nodes they cover, the chosen revision stage sets
// the matching binary, and every other variable carries over by name. The
// mapped point satisfies the joint rows with the same objective, so it serves
// as a starting incumbent. Returns empty when the point does not fit the
// joint variable bounds (possible when those bounds were derived from an
// objective cutoff rather than from structure).
std::vector<double> lift_fixed_design(const ScenarioTree& tree, const ModelInstance& joint,
                                      const ModelInstance& fixed_model, const Solution& fixed_sol,
                                      const RevisionVector& revisions) {
  std::vector<CondensedTree> cond;
  cond.reserve(revisions.size());
  for (int t : revisions) cond.push_back(condense_structure(tree, t));
  std::vector<double> values(joint.variable_count());
  for (int j = 0; j < joint.variable_count(); ++j) {
    const Variable& var = joint.variable(j);
    int i = -1, k = -1;
    if (std::sscanf(var.name.c_str(), "r(%d,%d)", &i, &k) == 2) {
      values[j] = revisions.at(i) == k ? 1.0 : 0.0;
      continue;
    }
    if (std::sscanf(var.name.c_str(), "x(%d,%d)", &i, &k) == 2) {
      const int fx = fixed_model.find_variable(fixed_x_name(i, cond.at(i).cover[k]));
      if (fx < 0)
        throw SolverFailure("lift: fixed design lacks '" + fixed_x_name(i, cond[i].cover[k]) + "'");
      values[j] = fixed_sol.value(fx);
    } else {
      const int fj = fixed_model.find_variable(var.name);
      if (fj < 0) throw SolverFailure("lift: fixed design lacks '" + var.name + "'");
      values[j] = fixed_sol.value(fj);
    }
    if (values[j] < var.lower - 1e-9 || values[j] > var.upper + 1e-9) return {};
  }
  return values;
}

// Best heuristic design lifted into a joint starting point; empty when the
// lift does not fit the joint bounds.
std::vector<double> seed_from_revisions(const ScenarioTree& tree, const MethodHooks& hooks,
                                        const ModelInstance& joint, const RevisionVector& revisions,
                                        const SolverConfig& config) {
  const ModelInstance fixed_model = hooks.fixed(revisions);
  const Solution fixed_sol = solve(fixed_model, scrub_start(config));
  if (!fixed_sol.has_values()) return {};
  return lift_fixed_design(tree, joint, fixed_model, fixed_sol, revisions);
}

}  // namespace

GainLossTable gain_loss_table_with(const ScenarioTree& tree, const MethodHooks& hooks,
                                   const SolverConfig& config) {
  check_hooks(hooks);
  GainLossTable table;
  const auto t_ms = Clock::now();
  const Solution ms = solve(hooks.multistage(), scrub_start(config));
  require_values(ms, "gain/loss table: multistage solve");
  const double ms_seconds = seconds_since(t_ms);
  const auto t_ts = Clock::now();
  const Solution ts = solve(hooks.twostage(), scrub_start(config));
  require_values(ts, "gain/loss table: two-stage solve");
  const double ts_seconds = seconds_since(t_ts);
  table.v_ms = ms.objective;
  table.v_ts = ts.objective;

  MethodHooks pinned = hooks;
  const std::vector<double> x_upper = hooks.joint_bounds(ts.objective);
  pin_joint_bounds(pinned, x_upper);
  SolverConfig joint_config = config;
  joint_config.cutoff = std::min(config.cutoff, ts.objective);

  const HeuristicResult tsr = ts_relax_with(tree, hooks, scrub_start(config));
  const HeuristicResult msr = ms_relax_with(tree, hooks, scrub_start(config));

  // Seed the joint solves with the best fixed design seen so far. A lifted
  // design is a valid incumbent, so even time-limited joint solves report a
  // design no worse than the heuristics that preceded them.
  const ModelInstance joint = pinned.joint(x_upper);
  SolverConfig atsr_config = joint_config;
  atsr_config.start_values = seed_from_revisions(
      tree, pinned, joint, tsr.objective <= msr.objective ? tsr.revisions : msr.revisions, config);
  const HeuristicResult atsr = ats_relax_with(tree, pinned, atsr_config);

  const HeuristicResult* best = &tsr;
  if (msr.objective < best->objective) best = &msr;
  if (atsr.objective < best->objective) best = &atsr;
  SolverConfig exact_config = joint_config;
  exact_config.start_values = seed_from_revisions(tree, pinned, joint, best->revisions, config);
  const HeuristicResult ats = exact_ats_with(tree, pinned, exact_config);
  table.ats_revisions = ats.revisions;

  auto gain = [&](double v) {
    return table.v_ts > 0.0 ? 100.0 * (table.v_ts - v) / table.v_ts : 0.0;
  };
  auto loss = [&](double v) {
    return table.v_ms > 0.0 ? 100.0 * (v - table.v_ms) / table.v_ms : 0.0;
  };
  auto limited = [](SolveStatus s) {
    return s == SolveStatus::TimeLimit || s == SolveStatus::Feasible;
  };
  auto add = [&](const std::string& name, double objective, bool with_gain, bool with_loss,
                 std::optional<double> gap, bool time_limited, double seconds) {
    MethodRow row;
    row.method = name;
    row.objective = objective;
    if (with_gain) row.gain_percent = gain(objective);
    if (with_loss) row.loss_percent = loss(objective);
    row.gap_percent = gap;
    row.time_limited = time_limited;
    row.wall_time_s = seconds;
    table.rows.push_back(std::move(row));
  };
  add("MS", ms.objective, true, false, std::nullopt, limited(ms.status), ms_seconds);
  add("ATS", ats.objective, true, true, ats.gap_percent, limited(ats.status), ats.wall_time_s);
  add("TS-Relax", tsr.objective, true, true, std::nullopt, limited(tsr.status), tsr.wall_time_s);
  add("MS-Relax", msr.objective, true, true, msr.gap_percent, limited(msr.status), msr.wall_time_s);
  add("ATS-Relax", atsr.objective, true, true, atsr.gap_percent, limited(atsr.status),
      atsr.wall_time_s);
  add("TS", ts.objective, false, true, std::nullopt, limited(ts.status), ts_seconds);

  if (limited(ats.status)) {
    table.rvats_percent = table.v_ts > 0.0 ? 100.0 * (table.v_ts - tsr.objective) / table.v_ts : 0.0;
    table.rvats_is_lower_bound = true;
  } else {
    table.rvats_percent = table.v_ts > 0.0 ? 100.0 * (table.v_ts - ats.objective) / table.v_ts : 0.0;
    table.rvats_is_lower_bound = false;
  }
  return table;
}

GainLossTable gain_loss_table(const ScenarioTree& tree, const CapacityExpansionData& data,
                              const SolverConfig& config) {
  return gain_loss_table_with(tree, capacity_hooks(tree, data), config);
}

namespace {

std::string fmt10(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

const MethodRow& row_of(const GainLossTable& table, const char* method) {
  for (const MethodRow& row : table.rows)
    if (row.method == method) return row;
  throw InvalidConfig(std::string("gain/loss table lacks method row ") + method);
}

std::string cell(const MethodRow& row, const std::optional<double>& v) {
  if (row.time_limited || !v.has_value()) return "-";
  return fmt10(*v);
}

}  // namespace

std::string gain_loss_csv(const GainLossTable& table) {
  const MethodRow& ms = row_of(table, "MS");
  const MethodRow& ats = row_of(table, "ATS");
  const MethodRow& tsr = row_of(table, "TS-Relax");
  const MethodRow& msr = row_of(table, "MS-Relax");
  const MethodRow& atsr = row_of(table, "ATS-Relax");
  const MethodRow& ts = row_of(table, "TS");
  std::ostringstream out;
  out << "ms_gain,ats_gain,ats_loss,tsrelax_gain,tsrelax_loss,msrelax_gain,msrelax_loss,"
         "msrelax_gap,atsrelax_gain,atsrelax_loss,atsrelax_gap,ts_loss,rvats,rvats_kind\n";
  out << cell(ms, ms.gain_percent) << "," << cell(ats, ats.gain_percent) << ","
      << cell(ats, ats.loss_percent) << "," << cell(tsr, tsr.gain_percent) << ","
      << cell(tsr, tsr.loss_percent) << "," << cell(msr, msr.gain_percent) << ","
      << cell(msr, msr.loss_percent) << "," << cell(msr, msr.gap_percent) << ","
      << cell(atsr, atsr.gain_percent) << "," << cell(atsr, atsr.loss_percent) << ","
      << cell(atsr, atsr.gap_percent) << "," << cell(ts, ts.loss_percent) << ","
      << fmt10(table.rvats_percent) << ","
      << (table.rvats_is_lower_bound ? "lower_bound" : "exact") << "\n";
  return out.str();
}

std::string gain_loss_json(const GainLossTable& table) {
  nlohmann::json j;
  j["v_ms"] = table.v_ms;
  j["v_ts"] = table.v_ts;
  j["rvats_percent"] = table.rvats_percent;
  j["rvats_is_lower_bound"] = table.rvats_is_lower_bound;
  j["rows"] = nlohmann::json::array();
  for (const MethodRow& row : table.rows) {
    nlohmann::json r;
    r["method"] = row.method;
    r["objective"] = row.objective;
    r["gain_percent"] = row.gain_percent ? nlohmann::json(*row.gain_percent) : nlohmann::json();
    r["loss_percent"] = row.loss_percent ? nlohmann::json(*row.loss_percent) : nlohmann::json();
    r["gap_percent"] = row.gap_percent ? nlohmann::json(*row.gap_percent) : nlohmann::json();
    r["time_limited"] = row.time_limited;
    r["wall_time_s"] = row.wall_time_s;
    j["rows"].push_back(std::move(r));
  }
  return j.dump(2);
}

}  // namespace ats
