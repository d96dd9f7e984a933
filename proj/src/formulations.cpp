#include "ats/formulations.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "ats/errors.hpp"

namespace ats {

void CapacityExpansionData::validate(const ScenarioTree& tree) const {
  if (resource_count <= 0 || task_count <= 0 || item_count <= 0)
    throw InvalidConfig("capacity data: resource/task/item counts must be positive");
  const std::size_t n_nodes = static_cast<std::size_t>(tree.size());
  auto check = [&](const std::vector<std::vector<double>>& field, const char* name,
                   std::size_t entry_size, bool is_cost) {
    if (field.size() != 1 && field.size() != n_nodes)
      throw DimensionMismatch(std::string("capacity data: field '") + name +
                              "' must hold one shared entry or one entry per node");
    for (const auto& entry : field) {
      if (entry.size() != entry_size)
        throw DimensionMismatch(std::string("capacity data: entry of field '") + name +
                                "' has size " + std::to_string(entry.size()) + ", expected " +
                                std::to_string(entry_size));
      for (double v : entry) {
        if (!std::isfinite(v))
          throw InvalidConfig(std::string("capacity data: non-finite value in field '") + name + "'");
        if (is_cost && v < 0.0)
          throw InvalidConfig(std::string("capacity data: negative cost in field '") + name + "'");
      }
    }
  };
  check(a, "a", static_cast<std::size_t>(resource_count), true);
  check(b, "b", static_cast<std::size_t>(task_count), true);
  check(A, "A", static_cast<std::size_t>(resource_count) * task_count, false);
  check(B, "B", static_cast<std::size_t>(item_count) * task_count, false);
  check(d, "d", static_cast<std::size_t>(item_count), false);
}

CapacityExpansionData capex_from_json(const std::string& text) {
  try {
    nlohmann::json j = nlohmann::json::parse(text);
    CapacityExpansionData data;
    data.resource_count = j.at("resources").get<int>();
    data.task_count = j.at("tasks").get<int>();
    data.item_count = j.at("items").get<int>();
    data.a = j.at("a").get<std::vector<std::vector<double>>>();
    data.b = j.at("b").get<std::vector<std::vector<double>>>();
    data.A = j.at("A").get<std::vector<std::vector<double>>>();
    data.B = j.at("B").get<std::vector<std::vector<double>>>();
    data.d = j.at("d").get<std::vector<std::vector<double>>>();
    return data;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("capacity data JSON: ") + e.what());
  }
}

CapacityExpansionData load_capex(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open capacity data file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return capex_from_json(buf.str());
}

std::string capex_to_json(const CapacityExpansionData& data) {
  nlohmann::json j;
  j["resources"] = data.resource_count;
  j["tasks"] = data.task_count;
  j["items"] = data.item_count;
  j["a"] = data.a;
  j["b"] = data.b;
  j["A"] = data.A;
  j["B"] = data.B;
  j["d"] = data.d;
  return j.dump(2);
}

void validate_revisions(const RevisionVector& revisions, int resource_count, int stage_count) {
  if (static_cast<int>(revisions.size()) != resource_count)
    throw DimensionMismatch("revision vector: expected one revision time per resource");
  for (int t : revisions)
    if (t < 1 || t > stage_count)
      throw InvalidRange("revision time " + std::to_string(t) + " outside [1, " +
                         std::to_string(stage_count) + "]");
}

std::string ms_x_name(int i, int node) {
  return "x(" + std::to_string(i) + "," + std::to_string(node) + ")";
}
std::string ts_x_name(int i, int t) {
  return "x(" + std::to_string(i) + ",s" + std::to_string(t) + ")";
}
std::string fixed_x_name(int i, int cnode) {
  return "x(" + std::to_string(i) + ",c" + std::to_string(cnode) + ")";
}
std::string y_name(int j, int node) {
  return "y(" + std::to_string(j) + "," + std::to_string(node) + ")";
}
std::string r_name(int i, int t) {
  return "r(" + std::to_string(i) + "," + std::to_string(t) + ")";
}

namespace {

// Adds per-node allocation variables y(j,n) with their objective weights and
// the demand rows dem(k,n). Returns ids indexed [j * size + n].
std::vector<int> add_allocation(ModelInstance& model, const ScenarioTree& tree,
                                const CapacityExpansionData& data) {
  const int n_nodes = tree.size();
  const int J = data.task_count, K = data.item_count;
  std::vector<int> y(static_cast<std::size_t>(J) * n_nodes);
  for (int j = 0; j < J; ++j)
    for (int n = 0; n < n_nodes; ++n) {
      const int id = model.add_variable(y_name(j, n), 0.0, kInfinity, false);
      y[static_cast<std::size_t>(j) * n_nodes + n] = id;
      model.set_objective_coeff(id, tree.probability(n) * data.b_at(n)[j]);
    }
  for (int n = 0; n < n_nodes; ++n) {
    const auto& B = data.B_at(n);
    const auto& d = data.d_at(n);
    for (int k = 0; k < K; ++k) {
      std::vector<LinearTerm> terms;
      for (int j = 0; j < J; ++j) {
        const double c = B[static_cast<std::size_t>(k) * J + j];
        if (c != 0.0) terms.push_back({y[static_cast<std::size_t>(j) * n_nodes + n], c});
      }
      model.add_constraint("dem(" + std::to_string(k) + "," + std::to_string(n) + ")",
                           std::move(terms), Sense::GreaterEqual, d[k]);
    }
  }
  return y;
}

// Capacity row for (resource i, node n): usage by y minus the covering x
// variables, <= 0. `x_terms` lists the x variable ids covering node n.
void add_capacity_row(ModelInstance& model, const ScenarioTree& tree,
                      const CapacityExpansionData& data, const std::vector<int>& y, int i,
                      int n, const std::vector<int>& x_terms) {
  const int n_nodes = tree.size();
  const int J = data.task_count;
  const auto& A = data.A_at(n);
  std::vector<LinearTerm> terms;
  for (int j = 0; j < J; ++j) {
    const double c = A[static_cast<std::size_t>(i) * J + j];
    if (c != 0.0) terms.push_back({y[static_cast<std::size_t>(j) * n_nodes + n], c});
  }
  for (int id : x_terms) terms.push_back({id, -1.0});
  model.add_constraint("cap(" + std::to_string(i) + "," + std::to_string(n) + ")",
                       std::move(terms), Sense::LessEqual, 0.0);
}

// Minimum cumulative capacity of resource i that node n can get away with:
// min [A_n y]_i over feasible allocations. Used to certify a supplied x̄.
// Returns -inf when the allocation LP is unbounded below (possible only with
// negative usage coefficients) and +nan when it is infeasible.
double min_required_capacity(const CapacityExpansionData& data, int n, int i) {
  const int J = data.task_count, K = data.item_count;
  ModelInstance lp;
  lp.name = "cap_check";
  const auto& A = data.A_at(n);
  const auto& B = data.B_at(n);
  const auto& d = data.d_at(n);
  for (int j = 0; j < J; ++j) {
    const int id = lp.add_variable("y" + std::to_string(j), 0.0, kInfinity, false);
    lp.set_objective_coeff(id, A[static_cast<std::size_t>(i) * J + j]);
  }
  for (int k = 0; k < K; ++k) {
    std::vector<LinearTerm> terms;
    for (int j = 0; j < J; ++j) {
      const double c = B[static_cast<std::size_t>(k) * J + j];
      if (c != 0.0) terms.push_back({j, c});
    }
    lp.add_constraint("d" + std::to_string(k), std::move(terms), Sense::GreaterEqual, d[k]);
  }
  const Solution sol = solve(lp);
  if (sol.status == SolveStatus::Optimal) return sol.objective;
  if (sol.status == SolveStatus::Unbounded) return -kInfinity;
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

ModelInstance build_multistage(const ScenarioTree& tree, const CapacityExpansionData& data) {
  data.validate(tree);
  ModelInstance model;
  model.name = "capex_multistage";
  const int n_nodes = tree.size();
  const int I = data.resource_count;
  std::vector<int> x(static_cast<std::size_t>(I) * n_nodes);
  for (int i = 0; i < I; ++i)
    for (int n = 0; n < n_nodes; ++n) {
      const int id = model.add_variable(ms_x_name(i, n), 0.0, kInfinity, true);
      x[static_cast<std::size_t>(i) * n_nodes + n] = id;
      model.set_objective_coeff(id, tree.probability(n) * data.a_at(n)[i]);
    }
  const std::vector<int> y = add_allocation(model, tree, data);
  for (int n = 0; n < n_nodes; ++n) {
    const std::vector<int> path = tree.path_to_root(n);
    for (int i = 0; i < I; ++i) {
      std::vector<int> cover;
      cover.reserve(path.size());
      for (int m : path) cover.push_back(x[static_cast<std::size_t>(i) * n_nodes + m]);
      add_capacity_row(model, tree, data, y, i, n, cover);
    }
  }
  return model;
}

ModelInstance build_twostage(const ScenarioTree& tree, const CapacityExpansionData& data) {
  data.validate(tree);
  ModelInstance model;
  model.name = "capex_twostage";
  const int I = data.resource_count;
  const int T = tree.stage_count();
  std::vector<int> x(static_cast<std::size_t>(I) * T);
  for (int i = 0; i < I; ++i)
    for (int t = 1; t <= T; ++t) {
      const int id = model.add_variable(ts_x_name(i, t), 0.0, kInfinity, true);
      x[static_cast<std::size_t>(i) * T + (t - 1)] = id;
      double coeff = 0.0;
      for (int n : tree.nodes_at_stage(t)) coeff += tree.probability(n) * data.a_at(n)[i];
      model.set_objective_coeff(id, coeff);
    }
  const std::vector<int> y = add_allocation(model, tree, data);
  for (int n = 0; n < tree.size(); ++n) {
    const int t_n = tree.stage_of(n);
    for (int i = 0; i < I; ++i) {
      std::vector<int> cover;
      cover.reserve(t_n);
      for (int t = 1; t <= t_n; ++t) cover.push_back(x[static_cast<std::size_t>(i) * T + (t - 1)]);
      add_capacity_row(model, tree, data, y, i, n, cover);
    }
  }
  return model;
}

ModelInstance build_adaptive_fixed(const ScenarioTree& tree, const CapacityExpansionData& data,
                                   const RevisionVector& revisions) {
  data.validate(tree);
  validate_revisions(revisions, data.resource_count, tree.stage_count());
  ModelInstance model;
  model.name = "capex_adaptive_fixed";
  const int n_nodes = tree.size();
  const int I = data.resource_count;
  std::vector<CondensedTree> cond;
  cond.reserve(I);
  for (int i = 0; i < I; ++i) cond.push_back(condense_structure(tree, revisions[i]));
  // x ids per resource, indexed by condensed node id.
  std::vector<std::vector<int>> x(I);
  for (int i = 0; i < I; ++i) {
    x[i].resize(cond[i].size());
    for (int c = 0; c < cond[i].size(); ++c) {
      const int id = model.add_variable(fixed_x_name(i, c), 0.0, kInfinity, true);
      x[i][c] = id;
      double coeff = 0.0;
      for (int m : cond[i].cluster[c]) coeff += tree.probability(m) * data.a_at(m)[i];
      model.set_objective_coeff(id, coeff);
    }
  }
  const std::vector<int> y = add_allocation(model, tree, data);
  for (int n = 0; n < n_nodes; ++n)
    for (int i = 0; i < I; ++i) {
      std::vector<int> cover;
      for (int c : cond[i].path_to_root(cond[i].cover[n])) cover.push_back(x[i][c]);
      add_capacity_row(model, tree, data, y, i, n, cover);
    }
  return model;
}

std::vector<double> x_upper_from_objective_bound(const ScenarioTree& tree,
                                                 const CapacityExpansionData& data,
                                                 double objective_bound) {
  data.validate(tree);
  if (!std::isfinite(objective_bound))
    throw InvalidConfig("x bound: objective bound must be finite");
  const double w = std::max(0.0, objective_bound);
  std::vector<double> upper(data.resource_count);
  for (int i = 0; i < data.resource_count; ++i) {
    double min_weight = kInfinity;
    for (int n = 0; n < tree.size(); ++n)
      min_weight = std::min(min_weight, tree.probability(n) * data.a_at(n)[i]);
    if (!(min_weight > 0.0))
      throw InvalidConfig("x bound: resource " + std::to_string(i) +
                          " has a zero probability-weighted acquisition cost; "
                          "supply x_upper explicitly");
    upper[i] = std::ceil(w / min_weight);
  }
  return upper;
}

ModelInstance build_adaptive_joint(const ScenarioTree& tree, const CapacityExpansionData& data,
                                   const std::vector<double>& x_upper) {
  data.validate(tree);
  const int n_nodes = tree.size();
  const int I = data.resource_count;
  const int T = tree.stage_count();
  if (static_cast<int>(x_upper.size()) != I)
    throw InvalidConfig("joint design: x_upper must supply one bound per resource");
  for (double v : x_upper)
    if (!std::isfinite(v) || v < 0.0)
      throw InvalidConfig("joint design: x_upper entries must be finite and nonnegative");
  // Certify the bounds: cumulative capacity at node n is at most
  // stage_of(n) * x̄_i, which must cover the smallest allocation-feasible
  // requirement at n; otherwise the bound cuts off every feasible design of
  // an otherwise feasible instance.
  for (int n = 0; n < n_nodes; ++n) {
    bool node_feasible = true;
    for (int i = 0; i < I && node_feasible; ++i) {
      const double need = min_required_capacity(data, n, i);
      if (std::isnan(need)) {
        node_feasible = false;  // instance infeasible regardless of bounds
        break;
      }
      const double avail = tree.stage_of(n) * x_upper[i];
      if (need > avail + 1e-7 * std::max(1.0, std::fabs(need)))
        throw BadBigM("joint design: x_upper[" + std::to_string(i) + "] = " +
                      std::to_string(x_upper[i]) + " cannot cover node " + std::to_string(n) +
                      " (needs " + std::to_string(need) + " cumulative capacity)");
    }
  }

  ModelInstance model;
  model.name = "capex_adaptive_joint";
  std::vector<int> x(static_cast<std::size_t>(I) * n_nodes);
  for (int i = 0; i < I; ++i)
    for (int n = 0; n < n_nodes; ++n) {
      const int id = model.add_variable(ms_x_name(i, n), 0.0, x_upper[i], true);
      x[static_cast<std::size_t>(i) * n_nodes + n] = id;
      model.set_objective_coeff(id, tree.probability(n) * data.a_at(n)[i]);
    }
  const std::vector<int> y = add_allocation(model, tree, data);
  std::vector<int> r(static_cast<std::size_t>(I) * T);
  for (int i = 0; i < I; ++i)
    for (int t = 1; t <= T; ++t)
      r[static_cast<std::size_t>(i) * T + (t - 1)] =
          model.add_variable(r_name(i, t), 0.0, 1.0, true);
  for (int n = 0; n < n_nodes; ++n) {
    const std::vector<int> path = tree.path_to_root(n);
    for (int i = 0; i < I; ++i) {
      std::vector<int> cover;
      cover.reserve(path.size());
      for (int m : path) cover.push_back(x[static_cast<std::size_t>(i) * n_nodes + m]);
      add_capacity_row(model, tree, data, y, i, n, cover);
    }
  }
  for (int i = 0; i < I; ++i) {
    std::vector<LinearTerm> terms;
    for (int t = 1; t <= T; ++t) terms.push_back({r[static_cast<std::size_t>(i) * T + (t - 1)], 1.0});
    model.add_constraint("once(" + std::to_string(i) + ")", std::move(terms), Sense::Equal, 1.0);
  }
  // Tie x across each stage while the revision is still ahead: active iff
  // sum of r over later stages is one.
  for (int i = 0; i < I; ++i) {
    const double xbar = x_upper[i];
    for (int t = 1; t < T; ++t) {
      const auto& stage = tree.nodes_at_stage(t);
      if (stage.size() < 2) continue;
      const int rep = x[static_cast<std::size_t>(i) * n_nodes + stage[0]];
      for (std::size_t s = 1; s < stage.size(); ++s) {
        const int other = x[static_cast<std::size_t>(i) * n_nodes + stage[s]];
        const std::string tag =
            std::to_string(i) + "," + std::to_string(t) + "," + std::to_string(stage[s]) + ")";
        std::vector<LinearTerm> lo{{rep, 1.0}, {other, -1.0}};
        std::vector<LinearTerm> hi{{rep, 1.0}, {other, -1.0}};
        for (int u = t + 1; u <= T; ++u) {
          const int rv = r[static_cast<std::size_t>(i) * T + (u - 1)];
          lo.push_back({rv, -xbar});
          hi.push_back({rv, xbar});
        }
        model.add_constraint("prelo(" + tag, std::move(lo), Sense::GreaterEqual, -xbar);
        model.add_constraint("prehi(" + tag, std::move(hi), Sense::LessEqual, xbar);
      }
    }
  }
  // Tie x across stage siblings inside each revision-stage subtree for the
  // rest of the horizon: active iff the revision lands exactly at stage t.
  for (int i = 0; i < I; ++i) {
    const double xbar = x_upper[i];
    for (int t = 1; t < T; ++t) {
      const int rv = r[static_cast<std::size_t>(i) * T + (t - 1)];
      for (int l : tree.nodes_at_stage(t)) {
        const std::vector<int> sub = tree.subtree(l);
        for (int u = t + 1; u <= T; ++u) {
          int rep = -1;
          for (int n : sub) {
            if (tree.stage_of(n) != u) continue;
            if (rep < 0) {
              rep = n;
              continue;
            }
            const int xm = x[static_cast<std::size_t>(i) * n_nodes + rep];
            const int xn = x[static_cast<std::size_t>(i) * n_nodes + n];
            const std::string tag =
                std::to_string(i) + "," + std::to_string(t) + "," + std::to_string(n) + ")";
            model.add_constraint("postlo(" + tag, {{xm, 1.0}, {xn, -1.0}, {rv, -xbar}},
                                 Sense::GreaterEqual, -xbar);
            model.add_constraint("posthi(" + tag, {{xm, 1.0}, {xn, -1.0}, {rv, xbar}},
                                 Sense::LessEqual, xbar);
          }
        }
      }
    }
  }
  return model;
}

ModelInstance build_single_resource(const ScenarioTree& tree, const std::string& cost_field,
                                    const std::string& demand_field, PolicyShape mode,
                                    int revision_time) {
  const std::vector<double>& cost = tree.payload(cost_field);
  const std::vector<double>& demand = tree.payload(demand_field);
  ModelInstance model;
  const int n_nodes = tree.size();
  const int T = tree.stage_count();
  switch (mode) {
    case PolicyShape::MultiStage: {
      model.name = "single_multistage";
      for (int n = 0; n < n_nodes; ++n) {
        const int id = model.add_variable("x(" + std::to_string(n) + ")", 0.0, kInfinity, true);
        model.set_objective_coeff(id, tree.probability(n) * cost[n]);
      }
      for (int n = 0; n < n_nodes; ++n) {
        std::vector<LinearTerm> terms;
        for (int m : tree.path_to_root(n)) terms.push_back({m, 1.0});
        model.add_constraint("cov(" + std::to_string(n) + ")", std::move(terms),
                             Sense::GreaterEqual, demand[n]);
      }
      break;
    }
    case PolicyShape::TwoStage: {
      model.name = "single_twostage";
      for (int t = 1; t <= T; ++t) {
        const int id = model.add_variable("x(s" + std::to_string(t) + ")", 0.0, kInfinity, true);
        double coeff = 0.0;
        for (int n : tree.nodes_at_stage(t)) coeff += tree.probability(n) * cost[n];
        model.set_objective_coeff(id, coeff);
      }
      for (int n = 0; n < n_nodes; ++n) {
        std::vector<LinearTerm> terms;
        for (int t = 1; t <= tree.stage_of(n); ++t) terms.push_back({t - 1, 1.0});
        model.add_constraint("cov(" + std::to_string(n) + ")", std::move(terms),
                             Sense::GreaterEqual, demand[n]);
      }
      break;
    }
    case PolicyShape::AdaptiveFixed: {
      model.name = "single_adaptive";
      const CondensedTree cond = condense(tree, revision_time, cost_field, demand_field);
      for (int c = 0; c < cond.size(); ++c) {
        const int id = model.add_variable("x(c" + std::to_string(c) + ")", 0.0, kInfinity, true);
        model.set_objective_coeff(id, cond.a_hat[c]);
      }
      for (int c = 0; c < cond.size(); ++c) {
        std::vector<LinearTerm> terms;
        for (int m : cond.path_to_root(c)) terms.push_back({m, 1.0});
        model.add_constraint("cov(c" + std::to_string(c) + ")", std::move(terms),
                             Sense::GreaterEqual, cond.delta_hat[c]);
      }
      break;
    }
  }
  return model;
}

RevisionVector revisions_from_solution(const ModelInstance& model, const Solution& solution,
                                       int resource_count, int stage_count) {
  if (!solution.has_values())
    throw InvalidConfig("revision extraction: solution carries no variable values");
  RevisionVector out(resource_count, 1);
  for (int i = 0; i < resource_count; ++i) {
    double total = 0.0, weighted = 0.0;
    for (int t = 1; t <= stage_count; ++t) {
      const int id = model.find_variable(r_name(i, t));
      if (id < 0)
        throw InvalidConfig("revision extraction: model lacks variable " + r_name(i, t));
      const double v = solution.value(id);
      total += v;
      weighted += t * v;
    }
    if (std::fabs(total - 1.0) > 1e-4)
      throw InvalidConfig("revision extraction: binaries of resource " + std::to_string(i) +
                          " sum to " + std::to_string(total));
    const int t_star = static_cast<int>(std::lround(weighted));
    out[i] = std::min(stage_count, std::max(1, t_star));
  }
  return out;
}

}  // namespace ats
