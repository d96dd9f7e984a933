#include "ats/experiments.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "ats/errors.hpp"
#include "ats/rng.hpp"
#include "ats/tree_gen.hpp"

namespace ats {

namespace {

const char* const kMethodNames[] = {"MS", "ATS", "TS-Relax", "MS-Relax", "ATS-Relax", "TS"};

bool known_method(const std::string& method) {
  for (const char* name : kMethodNames)
    if (method == name) return true;
  return false;
}

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

// CSV-safe error text: commas and newlines would break the row structure.
std::string sanitize(std::string text) {
  for (char& c : text) {
    if (c == ',') c = ';';
    if (c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

}  // namespace

std::vector<double> gamma_alpha_low(double gamma, int stage_count) {
  if (!std::isfinite(gamma) || gamma < 0.0)
    throw InvalidConfig("gamma must be finite and nonnegative");
  if (stage_count < 2) throw InvalidConfig("gamma envelopes need at least 2 stages");
  std::vector<double> alpha;
  alpha.reserve(stage_count - 1);
  for (int t = 2; t <= stage_count; ++t) {
    const double low = 1.00 - gamma * t;
    if (low <= 0.0)
      throw InvalidConfig("gamma " + fmt10(gamma) + " drives the stage-" + std::to_string(t) +
                          " demand multiplier to " + fmt10(low));
    alpha.push_back(low);
  }
  return alpha;
}

std::vector<double> gamma_alpha_high(double gamma, int stage_count) {
  if (!std::isfinite(gamma) || gamma < 0.0)
    throw InvalidConfig("gamma must be finite and nonnegative");
  if (stage_count < 2) throw InvalidConfig("gamma envelopes need at least 2 stages");
  std::vector<double> alpha;
  alpha.reserve(stage_count - 1);
  for (int t = 2; t <= stage_count; ++t) alpha.push_back(1.20 + gamma * t);
  return alpha;
}

void ExperimentPlan::validate() const {
  if (branch_counts.empty()) throw InvalidConfig("plan needs at least one branch count");
  for (int m : branch_counts)
    if (m < 2 || m > 3)
      throw InvalidConfig("branch count must be 2 or 3, got " + std::to_string(m));
  if (stage_min < 3) throw InvalidConfig("stage_min must be at least 3");
  if (stage_max < stage_min) throw InvalidConfig("stage_max must be at least stage_min");
  if (stage_max > stage_limit)
    throw InvalidConfig("stage_max " + std::to_string(stage_max) + " exceeds stage_limit " +
                        std::to_string(stage_limit));
  if (gammas.empty()) throw InvalidConfig("plan needs at least one gamma");
  for (double g : gammas) gamma_alpha_low(g, stage_max);  // range check per level
  if (replications < 1) throw InvalidConfig("replications must be positive");
  if (methods.empty()) throw InvalidConfig("plan needs at least one method");
  for (const std::string& m : methods)
    if (!known_method(m)) throw InvalidConfig("unknown method '" + m + "'");
  if (jobs < 1) throw InvalidConfig("jobs must be positive");
  if (!(solver.gap_tol >= 0.0)) throw InvalidConfig("solver gap_tol must be nonnegative");
  if (!(solver.time_limit_s > 0.0)) throw InvalidConfig("solver time limit must be positive");
}

ExperimentPlan plan_from_json(const std::string& text) {
  try {
    nlohmann::json j = nlohmann::json::parse(text);
    ExperimentPlan plan;
    plan.branch_counts = j.value("branch_counts", plan.branch_counts);
    plan.stage_min = j.value("stage_min", plan.stage_min);
    plan.stage_max = j.value("stage_max", plan.stage_max);
    plan.stage_limit = j.value("stage_limit", plan.stage_limit);
    plan.gammas = j.value("gammas", plan.gammas);
    plan.replications = j.value("replications", plan.replications);
    plan.seed = j.value("seed", plan.seed);
    plan.methods = j.value("methods", plan.methods);
    plan.data_path = j.value("data_path", plan.data_path);
    plan.jobs = j.value("jobs", plan.jobs);
    if (j.contains("solver")) {
      const nlohmann::json& s = j.at("solver");
      plan.solver.gap_tol = s.value("gap_tol", plan.solver.gap_tol);
      plan.solver.time_limit_s = s.value("time_limit_s", plan.solver.time_limit_s);
      plan.solver.integrality_tol = s.value("integrality_tol", plan.solver.integrality_tol);
      plan.solver.rounding_heuristic = s.value("rounding_heuristic", plan.solver.rounding_heuristic);
      plan.solver.node_limit = s.value("node_limit", plan.solver.node_limit);
      plan.solver.threads = s.value("threads", plan.solver.threads);
      plan.solver.verbosity = s.value("verbosity", plan.solver.verbosity);
      plan.solver.backend = s.value("backend", plan.solver.backend);
    }
    plan.validate();
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("experiment plan JSON: ") + e.what());
  }
}

ExperimentPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open experiment plan file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return plan_from_json(buf.str());
}

std::string plan_to_json(const ExperimentPlan& plan) {
  nlohmann::json j;
  j["branch_counts"] = plan.branch_counts;
  j["stage_min"] = plan.stage_min;
  j["stage_max"] = plan.stage_max;
  j["stage_limit"] = plan.stage_limit;
  j["gammas"] = plan.gammas;
  j["replications"] = plan.replications;
  j["seed"] = plan.seed;
  j["methods"] = plan.methods;
  j["data_path"] = plan.data_path;
  j["jobs"] = plan.jobs;
  j["solver"]["gap_tol"] = plan.solver.gap_tol;
  j["solver"]["time_limit_s"] = plan.solver.time_limit_s;
  j["solver"]["integrality_tol"] = plan.solver.integrality_tol;
  j["solver"]["rounding_heuristic"] = plan.solver.rounding_heuristic;
  j["solver"]["node_limit"] = plan.solver.node_limit;
  j["solver"]["threads"] = plan.solver.threads;
  j["solver"]["verbosity"] = plan.solver.verbosity;
  j["solver"]["backend"] = plan.solver.backend;
  return j.dump(2);
}

std::vector<SweepCell> sweep_cells(const ExperimentPlan& plan) {
  plan.validate();
  std::vector<SweepCell> cells;
  for (int m : plan.branch_counts)
    for (int t = plan.stage_min; t <= plan.stage_max; ++t)
      for (double g : plan.gammas)
        for (int rep = 0; rep < plan.replications; ++rep) {
          SweepCell cell;
          cell.branch_count = m;
          cell.stage_count = t;
          cell.gamma = g;
          cell.replication = rep;
          // gamma stays out of the chain: every variability level of a
          // (branch count, stage count, replication) triple reuses the same
          // multiplier draws (common random numbers).
          cell.seed = mix64(mix64(mix64(plan.seed ^ std::uint64_t(m)) ^ std::uint64_t(t)) ^
                            std::uint64_t(rep));
          cells.push_back(cell);
        }
  return cells;
}

std::vector<SweepCellResult> run_sweep(const ExperimentPlan& plan, const GenExpData& data) {
  data.validate();
  const std::vector<SweepCell> cells = sweep_cells(plan);
  std::vector<SweepCellResult> results(cells.size());

  const auto run_cell = [&](std::size_t k) {
    SweepCellResult& out = results[k];
    const SweepCell& cell = cells[k];
    out.cell = cell;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const ScenarioTree tree = generate_tree(genexp_tree_config(
          data, cell.branch_count, cell.stage_count,
          gamma_alpha_low(cell.gamma, cell.stage_count),
          gamma_alpha_high(cell.gamma, cell.stage_count), cell.seed));
      out.table = genexp_gain_loss_table(tree, data, plan.solver);
      out.ok = true;
    } catch (const std::exception& e) {
      out.ok = false;
      out.error = e.what();
    }
    out.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  const std::size_t width = std::min<std::size_t>(std::size_t(plan.jobs), cells.size());
  if (width <= 1) {
    for (std::size_t k = 0; k < cells.size(); ++k) run_cell(k);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(width);
  for (std::size_t w = 0; w < width; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t k = next.fetch_add(1);
        if (k >= cells.size()) return;
        run_cell(k);
      }
    });
  for (std::thread& worker : pool) worker.join();
  return results;
}

std::string rvats_csv(const std::vector<SweepCellResult>& results) {
  std::ostringstream out;
  out << "branch_count,stage_count,gamma,replication,v_ts,v_ats,rvats_percent,rvats_kind,status\n";
  for (const SweepCellResult& r : results) {
    out << r.cell.branch_count << "," << r.cell.stage_count << "," << fmt10(r.cell.gamma) << ","
        << r.cell.replication << ",";
    if (!r.ok) {
      out << "-,-,-,-,error: " << sanitize(r.error) << "\n";
      continue;
    }
    // When the exact solve hit its limit the reported value is the TS-Relax
    // objective, a valid adaptive design, so the ratio is a lower bound.
    const MethodRow& ats =
        row_of(r.table, r.table.rvats_is_lower_bound ? "TS-Relax" : "ATS");
    out << fmt10(r.table.v_ts) << "," << fmt10(ats.objective) << ","
        << fmt10(r.table.rvats_percent) << ","
        << (r.table.rvats_is_lower_bound ? "lower_bound" : "exact") << ",ok\n";
  }

  // One mean row per (branch count, stage count, gamma), in first-appearance
  // order, averaging the finished replications.
  std::vector<std::array<double, 3>> keys;
  for (const SweepCellResult& r : results) {
    const std::array<double, 3> key = {double(r.cell.branch_count), double(r.cell.stage_count),
                                       r.cell.gamma};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  for (const std::array<double, 3>& key : keys) {
    int total = 0, finished = 0;
    bool all_exact = true;
    double v_ts = 0.0, v_ats = 0.0, rvats = 0.0;
    for (const SweepCellResult& r : results) {
      if (double(r.cell.branch_count) != key[0] || double(r.cell.stage_count) != key[1] ||
          r.cell.gamma != key[2])
        continue;
      ++total;
      if (!r.ok) continue;
      ++finished;
      const MethodRow& ats =
          row_of(r.table, r.table.rvats_is_lower_bound ? "TS-Relax" : "ATS");
      v_ts += r.table.v_ts;
      v_ats += ats.objective;
      rvats += r.table.rvats_percent;
      all_exact = all_exact && !r.table.rvats_is_lower_bound;
    }
    out << int(key[0]) << "," << int(key[1]) << "," << fmt10(key[2]) << ",mean,";
    if (finished == 0)
      out << "-,-,-,-,";
    else
      out << fmt10(v_ts / finished) << "," << fmt10(v_ats / finished) << ","
          << fmt10(rvats / finished) << "," << (all_exact ? "exact" : "lower_bound") << ",";
    out << "mean(" << finished << "/" << total << ")\n";
  }
  return out.str();
}

std::string methods_csv(const std::vector<SweepCellResult>& results,
                        const std::vector<std::string>& methods) {
  for (const std::string& m : methods)
    if (!known_method(m)) throw InvalidConfig("unknown method '" + m + "'");
  enum Field { kGain, kLoss, kGap };
  struct Column {
    const char* header;
    const char* method;
    Field field;
  };
  static const Column kColumns[] = {
      {"ms_gain", "MS", kGain},           {"ats_gain", "ATS", kGain},
      {"ats_loss", "ATS", kLoss},         {"tsrelax_gain", "TS-Relax", kGain},
      {"tsrelax_loss", "TS-Relax", kLoss}, {"msrelax_gain", "MS-Relax", kGain},
      {"msrelax_loss", "MS-Relax", kLoss}, {"msrelax_gap", "MS-Relax", kGap},
      {"atsrelax_gain", "ATS-Relax", kGain}, {"atsrelax_loss", "ATS-Relax", kLoss},
      {"atsrelax_gap", "ATS-Relax", kGap}, {"ts_loss", "TS", kLoss}};
  std::vector<Column> cols;
  for (const Column& c : kColumns)
    if (std::find(methods.begin(), methods.end(), c.method) != methods.end()) cols.push_back(c);

  const auto cell_text = [](const SweepCellResult& r, const Column& c) -> std::string {
    if (!r.ok) return "-";
    const MethodRow& row = row_of(r.table, c.method);
    const std::optional<double>& v = c.field == kGain   ? row.gain_percent
                                     : c.field == kLoss ? row.loss_percent
                                                        : row.gap_percent;
    if (row.time_limited || !v.has_value()) return "-";
    return fmt10(*v);
  };

  std::ostringstream out;
  out << "branch_count,stage_count,gamma,replication";
  for (const Column& c : cols) out << "," << c.header;
  out << "\n";
  for (const SweepCellResult& r : results) {
    out << r.cell.branch_count << "," << r.cell.stage_count << "," << fmt10(r.cell.gamma) << ","
        << r.cell.replication;
    for (const Column& c : cols) out << "," << cell_text(r, c);
    out << "\n";
  }

  // Mean rows: a column averages only when every replication produced a
  // number; otherwise the mean is as unavailable as its worst cell.
  std::vector<std::array<double, 3>> keys;
  for (const SweepCellResult& r : results) {
    const std::array<double, 3> key = {double(r.cell.branch_count), double(r.cell.stage_count),
                                       r.cell.gamma};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  for (const std::array<double, 3>& key : keys) {
    out << int(key[0]) << "," << int(key[1]) << "," << fmt10(key[2]) << ",mean";
    for (const Column& c : cols) {
      double sum = 0.0;
      int count = 0;
      bool complete = true;
      for (const SweepCellResult& r : results) {
        if (double(r.cell.branch_count) != key[0] || double(r.cell.stage_count) != key[1] ||
            r.cell.gamma != key[2])
          continue;
        const std::string text = cell_text(r, c);
        if (text == "-") {
          complete = false;
          break;
        }
        sum += std::strtod(text.c_str(), nullptr);
        ++count;
      }
      out << "," << (complete && count > 0 ? fmt10(sum / count) : "-");
    }
    out << "\n";
  }
  return out.str();
}

std::string run_manifest_json(const ExperimentPlan& plan, const GenExpData& data,
                              const std::vector<SweepCellResult>& results) {
  nlohmann::json j;
  j["plan"] = nlohmann::json::parse(plan_to_json(plan));
  j["data"]["path"] = plan.data_path;
  j["data"]["provenance"] = data.provenance;
  j["data"]["resource_count"] = data.resource_count();
  j["data"]["subperiods"] = data.subperiods;
  j["cells"] = nlohmann::json::array();
  int finished = 0;
  double wall = 0.0;
  for (const SweepCellResult& r : results) {
    nlohmann::json c;
    c["branch_count"] = r.cell.branch_count;
    c["stage_count"] = r.cell.stage_count;
    c["gamma"] = r.cell.gamma;
    c["replication"] = r.cell.replication;
    c["seed"] = r.cell.seed;
    c["ok"] = r.ok;
    c["wall_time_s"] = r.wall_time_s;
    if (r.ok) {
      c["rvats_percent"] = r.table.rvats_percent;
      c["rvats_kind"] = r.table.rvats_is_lower_bound ? "lower_bound" : "exact";
      c["ats_revisions"] = r.table.ats_revisions;
      ++finished;
    } else {
      c["error"] = r.error;
    }
    wall += r.wall_time_s;
    j["cells"].push_back(std::move(c));
  }
  j["totals"]["cells"] = results.size();
  j["totals"]["finished"] = finished;
  j["totals"]["failed"] = results.size() - finished;
  j["totals"]["wall_time_s"] = wall;
  return j.dump(2);
}

}  // namespace ats
