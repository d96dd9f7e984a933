#pragma once

#include <limits>
#include <string>
#include <vector>

namespace ats {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Sense { LessEqual, Equal, GreaterEqual };

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInfinity;
  bool integral = false;
};

struct LinearTerm {
  int var;
  double coeff;
};

struct Constraint {
  std::string name;
  std::vector<LinearTerm> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

// Solver-agnostic LP/MILP in standard row form: min (or max) c'x subject to
// linear rows with {<=,=,>=} senses, variable bounds, and optional
// integrality. Immutable once handed to solve(); builders construct it
// incrementally.
class ModelInstance {
 public:
  std::string name = "model";

  int add_variable(std::string name, double lower, double upper, bool integral);
  // Terms may repeat a variable; duplicates are merged on construction.
  void add_constraint(std::string name, std::vector<LinearTerm> terms, Sense sense, double rhs);
  void set_objective_coeff(int var, double coeff);
  void add_objective_coeff(int var, double coeff);
  void set_minimize(bool minimize) { minimize_ = minimize; }

  int variable_count() const { return static_cast<int>(variables_.size()); }
  int constraint_count() const { return static_cast<int>(constraints_.size()); }
  const Variable& variable(int i) const { return variables_[i]; }
  Variable& variable(int i) { return variables_[i]; }
  const Constraint& constraint(int i) const { return constraints_[i]; }
  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const std::vector<double>& objective() const { return objective_; }
  bool minimize() const { return minimize_; }

  // Index of a variable by exact name, -1 if absent.
  int find_variable(const std::string& name) const;

  // Throws DimensionMismatch / InvalidConfig on inconsistent data.
  void validate() const;

 private:
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::vector<double> objective_;
  bool minimize_ = true;
};

// Same model with every integrality flag cleared.
ModelInstance relax(const ModelInstance& model);

enum class SolveStatus { Optimal, Feasible, Infeasible, Unbounded, TimeLimit };

const char* to_string(SolveStatus status);

struct SolverConfig {
  double gap_tol = 1e-3;        // relative MIP gap at which search stops
  double time_limit_s = 7200.0;
  int threads = 1;              // bundled backend is single-threaded; kept for config parity
  std::string backend = "simplex";
  double integrality_tol = 1e-6;
  // Known upper bound on the optimum (e.g. value of a feasible design from a
  // looser formulation); lets branch-and-bound prune without affecting
  // correctness. kInfinity disables it.
  double cutoff = kInfinity;
  bool rounding_heuristic = true;
  long node_limit = -1;         // < 0: unlimited
  int verbosity = 0;
  // Optional starting point for integral models, indexed like the model's
  // variables. Checked against bounds, rows and integrality, then installed
  // as the initial incumbent; rejected points raise InvalidConfig. Ignored
  // by pure LP solves.
  std::vector<double> start_values;
};

struct Solution {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double best_bound = std::numeric_limits<double>::quiet_NaN();
  double rel_gap = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> values;  // empty when no feasible point is available
  double wall_time_s = 0.0;
  long nodes = 0;
  long iterations = 0;

  bool has_values() const { return !values.empty(); }
  double value(int var) const { return values.at(var); }
};

// Solves with the bundled simplex/branch-and-bound backend. Pure LPs settle
// to Optimal/Infeasible/Unbounded; integral models run best-first
// branch-and-bound, branching on the most fractional variable with
// lowest-index tie-break. Deterministic: repeated solves of the same model
// return bit-identical objectives.
Solution solve(const ModelInstance& model, const SolverConfig& config = {});

}  // namespace ats
