#pragma once

#include <chrono>
#include <vector>

#include <Eigen/Dense>

#include "ats/model.hpp"

namespace ats {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit, TimeLimit };

struct LpOptions {
  long iteration_limit = -1;   // < 0: scaled default
  double time_limit_s = -1.0;  // < 0: none
};

// Bounded-variable simplex over the computational form
//   min c'x   s.t.  A x + s = b,   l <= (x, s) <= u,
// where row senses become slack bounds (<=: s >= 0, >=: s <= 0, =: s = 0).
// The basis inverse is kept explicitly (dense, rank-1 updated, periodically
// refactorized). The dual simplex is the workhorse: every model built by this
// library has nonnegative costs, making the all-slack basis dual feasible,
// and branch-and-bound bound changes never disturb dual feasibility, so warm
// restarts cost only a few pivots. When the start is dual-infeasible
// (imported models), a dual pass under all-zero costs first restores primal
// feasibility (any basis is dual feasible for a zero objective) and a primal
// phase then optimizes, which also detects unboundedness.
//
// Maximization models are negated internally; reported objectives, duals and
// reduced costs refer to the original orientation.
class SimplexSolver {
 public:
  explicit SimplexSolver(const ModelInstance& model);

  int structural_count() const { return n_; }
  int row_count() const { return m_; }

  // Override a structural variable's bounds (branch-and-bound). The basis is
  // kept; the next solve() warm-starts.
  void set_bound(int var, double lower, double upper);
  // Restore every structural bound to the model's.
  void reset_bounds();
  // Drop the basis; next solve() is a cold start.
  void invalidate_basis();

  LpStatus solve(const LpOptions& options = {});

  // Valid after solve() returns Optimal.
  double objective() const { return objective_; }
  // Structural variable values (basic solution).
  const std::vector<double>& solution() const { return solution_; }
  // Row duals y and structural reduced costs d = c - A'y for the original
  // objective orientation; used for optimality (KKT) verification.
  std::vector<double> duals() const;
  std::vector<double> reduced_costs() const;

  long iterations() const { return total_iterations_; }

 private:
  enum VStat : unsigned char { kBasic, kAtLower, kAtUpper, kFree, kFixed };

  double bound_value(int j) const;        // resting value of a nonbasic var
  void column_times(const Eigen::VectorXd& rho, std::vector<double>& alpha) const;
  Eigen::VectorXd ftran(int j) const;     // Binv * A_j
  void refactorize();                      // rebuild Binv from the basis
  void recompute_primals();
  void recompute_duals();
  bool dual_feasible_sides();              // align nonbasic sides with d; false if impossible
  void cold_basis();
  LpStatus dual_loop(const LpOptions& options);
  LpStatus primal_loop(const LpOptions& options);
  void pivot(int row, int entering, const Eigen::VectorXd& w);
  bool time_exceeded(const LpOptions& options) const;
  void finish();                           // fill solution_/objective_

  int n_ = 0;  // structural variables
  int m_ = 0;  // rows
  int total_ = 0;  // n_ + m_
  bool maximize_ = false;

  std::vector<std::vector<LinearTerm>> cols_;  // structural columns; var field = row
  std::vector<double> b_;
  std::vector<double> cost_;       // minimized costs, all columns
  std::vector<double> work_cost_;  // costs driving the current loop
  std::vector<double> lb_, ub_;            // current bounds, all columns
  std::vector<double> model_lb_, model_ub_;

  std::vector<int> basis_;
  std::vector<VStat> vstat_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd xb_;
  std::vector<double> d_;  // reduced costs under work_cost_
  bool has_basis_ = false;
  int pivots_since_refactor_ = 0;

  double dual_check_tol_ = 1e-6;    // scale-aware final verification
  double primal_check_tol_ = 1e-6;

  double objective_ = 0.0;
  std::vector<double> solution_;
  long total_iterations_ = 0;
  std::chrono::steady_clock::time_point start_time_;
};

}  // namespace ats
