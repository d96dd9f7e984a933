#include "ats/simplex.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

#include "ats/errors.hpp"

namespace ats {

namespace {
constexpr double kTolPrimal = 1e-7;  // bound feasibility inside the loops
constexpr double kTolDual = 1e-7;    // reduced-cost feasibility inside the loops
constexpr double kTolPivot = 1e-9;   // smallest acceptable pivot magnitude
constexpr int kRefactorEvery = 256;
constexpr int kStallLimit = 300;     // degenerate pivots before Bland fallback
}  // namespace

SimplexSolver::SimplexSolver(const ModelInstance& model) {
  model.validate();
  n_ = model.variable_count();
  m_ = model.constraint_count();
  total_ = n_ + m_;
  maximize_ = !model.minimize();

  cols_.assign(n_, {});
  b_.assign(m_, 0.0);
  cost_.assign(total_, 0.0);
  lb_.assign(total_, 0.0);
  ub_.assign(total_, 0.0);

  double cost_scale = 1.0;
  double rhs_scale = 1.0;
  for (int j = 0; j < n_; ++j) {
    const Variable& v = model.variable(j);
    lb_[j] = v.lower;
    ub_[j] = v.upper;
    cost_[j] = maximize_ ? -model.objective()[j] : model.objective()[j];
    cost_scale = std::max(cost_scale, std::abs(cost_[j]));
  }
  for (int r = 0; r < m_; ++r) {
    const Constraint& c = model.constraint(r);
    b_[r] = c.rhs;
    rhs_scale = std::max(rhs_scale, std::abs(c.rhs));
    for (const LinearTerm& t : c.terms) cols_[t.var].push_back({r, t.coeff});
    switch (c.sense) {
      case Sense::LessEqual:    lb_[n_ + r] = 0.0; ub_[n_ + r] = kInfinity; break;
      case Sense::GreaterEqual: lb_[n_ + r] = -kInfinity; ub_[n_ + r] = 0.0; break;
      case Sense::Equal:        lb_[n_ + r] = 0.0; ub_[n_ + r] = 0.0; break;
    }
  }
  model_lb_ = lb_;
  model_ub_ = ub_;
  solution_.assign(n_, 0.0);
  dual_check_tol_ = 1e-6 * cost_scale;
  primal_check_tol_ = 1e-6 * rhs_scale;
}

void SimplexSolver::set_bound(int var, double lower, double upper) {
  if (var < 0 || var >= n_) throw DimensionMismatch("set_bound: bad variable index");
  if (lower > upper) throw InvalidConfig("set_bound: lower > upper");
  lb_[var] = lower;
  ub_[var] = upper;
}

void SimplexSolver::reset_bounds() {
  std::copy(model_lb_.begin(), model_lb_.begin() + n_, lb_.begin());
  std::copy(model_ub_.begin(), model_ub_.begin() + n_, ub_.begin());
}

void SimplexSolver::invalidate_basis() { has_basis_ = false; }

double SimplexSolver::bound_value(int j) const {
  switch (vstat_[j]) {
    case kAtLower:
    case kFixed:   return lb_[j];
    case kAtUpper: return ub_[j];
    case kFree:    return 0.0;
    case kBasic:   break;
  }
  return 0.0;
}

// alpha_j = rho . A_j for every column; basic entries are meaningless here.
void SimplexSolver::column_times(const Eigen::VectorXd& rho, std::vector<double>& alpha) const {
  for (int j = 0; j < n_; ++j) {
    double s = 0.0;
    for (const LinearTerm& t : cols_[j]) s += t.coeff * rho[t.var];
    alpha[j] = s;
  }
  for (int r = 0; r < m_; ++r) alpha[n_ + r] = rho[r];
}

Eigen::VectorXd SimplexSolver::ftran(int j) const {
  if (j >= n_) return binv_.col(j - n_);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(m_);
  for (const LinearTerm& t : cols_[j]) w.noalias() += t.coeff * binv_.col(t.var);
  return w;
}

void SimplexSolver::refactorize() {
  pivots_since_refactor_ = 0;
  if (m_ == 0) return;
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m_, m_);
  for (int r = 0; r < m_; ++r) {
    const int j = basis_[r];
    if (j >= n_) {
      B(j - n_, r) = 1.0;
    } else {
      for (const LinearTerm& t : cols_[j]) B(t.var, r) = t.coeff;
    }
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
  double mindiag = kInfinity, maxdiag = 0.0;
  for (int i = 0; i < m_; ++i) {
    const double u = std::abs(lu.matrixLU()(i, i));
    mindiag = std::min(mindiag, u);
    maxdiag = std::max(maxdiag, u);
  }
  if (mindiag < 1e-13 * std::max(1.0, maxdiag))
    throw NumericalFailure("singular basis during refactorization");
  binv_ = lu.inverse();
}

void SimplexSolver::recompute_primals() {
  Eigen::VectorXd rhs(m_);
  for (int r = 0; r < m_; ++r) rhs[r] = b_[r];
  for (int j = 0; j < total_; ++j) {
    if (vstat_[j] == kBasic) continue;
    const double v = bound_value(j);
    if (v == 0.0) continue;
    if (j >= n_) {
      rhs[j - n_] -= v;
    } else {
      for (const LinearTerm& t : cols_[j]) rhs[t.var] -= t.coeff * v;
    }
  }
  xb_ = binv_ * rhs;
}

void SimplexSolver::recompute_duals() {
  Eigen::VectorXd cb(m_);
  for (int r = 0; r < m_; ++r) cb[r] = work_cost_[basis_[r]];
  Eigen::VectorXd y = binv_.transpose() * cb;
  d_.assign(total_, 0.0);
  for (int j = 0; j < total_; ++j) {
    if (vstat_[j] == kBasic) continue;
    double s = work_cost_[j];
    if (j >= n_) {
      s -= y[j - n_];
    } else {
      for (const LinearTerm& t : cols_[j]) s -= t.coeff * y[t.var];
    }
    d_[j] = s;
  }
}

// Align each nonbasic variable's resting side with the sign of its reduced
// cost where the matching bound exists; also repair resting sides that have
// become infinite after bound changes. Returns false when some variable
// demands a side that does not exist (dual-infeasible start).
bool SimplexSolver::dual_feasible_sides() {
  bool ok = true;
  for (int j = 0; j < total_; ++j) {
    if (vstat_[j] == kBasic) continue;
    if (lb_[j] == ub_[j]) { vstat_[j] = kFixed; continue; }
    const bool lower_finite = std::isfinite(lb_[j]);
    const bool upper_finite = std::isfinite(ub_[j]);
    if (!lower_finite && !upper_finite) {
      vstat_[j] = kFree;
      if (std::abs(d_[j]) > kTolDual) ok = false;
      continue;
    }
    if (d_[j] > kTolDual) {
      if (lower_finite) vstat_[j] = kAtLower;
      else ok = false;
    } else if (d_[j] < -kTolDual) {
      if (upper_finite) vstat_[j] = kAtUpper;
      else ok = false;
    } else if (vstat_[j] == kAtLower && !lower_finite) {
      vstat_[j] = kAtUpper;
    } else if (vstat_[j] == kAtUpper && !upper_finite) {
      vstat_[j] = kAtLower;
    } else if (vstat_[j] == kFree || vstat_[j] == kFixed) {
      vstat_[j] = lower_finite ? kAtLower : kAtUpper;
    }
  }
  return ok;
}

void SimplexSolver::cold_basis() {
  basis_.resize(m_);
  vstat_.assign(total_, kAtLower);
  for (int r = 0; r < m_; ++r) {
    basis_[r] = n_ + r;
    vstat_[n_ + r] = kBasic;
  }
  for (int j = 0; j < n_; ++j) {
    const bool lower_finite = std::isfinite(lb_[j]);
    const bool upper_finite = std::isfinite(ub_[j]);
    if (lb_[j] == ub_[j]) {
      vstat_[j] = kFixed;
    } else if (!lower_finite && !upper_finite) {
      vstat_[j] = kFree;
    } else if (cost_[j] > kTolDual) {
      vstat_[j] = lower_finite ? kAtLower : kAtUpper;
    } else if (cost_[j] < -kTolDual) {
      vstat_[j] = upper_finite ? kAtUpper : kAtLower;
    } else if (!lower_finite) {
      vstat_[j] = kAtUpper;
    } else if (upper_finite && std::abs(ub_[j]) < std::abs(lb_[j])) {
      vstat_[j] = kAtUpper;
    } else {
      vstat_[j] = kAtLower;
    }
  }
  binv_ = Eigen::MatrixXd::Identity(m_, m_);
  pivots_since_refactor_ = 0;
  has_basis_ = true;
}

void SimplexSolver::pivot(int row, int entering, const Eigen::VectorXd& w) {
  // Rank-1 update of the explicit inverse:
  //   Binv' = Binv + (e_r - w) (Binv.row(r) / w_r).
  const Eigen::RowVectorXd pr = binv_.row(row) / w[row];
  Eigen::VectorXd u = -w;
  u[row] += 1.0;
  binv_.noalias() += u * pr;
  basis_[row] = entering;
  vstat_[entering] = kBasic;
  ++pivots_since_refactor_;
}

bool SimplexSolver::time_exceeded(const LpOptions& options) const {
  if (options.time_limit_s < 0.0) return false;
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_time_;
  return elapsed.count() > options.time_limit_s;
}

// Dual simplex: keeps reduced-cost feasibility, removes bound violations of
// basic variables. Under all-zero work costs this degenerates into a pure
// feasibility pass (every ratio is zero), which is how infeasible starts are
// repaired.
LpStatus SimplexSolver::dual_loop(const LpOptions& options) {
  const long limit =
      options.iteration_limit > 0 ? options.iteration_limit : 2000L + 40L * (m_ + n_);
  std::vector<double> alpha(total_);
  int stall = 0;
  for (long iter = 0; iter < limit; ++iter) {
    if ((iter & 63) == 0 && time_exceeded(options)) return LpStatus::TimeLimit;
    if (pivots_since_refactor_ >= kRefactorEvery) {
      refactorize();
      recompute_primals();
      recompute_duals();
    }
    const bool bland = stall > kStallLimit;

    // Leaving row: largest bound violation (Bland: lowest basic variable).
    int row = -1;
    bool leave_at_upper = false;
    if (!bland) {
      double worst = kTolPrimal;
      for (int r = 0; r < m_; ++r) {
        const int p = basis_[r];
        const double below = lb_[p] - xb_[r];
        const double above = xb_[r] - ub_[p];
        if (below > worst) { worst = below; row = r; leave_at_upper = false; }
        if (above > worst) { worst = above; row = r; leave_at_upper = true; }
      }
    } else {
      int best_var = INT_MAX;
      for (int r = 0; r < m_; ++r) {
        const int p = basis_[r];
        if (p >= best_var) continue;
        if (lb_[p] - xb_[r] > kTolPrimal) { best_var = p; row = r; leave_at_upper = false; }
        else if (xb_[r] - ub_[p] > kTolPrimal) { best_var = p; row = r; leave_at_upper = true; }
      }
    }
    if (row == -1) return LpStatus::Optimal;  // primal feasible

    const int p = basis_[row];
    const double target = leave_at_upper ? ub_[p] : lb_[p];
    const double omega = leave_at_upper ? 1.0 : -1.0;
    const Eigen::VectorXd rho = binv_.row(row).transpose();
    column_times(rho, alpha);

    // Harris two-pass ratio test on theta = d_j / (omega alpha_j) >= 0.
    double theta_cap = kInfinity;
    for (int j = 0; j < total_; ++j) {
      if (vstat_[j] == kBasic || vstat_[j] == kFixed) continue;
      const double ahat = omega * alpha[j];
      double cap;
      if (vstat_[j] == kAtLower && ahat > kTolPivot) cap = (d_[j] + kTolDual) / ahat;
      else if (vstat_[j] == kAtUpper && ahat < -kTolPivot) cap = (d_[j] - kTolDual) / ahat;
      else if (vstat_[j] == kFree && std::abs(ahat) > kTolPivot)
        cap = (std::abs(d_[j]) + kTolDual) / std::abs(ahat);
      else continue;
      theta_cap = std::min(theta_cap, cap);
    }
    if (theta_cap == kInfinity) return LpStatus::Infeasible;  // no entering candidate

    int q = -1;
    double best_score = 0.0;
    for (int j = 0; j < total_; ++j) {
      if (vstat_[j] == kBasic || vstat_[j] == kFixed) continue;
      const double ahat = omega * alpha[j];
      double ratio;
      if (vstat_[j] == kAtLower && ahat > kTolPivot) ratio = d_[j] / ahat;
      else if (vstat_[j] == kAtUpper && ahat < -kTolPivot) ratio = d_[j] / ahat;
      else if (vstat_[j] == kFree && std::abs(ahat) > kTolPivot)
        ratio = std::abs(d_[j]) / std::abs(ahat);
      else continue;
      if (ratio > theta_cap) continue;
      if (bland) { q = j; break; }  // lowest admissible index
      const double score = std::abs(ahat);
      if (score > best_score) { best_score = score; q = j; }
    }
    if (q < 0) return LpStatus::Infeasible;

    const Eigen::VectorXd w = ftran(q);
    if (std::abs(w[row]) < kTolPivot) {
      // Priced row and ftran disagree (update drift): rebuild and retry.
      refactorize();
      recompute_primals();
      recompute_duals();
      ++stall;
      continue;
    }

    const double theta_signed = omega * (d_[q] / (omega * alpha[q]));
    const double delta_q = (xb_[row] - target) / w[row];
    stall = std::abs(delta_q) < 1e-12 ? stall + 1 : 0;

    if (theta_signed != 0.0) {
      for (int j = 0; j < total_; ++j)
        if (vstat_[j] != kBasic) d_[j] -= theta_signed * alpha[j];
    }
    d_[p] = -theta_signed;
    d_[q] = 0.0;

    const double xq_new = bound_value(q) + delta_q;
    xb_.noalias() -= delta_q * w;
    pivot(row, q, w);
    xb_[row] = xq_new;
    vstat_[p] = lb_[p] == ub_[p] ? kFixed : (leave_at_upper ? kAtUpper : kAtLower);
    ++total_iterations_;
  }
  return LpStatus::IterationLimit;
}

// Primal simplex phase 2: needs a primal-feasible basis; clears reduced-cost
// violations and detects unboundedness.
LpStatus SimplexSolver::primal_loop(const LpOptions& options) {
  const long limit =
      options.iteration_limit > 0 ? options.iteration_limit : 2000L + 40L * (m_ + n_);
  std::vector<double> alpha(total_);
  int stall = 0;
  for (long iter = 0; iter < limit; ++iter) {
    if ((iter & 63) == 0 && time_exceeded(options)) return LpStatus::TimeLimit;
    if (pivots_since_refactor_ >= kRefactorEvery) {
      refactorize();
      recompute_primals();
      recompute_duals();
    }
    const bool bland = stall > kStallLimit;

    // Entering column: worst reduced-cost violation (Bland: lowest index).
    int q = -1;
    double worst = kTolDual;
    double sigma = 1.0;
    for (int j = 0; j < total_; ++j) {
      double viol = 0.0, dir = 1.0;
      switch (vstat_[j]) {
        case kAtLower: if (d_[j] < -kTolDual) { viol = -d_[j]; dir = 1.0; } break;
        case kAtUpper: if (d_[j] > kTolDual) { viol = d_[j]; dir = -1.0; } break;
        case kFree:
          if (std::abs(d_[j]) > kTolDual) { viol = std::abs(d_[j]); dir = d_[j] < 0 ? 1.0 : -1.0; }
          break;
        default: break;
      }
      if (viol > worst) {
        worst = viol; q = j; sigma = dir;
        if (bland) break;
      }
    }
    if (q < 0) return LpStatus::Optimal;

    const Eigen::VectorXd w = ftran(q);

    // Harris two-pass ratio over basic bounds plus the entering variable's
    // own opposite bound (bound flip). x_B moves by -sigma * delta * w.
    const double flip_limit = ub_[q] - lb_[q];  // +inf when one side is open
    double cap = flip_limit;
    for (int r = 0; r < m_; ++r) {
      const double step = sigma * w[r];
      const int p = basis_[r];
      if (step > kTolPivot) {
        if (std::isfinite(lb_[p])) cap = std::min(cap, (xb_[r] - lb_[p] + kTolPrimal) / step);
      } else if (step < -kTolPivot) {
        if (std::isfinite(ub_[p])) cap = std::min(cap, (xb_[r] - ub_[p] - kTolPrimal) / step);
      }
    }
    if (!std::isfinite(cap)) return LpStatus::Unbounded;

    int row = -1;
    double best_pivot = 0.0;
    int best_var = INT_MAX;
    double delta = flip_limit;
    for (int r = 0; r < m_; ++r) {
      const double step = sigma * w[r];
      const int p = basis_[r];
      double ratio;
      if (step > kTolPivot && std::isfinite(lb_[p])) ratio = (xb_[r] - lb_[p]) / step;
      else if (step < -kTolPivot && std::isfinite(ub_[p])) ratio = (xb_[r] - ub_[p]) / step;
      else continue;
      if (ratio > cap) continue;
      const bool take = bland ? p < best_var : std::abs(w[r]) > best_pivot;
      if (take) {
        best_pivot = std::abs(w[r]);
        best_var = p;
        row = r;
        delta = std::max(ratio, 0.0);
      }
    }

    if (row == -1) {
      // Bound flip: the entering variable swaps sides, no basis change.
      if (!std::isfinite(flip_limit)) return LpStatus::Unbounded;
      xb_.noalias() -= sigma * flip_limit * w;
      vstat_[q] = vstat_[q] == kAtLower ? kAtUpper : kAtLower;
      stall = 0;
      ++total_iterations_;
      continue;
    }

    const int p = basis_[row];
    stall = delta < 1e-12 ? stall + 1 : 0;

    const double xq_new = bound_value(q) + sigma * delta;
    xb_.noalias() -= sigma * delta * w;

    // Dual update from the pivot row of the not-yet-updated inverse.
    const Eigen::VectorXd rho = binv_.row(row).transpose();
    column_times(rho, alpha);
    const double theta = d_[q] / alpha[q];
    for (int j = 0; j < total_; ++j)
      if (vstat_[j] != kBasic) d_[j] -= theta * alpha[j];

    const double step = sigma * w[row];
    pivot(row, q, w);
    xb_[row] = xq_new;
    d_[p] = -theta;
    d_[q] = 0.0;
    vstat_[p] = lb_[p] == ub_[p] ? kFixed : (step > 0.0 ? kAtLower : kAtUpper);
    ++total_iterations_;
  }
  return LpStatus::IterationLimit;
}

void SimplexSolver::finish() {
  for (int j = 0; j < n_; ++j) solution_[j] = bound_value(j);
  for (int r = 0; r < m_; ++r)
    if (basis_[r] < n_) solution_[basis_[r]] = xb_[r];
  objective_ = 0.0;
  for (int j = 0; j < n_; ++j) objective_ += cost_[j] * solution_[j];
  if (maximize_) objective_ = -objective_;
}

LpStatus SimplexSolver::solve(const LpOptions& options) {
  start_time_ = std::chrono::steady_clock::now();
  if (!has_basis_) cold_basis();

  for (int attempt = 0; attempt < 3; ++attempt) {
    if (attempt > 0) refactorize();
    work_cost_ = cost_;
    recompute_duals();
    const bool dual_ok = dual_feasible_sides();
    recompute_primals();

    LpStatus st;
    if (dual_ok) {
      st = dual_loop(options);
    } else {
      // Zero objective makes any basis dual feasible; the dual loop then just
      // chases primal feasibility (and proves infeasibility by Farkas rows).
      work_cost_.assign(total_, 0.0);
      d_.assign(total_, 0.0);
      dual_feasible_sides();
      recompute_primals();
      st = dual_loop(options);
      if (st == LpStatus::Optimal) {
        work_cost_ = cost_;
        recompute_duals();
        st = primal_loop(options);
      }
    }
    if (st != LpStatus::Optimal) return st;

    // Verify on freshly recomputed values; retry from a refactorized basis
    // when incremental-update drift breached the (scale-aware) tolerances.
    work_cost_ = cost_;
    recompute_duals();
    recompute_primals();
    bool clean = true;
    for (int j = 0; j < total_ && clean; ++j) {
      switch (vstat_[j]) {
        case kAtLower: if (d_[j] < -dual_check_tol_) clean = false; break;
        case kAtUpper: if (d_[j] > dual_check_tol_) clean = false; break;
        case kFree:    if (std::abs(d_[j]) > dual_check_tol_) clean = false; break;
        default: break;
      }
    }
    for (int r = 0; r < m_ && clean; ++r) {
      const int p = basis_[r];
      if (xb_[r] < lb_[p] - primal_check_tol_ || xb_[r] > ub_[p] + primal_check_tol_)
        clean = false;
    }
    if (clean) {
      finish();
      return LpStatus::Optimal;
    }
  }
  throw NumericalFailure("simplex failed to reach a verified optimum");
}

std::vector<double> SimplexSolver::duals() const {
  Eigen::VectorXd cb(m_);
  for (int r = 0; r < m_; ++r) cb[r] = cost_[basis_[r]];
  const Eigen::VectorXd y = binv_.transpose() * cb;
  std::vector<double> out(m_);
  for (int r = 0; r < m_; ++r) out[r] = maximize_ ? -y[r] : y[r];
  return out;
}

std::vector<double> SimplexSolver::reduced_costs() const {
  Eigen::VectorXd cb(m_);
  for (int r = 0; r < m_; ++r) cb[r] = cost_[basis_[r]];
  const Eigen::VectorXd y = binv_.transpose() * cb;
  std::vector<double> out(n_);
  for (int j = 0; j < n_; ++j) {
    double s = cost_[j];
    for (const LinearTerm& t : cols_[j]) s -= t.coeff * y[t.var];
    out[j] = maximize_ ? -s : s;
  }
  return out;
}

}  // namespace ats
