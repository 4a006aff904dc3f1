#include "bems/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <queue>
#include <sstream>
#include <stdexcept>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace bems::milp {

namespace {
constexpr Real kInf = std::numeric_limits<Real>::infinity();
}

int Problem::add_variable(const std::string& name, Real lb, Real ub, bool is_binary) {
  Variable v;
  v.name = name;
  v.lb = lb;
  v.ub = ub;
  v.is_binary = is_binary;
  variables_.push_back(std::move(v));
  objective_.push_back(0.0);
  return static_cast<int>(variables_.size()) - 1;
}

int Problem::add_constraint(std::vector<std::pair<int, Real>> terms, Relation rel, Real rhs,
                            const std::string& name) {
  // Merge duplicate columns so downstream code sees each column once per row.
  std::map<int, Real> merged;
  for (const auto& [col, coeff] : terms) merged[col] += coeff;
  ConstraintRow row;
  row.name = name;
  row.rel = rel;
  row.rhs = rhs;
  row.terms.reserve(merged.size());
  for (const auto& [col, coeff] : merged) {
    if (coeff != 0.0) row.terms.emplace_back(col, coeff);
  }
  rows_.push_back(std::move(row));
  return static_cast<int>(rows_.size()) - 1;
}

void Problem::add_objective_term(int col, Real coeff) {
  if (col < 0 || col >= num_variables())
    throw std::invalid_argument("milp: objective column out of range");
  objective_[col] += coeff;
}

int Problem::num_binaries() const {
  int n = 0;
  for (const auto& v : variables_) n += v.is_binary ? 1 : 0;
  return n;
}

void Problem::validate() const {
  for (int j = 0; j < num_variables(); ++j) {
    const Variable& v = variables_[j];
    if (std::isnan(v.lb) || std::isnan(v.ub))
      throw std::invalid_argument("milp: NaN bound on variable " + v.name);
    if (v.lb > v.ub)
      throw std::invalid_argument("milp: empty bound interval on variable " + v.name);
    if (v.is_binary) {
      if (!(std::isfinite(v.lb) && std::isfinite(v.ub)) || v.lb < 0.0 || v.ub > 1.0)
        throw std::invalid_argument("milp: binary " + v.name + " needs bounds within [0,1]");
    }
    if (!std::isfinite(objective_[j]))
      throw std::invalid_argument("milp: non-finite objective coefficient on " + v.name);
  }
  for (const auto& row : rows_) {
    if (std::isnan(row.rhs) || std::isinf(row.rhs))
      throw std::invalid_argument("milp: non-finite rhs in row " + row.name);
    for (const auto& [col, coeff] : row.terms) {
      if (col < 0 || col >= num_variables())
        throw std::invalid_argument("milp: column index out of range in row " + row.name);
      if (!std::isfinite(coeff))
        throw std::invalid_argument("milp: non-finite coefficient in row " + row.name);
    }
  }
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::TimeLimitIncumbent: return "TimeLimitIncumbent";
  }
  return "?";
}

namespace {

// ---------------------------------------------------------------------------
// Bounded-variable revised simplex with a composite (infeasibility-reducing)
// phase 1, product-form eta updates on a sparse LU of the basis, Dantzig
// pricing and a Bland fallback engaged on stalls.
// ---------------------------------------------------------------------------

enum class VStat : std::uint8_t { Basic, AtLower, AtUpper, Free };

struct SparseCol {
  std::vector<int> idx;
  std::vector<Real> val;
};

struct Eta {
  int r = -1;
  Real wr = 0.0;
  std::vector<std::pair<int, Real>> off;
};

struct Basis {
  std::vector<int> basic;
  std::vector<VStat> vstat;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterLimit };

class Simplex {
 public:
  static constexpr Real kFeasTol = 1e-7;
  static constexpr Real kDualTol = 1e-9;
  static constexpr Real kPivTol = 1e-8;
  static constexpr int kRefactorEvery = 100;
  static constexpr int kStallLimit = 600;

  explicit Simplex(const Problem& p) {
    n_struct_ = p.num_variables();
    m_ = p.num_constraints();
    n_total_ = n_struct_ + m_;

    cols_.resize(n_total_);
    lb_.resize(n_total_);
    ub_.resize(n_total_);
    cost_.assign(n_total_, 0.0);
    rhs_.resize(m_);

    for (int j = 0; j < n_struct_; ++j) {
      lb_[j] = p.variables()[j].lb;
      ub_[j] = p.variables()[j].ub;
      cost_[j] = p.objective()[j];
    }

    // Row equilibration keeps pivot magnitudes comparable across rows built
    // from heterogeneous physical units.
    std::vector<Real> scale(m_, 1.0);
    for (int i = 0; i < m_; ++i) {
      Real mx = 0.0;
      for (const auto& [col, coeff] : p.rows()[i].terms) mx = std::max(mx, std::abs(coeff));
      scale[i] = mx > 0.0 ? mx : 1.0;
    }

    for (int i = 0; i < m_; ++i) {
      const ConstraintRow& row = p.rows()[i];
      for (const auto& [col, coeff] : row.terms) {
        cols_[col].idx.push_back(i);
        cols_[col].val.push_back(coeff / scale[i]);
      }
      rhs_[i] = row.rhs / scale[i];
      const int s = n_struct_ + i;
      cols_[s].idx.push_back(i);
      cols_[s].val.push_back(1.0);
      switch (row.rel) {
        case Relation::LessEqual:
          lb_[s] = 0.0;
          ub_[s] = kInf;
          break;
        case Relation::Equal:
          lb_[s] = 0.0;
          ub_[s] = 0.0;
          break;
        case Relation::GreaterEqual:
          lb_[s] = -kInf;
          ub_[s] = 0.0;
          break;
      }
    }

    x_ = Vector::Zero(n_total_);
    basic_pos_.assign(n_total_, -1);
    reset_to_slack_basis();
  }

  void set_variable_bounds(int col, Real lb, Real ub) {
    lb_[col] = lb;
    ub_[col] = ub;
    if (vstat_[col] == VStat::Basic) return;
    normalize_nonbasic(col);
  }

  Real variable_lb(int col) const { return lb_[col]; }
  Real variable_ub(int col) const { return ub_[col]; }

  void reset_to_slack_basis() {
    basic_.resize(m_);
    vstat_.assign(n_total_, VStat::AtLower);
    std::fill(basic_pos_.begin(), basic_pos_.end(), -1);
    for (int j = 0; j < n_total_; ++j) {
      if (j >= n_struct_) continue;
      normalize_nonbasic(j);
    }
    for (int i = 0; i < m_; ++i) {
      const int s = n_struct_ + i;
      basic_[i] = s;
      basic_pos_[s] = i;
      vstat_[s] = VStat::Basic;
    }
    factor_valid_ = false;
  }

  Basis save_basis() const { return Basis{basic_, vstat_}; }

  void load_basis(const Basis& b) {
    // The factorization tracks the basis columns only; reloading the same
    // column set (the common case for sibling nodes) keeps the LU and etas.
    const bool same_columns = factor_valid_ && b.basic == basic_;
    basic_ = b.basic;
    vstat_ = b.vstat;
    std::fill(basic_pos_.begin(), basic_pos_.end(), -1);
    for (int i = 0; i < m_; ++i) basic_pos_[basic_[i]] = i;
    for (int j = 0; j < n_total_; ++j) {
      if (vstat_[j] != VStat::Basic) normalize_nonbasic(j);
    }
    factor_valid_ = same_columns;
  }

  LpStatus solve(std::int64_t max_iters, std::int64_t* iters_used) {
    std::int64_t used = 0;
    LpStatus st = run(max_iters, used);
    if (iters_used) *iters_used = used;
    return st;
  }

  Real objective() const {
    Real obj = 0.0;
    for (int j = 0; j < n_struct_; ++j) obj += cost_[j] * x_(j);
    return obj;
  }

  Real value(int col) const { return x_(col); }

 private:
  void normalize_nonbasic(int j) {
    // Park a nonbasic variable on a consistent bound, keeping its previous
    // side when that bound is still finite.
    if (vstat_[j] == VStat::AtUpper && std::isfinite(ub_[j])) {
      x_(j) = ub_[j];
      return;
    }
    if (std::isfinite(lb_[j])) {
      vstat_[j] = VStat::AtLower;
      x_(j) = lb_[j];
    } else if (std::isfinite(ub_[j])) {
      vstat_[j] = VStat::AtUpper;
      x_(j) = ub_[j];
    } else {
      vstat_[j] = VStat::Free;
      x_(j) = 0.0;
    }
  }

  bool refactor() {
    Eigen::SparseMatrix<Real> b(m_, m_);
    std::vector<Eigen::Triplet<Real>> trips;
    for (int i = 0; i < m_; ++i) {
      const SparseCol& c = cols_[basic_[i]];
      for (size_t k = 0; k < c.idx.size(); ++k) trips.emplace_back(c.idx[k], i, c.val[k]);
    }
    b.setFromTriplets(trips.begin(), trips.end());
    b.makeCompressed();
    lu_.compute(b);
    if (lu_.info() != Eigen::Success) return false;
    etas_.clear();
    factor_valid_ = true;
    recompute_basics();
    return true;
  }

  void recompute_basics() {
    Vector r = Vector::Map(rhs_.data(), m_);
    for (int j = 0; j < n_total_; ++j) {
      if (vstat_[j] == VStat::Basic || x_(j) == 0.0) continue;
      const SparseCol& c = cols_[j];
      for (size_t k = 0; k < c.idx.size(); ++k) r(c.idx[k]) -= c.val[k] * x_(j);
    }
    Vector xb = ftran(r);
    for (int i = 0; i < m_; ++i) x_(basic_[i]) = xb(i);
  }

  Vector ftran(const Vector& v) const {
    Vector z = lu_.solve(v);
    for (const Eta& e : etas_) {
      Real zr = z(e.r) / e.wr;
      z(e.r) = zr;
      if (zr != 0.0) {
        for (const auto& [i, wi] : e.off) z(i) -= wi * zr;
      }
    }
    return z;
  }

  Vector btran(const Vector& c) const {
    Vector z = c;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      Real s = 0.0;
      for (const auto& [i, wi] : it->off) s += wi * z(i);
      z(it->r) = (z(it->r) - s) / it->wr;
    }
    return lu_.adjoint().solve(z);
  }

  Real column_dot(int j, const Vector& y) const {
    const SparseCol& c = cols_[j];
    Real s = 0.0;
    for (size_t k = 0; k < c.idx.size(); ++k) s += c.val[k] * y(c.idx[k]);
    return s;
  }

  Real total_infeasibility() const {
    Real f = 0.0;
    for (int i = 0; i < m_; ++i) {
      const int j = basic_[i];
      if (x_(j) < lb_[j]) f += lb_[j] - x_(j);
      if (x_(j) > ub_[j]) f += x_(j) - ub_[j];
    }
    return f;
  }

  // One pricing + ratio-test + pivot step. phase1 selects the composite
  // infeasibility objective. Returns false when no eligible column remains.
  enum class StepResult { Pivoted, NoEntering, Unbounded, NumericalRetry };

  StepResult step(bool phase1, bool bland) {
    // Reduced costs from the phase-appropriate basic gradient.
    Vector g = Vector::Zero(m_);
    bool any_infeasible = false;
    for (int i = 0; i < m_; ++i) {
      const int j = basic_[i];
      if (x_(j) < lb_[j] - kFeasTol) {
        g(i) = -1.0;
        any_infeasible = true;
      } else if (x_(j) > ub_[j] + kFeasTol) {
        g(i) = 1.0;
        any_infeasible = true;
      } else if (!phase1) {
        g(i) = cost_[j];
      }
    }
    if (phase1 && !any_infeasible) return StepResult::NoEntering;

    Vector y = btran(g);

    int enter = -1;
    Real best_score = 0.0;
    int enter_dir = 0;
    for (int j = 0; j < n_total_; ++j) {
      if (vstat_[j] == VStat::Basic) continue;
      if (ub_[j] - lb_[j] <= 0.0) continue;  // fixed
      const Real cj = phase1 ? 0.0 : cost_[j];
      const Real d = cj - column_dot(j, y);
      int dir = 0;
      if (vstat_[j] == VStat::AtLower && d < -kDualTol) dir = +1;
      else if (vstat_[j] == VStat::AtUpper && d > kDualTol) dir = -1;
      else if (vstat_[j] == VStat::Free && std::abs(d) > kDualTol) dir = d < 0.0 ? +1 : -1;
      if (dir == 0) continue;
      if (bland) {
        enter = j;
        enter_dir = dir;
        break;
      }
      const Real score = std::abs(d);
      if (score > best_score) {
        best_score = score;
        enter = j;
        enter_dir = dir;
      }
    }
    if (enter < 0) return StepResult::NoEntering;

    // Direction through the basis.
    Vector a_q = Vector::Zero(m_);
    {
      const SparseCol& c = cols_[enter];
      for (size_t k = 0; k < c.idx.size(); ++k) a_q(c.idx[k]) = c.val[k];
    }
    Vector w = ftran(a_q);
    const Real sigma = static_cast<Real>(enter_dir);

    // Ratio test: first event among basic bound hits and the entering
    // variable's own opposite bound.
    Real t_best = kInf;
    int leave_pos = -1;
    Real leave_target = 0.0;
    VStat leave_stat = VStat::AtLower;
    Real best_piv = 0.0;

    for (int i = 0; i < m_; ++i) {
      const Real wi = w(i);
      if (std::abs(wi) <= kPivTol) continue;
      const int j = basic_[i];
      const Real delta = -sigma * wi;  // rate of change of x_B(i)
      const Real v = x_(j);
      Real t = kInf;
      Real target = 0.0;
      VStat stat = VStat::AtLower;
      if (v < lb_[j] - kFeasTol) {
        if (delta > 0.0) {
          t = (lb_[j] - v) / delta;
          target = lb_[j];
          stat = VStat::AtLower;
        }
      } else if (v > ub_[j] + kFeasTol) {
        if (delta < 0.0) {
          t = (ub_[j] - v) / delta;
          target = ub_[j];
          stat = VStat::AtUpper;
        }
      } else if (delta > 0.0 && std::isfinite(ub_[j])) {
        t = (ub_[j] - v) / delta;
        target = ub_[j];
        stat = VStat::AtUpper;
      } else if (delta < 0.0 && std::isfinite(lb_[j])) {
        t = (lb_[j] - v) / delta;
        target = lb_[j];
        stat = VStat::AtLower;
      }
      if (t == kInf) continue;
      if (t < 0.0) t = 0.0;
      const bool better =
          t < t_best - 1e-12 ||
          (t <= t_best + 1e-12 &&
           (bland ? (leave_pos >= 0 && basic_[i] < basic_[leave_pos])
                  : std::abs(wi) > best_piv));
      if (leave_pos < 0 ? t < t_best : better) {
        t_best = t;
        leave_pos = i;
        leave_target = target;
        leave_stat = stat;
        best_piv = std::abs(wi);
      }
    }

    Real t_flip = kInf;
    if (std::isfinite(lb_[enter]) && std::isfinite(ub_[enter])) t_flip = ub_[enter] - lb_[enter];

    if (t_best == kInf && t_flip == kInf) {
      // No blocking event: unbounded in phase 2, numerical trouble in phase 1
      // (a strictly improving composite direction always meets an event).
      return phase1 ? StepResult::NumericalRetry : StepResult::Unbounded;
    }

    if (t_flip <= t_best) {
      for (int i = 0; i < m_; ++i) {
        const int j = basic_[i];
        x_(j) -= t_flip * sigma * w(i);
      }
      vstat_[enter] = enter_dir > 0 ? VStat::AtUpper : VStat::AtLower;
      x_(enter) = enter_dir > 0 ? ub_[enter] : lb_[enter];
      return StepResult::Pivoted;
    }

    const Real piv = w(leave_pos);
    if (std::abs(piv) <= kPivTol) return StepResult::NumericalRetry;

    for (int i = 0; i < m_; ++i) {
      const int j = basic_[i];
      x_(j) -= t_best * sigma * w(i);
    }
    const int leaving = basic_[leave_pos];
    x_(leaving) = leave_target;
    vstat_[leaving] = leave_stat;
    basic_pos_[leaving] = -1;

    x_(enter) += sigma * t_best;
    vstat_[enter] = VStat::Basic;
    basic_[leave_pos] = enter;
    basic_pos_[enter] = leave_pos;

    Eta e;
    e.r = leave_pos;
    e.wr = piv;
    for (int i = 0; i < m_; ++i) {
      if (i != leave_pos && std::abs(w(i)) > 1e-13) e.off.emplace_back(i, w(i));
    }
    etas_.push_back(std::move(e));

    if (static_cast<int>(etas_.size()) >= kRefactorEvery) {
      if (!refactor()) {
        reset_to_slack_basis();
        refactor();
      }
    }
    return StepResult::Pivoted;
  }

  LpStatus run(std::int64_t max_iters, std::int64_t& used) {
    if (m_ == 0) return solve_unconstrained();

    if (!factor_valid_) {
      if (!refactor()) {
        reset_to_slack_basis();
        if (!refactor()) return LpStatus::Infeasible;
      }
    } else {
      recompute_basics();
    }

    for (int restart = 0; restart < 3; ++restart) {
      const LpStatus p1 = run_phase(true, max_iters, used);
      if (p1 != LpStatus::Optimal) return p1;
      const LpStatus p2 = run_phase(false, max_iters, used);
      if (p2 == LpStatus::Infeasible) {
        // Phase 2 noticed accumulated drift; refactor and go around again.
        if (!refactor()) {
          reset_to_slack_basis();
          refactor();
        }
        continue;
      }
      return p2;
    }
    return LpStatus::Infeasible;
  }

  // Runs one phase to its optimum. In phase 1 "Optimal" means primal
  // feasibility was reached; "Infeasible" in phase 2 signals drift back out
  // of the box (the caller restarts the composite phase).
  LpStatus run_phase(bool phase1, std::int64_t max_iters, std::int64_t& used) {
    bool bland = false;
    int stall = 0;
    Real last_metric = kInf;
    int retries = 0;

    for (;;) {
      if (used >= max_iters) return LpStatus::IterLimit;
      const Real infeas = total_infeasibility();
      if (phase1 && infeas <= kFeasTol) return LpStatus::Optimal;
      if (!phase1 && infeas > 10.0 * kFeasTol) return LpStatus::Infeasible;

      const Real metric = phase1 ? infeas : objective();
      if (metric < last_metric - 1e-12 * (1.0 + std::abs(last_metric))) {
        stall = 0;
        bland = false;
      } else if (++stall > kStallLimit) {
        bland = true;
      }
      last_metric = metric;

      const StepResult r = step(phase1, bland);
      ++used;
      if (r == StepResult::Pivoted) {
        retries = 0;
        continue;
      }
      if (r == StepResult::NumericalRetry) {
        if (++retries > 3) return LpStatus::Infeasible;
        if (!refactor()) {
          reset_to_slack_basis();
          refactor();
        }
        continue;
      }
      if (r == StepResult::Unbounded) return LpStatus::Unbounded;
      // NoEntering: current phase is at its optimum.
      if (phase1) return total_infeasibility() > kFeasTol ? LpStatus::Infeasible : LpStatus::Optimal;
      return LpStatus::Optimal;
    }
  }

  LpStatus solve_unconstrained() {
    for (int j = 0; j < n_struct_; ++j) {
      if (cost_[j] > 0.0) {
        if (!std::isfinite(lb_[j])) return LpStatus::Unbounded;
        x_(j) = lb_[j];
      } else if (cost_[j] < 0.0) {
        if (!std::isfinite(ub_[j])) return LpStatus::Unbounded;
        x_(j) = ub_[j];
      } else {
        x_(j) = std::isfinite(lb_[j]) ? lb_[j] : (std::isfinite(ub_[j]) ? ub_[j] : 0.0);
      }
    }
    return LpStatus::Optimal;
  }

  int n_struct_ = 0;
  int m_ = 0;
  int n_total_ = 0;
  std::vector<SparseCol> cols_;
  std::vector<Real> lb_, ub_, cost_, rhs_;

  std::vector<int> basic_;
  std::vector<int> basic_pos_;
  std::vector<VStat> vstat_;
  Vector x_;

  // adjoint() is a non-const accessor in Eigen's SparseLU; the solve itself
  // does not mutate the factorization.
  mutable Eigen::SparseLU<Eigen::SparseMatrix<Real>> lu_;
  std::vector<Eta> etas_;
  bool factor_valid_ = false;
};

Vector extract_structurals(const Simplex& spx, int n) {
  Vector v(n);
  for (int j = 0; j < n; ++j) {
    Real x = spx.value(j);
    if (std::abs(x) < 1e-11) x = 0.0;
    v(j) = x;
  }
  return v;
}

}  // namespace

Solution solve_lp(const Problem& p) {
  p.validate();
  Solution sol;
  Simplex spx(p);
  std::int64_t used = 0;
  const LpStatus st = spx.solve(1000000, &used);
  sol.stats.lp_iterations = used;
  switch (st) {
    case LpStatus::Optimal:
      sol.status = SolveStatus::Optimal;
      sol.has_values = true;
      sol.values = extract_structurals(spx, p.num_variables());
      sol.objective = spx.objective();
      sol.stats.best_bound = sol.objective;
      break;
    case LpStatus::Infeasible:
      sol.status = SolveStatus::Infeasible;
      break;
    case LpStatus::Unbounded:
      sol.status = SolveStatus::Unbounded;
      break;
    case LpStatus::IterLimit:
      sol.status = SolveStatus::TimeLimitIncumbent;
      break;
  }
  return sol;
}

namespace {

struct BnbNode {
  Real bound = -kInf;
  int depth = 0;
  std::int64_t seq = 0;
  std::vector<std::pair<int, int>> fixings;  // (column, 0/1)
  std::shared_ptr<const Basis> basis;
};

struct BnbNodeOrder {
  bool operator()(const BnbNode& a, const BnbNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    if (a.depth != b.depth) return a.depth < b.depth;  // dive through plateaus
    return a.seq > b.seq;
  }
};

}  // namespace

Solution solve_milp(const Problem& p, const SolverOptions& opts) {
  p.validate();

  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed = [&t_start]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  };

  std::vector<int> binaries;
  for (int j = 0; j < p.num_variables(); ++j) {
    if (p.variables()[j].is_binary) binaries.push_back(j);
  }

  Simplex spx(p);
  Solution sol;
  std::int64_t iters_total = 0;
  std::int64_t nodes = 0;

  Vector inc_values;
  Real inc_obj = kInf;
  bool have_inc = false;
  Real best_bound = -kInf;
  bool budget_hit = false;

  auto apply_node = [&](const std::vector<std::pair<int, int>>& fixings) {
    for (int j : binaries) {
      spx.set_variable_bounds(j, p.variables()[j].lb, p.variables()[j].ub);
    }
    for (const auto& [col, val] : fixings) {
      spx.set_variable_bounds(col, static_cast<Real>(val), static_cast<Real>(val));
    }
  };

  auto solve_node_lp = [&](LpStatus& st) {
    const std::int64_t left = opts.iteration_budget - iters_total;
    std::int64_t used = 0;
    st = spx.solve(std::max<std::int64_t>(left, 1), &used);
    iters_total += used;
  };

  auto integrality = [&](Real& worst_frac, int& worst_col) {
    worst_frac = 0.0;
    worst_col = -1;
    for (int j : binaries) {
      const Real x = spx.value(j);
      const Real frac = std::abs(x - std::round(x));
      // Most fractional: largest distance to the nearest integer.
      if (frac > worst_frac + 1e-15) {
        worst_frac = frac;
        worst_col = j;
      }
    }
  };

  auto try_incumbent = [&](Real obj) {
    if (obj < inc_obj - 1e-12 * (1.0 + std::abs(obj))) {
      inc_obj = obj;
      inc_values = extract_structurals(spx, p.num_variables());
      have_inc = true;
      if (opts.on_progress) opts.on_progress(best_bound, inc_obj);
    }
  };

  // Diving heuristic: repeatedly round the most fractional binary and
  // re-solve the relaxation, flipping a rounding once when it turns the
  // subproblem infeasible. Warm starts make each dive step a handful of
  // pivots, and a completed dive seeds the incumbent.
  auto dive_heuristic = [&](std::vector<std::pair<int, int>> fixings) {
    std::vector<bool> fixed(p.num_variables(), false);
    for (const auto& [col, val] : fixings) fixed[col] = true;
    for (size_t guard = 0; guard <= binaries.size(); ++guard) {
      int worst_col = -1;
      Real worst_frac = 0.0;
      for (int j : binaries) {
        if (fixed[j]) continue;
        const Real x = spx.value(j);
        const Real frac = std::abs(x - std::round(x));
        if (frac > worst_frac + 1e-15) {
          worst_frac = frac;
          worst_col = j;
        }
      }
      if (worst_frac <= opts.integrality_tol) {
        // Remaining binaries sit at integers; pin them and accept.
        for (int j : binaries) {
          if (!fixed[j]) {
            fixings.emplace_back(j, spx.value(j) >= 0.5 ? 1 : 0);
            fixed[j] = true;
          }
        }
        apply_node(fixings);
        LpStatus st;
        solve_node_lp(st);
        if (st == LpStatus::Optimal) try_incumbent(spx.objective());
        return;
      }
      const int rounded = spx.value(worst_col) >= 0.5 ? 1 : 0;
      fixings.emplace_back(worst_col, rounded);
      fixed[worst_col] = true;
      apply_node(fixings);
      LpStatus st;
      solve_node_lp(st);
      if (st == LpStatus::IterLimit) return;
      if (st != LpStatus::Optimal) {
        fixings.back().second = 1 - rounded;
        apply_node(fixings);
        solve_node_lp(st);
        if (st != LpStatus::Optimal) return;  // both sides failed, abandon dive
      }
      if (have_inc && spx.objective() >= inc_obj - opts.gap_tol * (1.0 + std::abs(inc_obj))) {
        return;  // dive can no longer improve
      }
    }
  };

  std::priority_queue<BnbNode, std::vector<BnbNode>, BnbNodeOrder> queue;
  std::int64_t seq = 0;
  {
    BnbNode root;
    root.bound = -kInf;
    root.seq = seq++;
    queue.push(root);
  }

  bool root_unbounded = false;

  while (!queue.empty()) {
    if (nodes >= opts.node_limit || iters_total >= opts.iteration_budget ||
        elapsed() > opts.time_limit_s) {
      budget_hit = true;
      break;
    }
    BnbNode node = queue.top();
    queue.pop();
    if (node.bound > best_bound) best_bound = node.bound;
    if (have_inc && node.bound >= inc_obj - opts.gap_tol * (1.0 + std::abs(inc_obj))) {
      // Best-first order: every remaining node is at least as bad.
      best_bound = inc_obj;
      break;
    }
    if (opts.early_stop_gap > 0.0 && have_inc && std::isfinite(node.bound) &&
        inc_obj - node.bound <= opts.early_stop_gap * (1.0 + std::abs(inc_obj))) {
      budget_hit = true;  // incumbent good enough, reported as such
      break;
    }
    ++nodes;

    apply_node(node.fixings);
    if (node.basis) {
      spx.load_basis(*node.basis);
    } else if (nodes > 1) {
      spx.reset_to_slack_basis();
    }

    LpStatus st;
    solve_node_lp(st);
    if (st == LpStatus::IterLimit) {
      budget_hit = true;
      break;
    }
    if (st == LpStatus::Infeasible) continue;
    if (st == LpStatus::Unbounded) {
      if (node.fixings.empty()) root_unbounded = true;
      else root_unbounded = true;  // region within the binary lattice is unbounded
      break;
    }

    const Real obj = spx.objective();
    if (have_inc && obj >= inc_obj - opts.gap_tol * (1.0 + std::abs(inc_obj))) continue;

    Real worst_frac = 0.0;
    int branch_col = -1;
    integrality(worst_frac, branch_col);
    if (worst_frac <= opts.integrality_tol) {
      try_incumbent(obj);
      if (opts.on_progress) opts.on_progress(best_bound, have_inc ? inc_obj : kInf);
      continue;
    }

    auto basis = std::make_shared<const Basis>(spx.save_basis());
    if (node.fixings.empty() || (!have_inc && nodes % 16 == 0) || nodes % 256 == 0) {
      dive_heuristic(node.fixings);
    }

    for (int v = 0; v <= 1; ++v) {
      BnbNode child;
      child.bound = obj;
      child.depth = node.depth + 1;
      child.seq = seq++;
      child.fixings = node.fixings;
      child.fixings.emplace_back(branch_col, v);
      child.basis = basis;
      queue.push(child);
    }
    if (opts.on_progress) opts.on_progress(best_bound, have_inc ? inc_obj : kInf);
  }

  sol.stats.lp_iterations = iters_total;
  sol.stats.nodes = nodes;
  sol.stats.wall_seconds = elapsed();

  if (root_unbounded && !have_inc) {
    sol.status = SolveStatus::Unbounded;
    return sol;
  }

  if (!budget_hit && queue.empty()) {
    if (have_inc) {
      sol.status = SolveStatus::Optimal;
      sol.has_values = true;
      sol.values = inc_values;
      sol.objective = inc_obj;
      sol.stats.best_bound = inc_obj;
      sol.stats.gap = 0.0;
    } else {
      sol.status = SolveStatus::Infeasible;
    }
    return sol;
  }

  if (have_inc && !budget_hit) {
    // Left the loop through the bound test: proven optimal within gap_tol.
    sol.status = SolveStatus::Optimal;
    sol.has_values = true;
    sol.values = inc_values;
    sol.objective = inc_obj;
    sol.stats.best_bound = best_bound;
    sol.stats.gap = std::max(Real(0), inc_obj - best_bound);
    return sol;
  }

  sol.status = SolveStatus::TimeLimitIncumbent;
  if (have_inc) {
    sol.has_values = true;
    sol.values = inc_values;
    sol.objective = inc_obj;
    sol.stats.best_bound = best_bound;
    sol.stats.gap = inc_obj - best_bound;
  }
  return sol;
}

FeasibilityReport verify_solution(const Problem& p, const Vector& values, Real tol) {
  FeasibilityReport rep;
  if (values.size() != p.num_variables()) {
    rep.detail = "value vector size mismatch";
    return rep;
  }
  std::ostringstream detail;
  for (int j = 0; j < p.num_variables(); ++j) {
    const Variable& v = p.variables()[j];
    Real viol = 0.0;
    if (values(j) < v.lb) viol = v.lb - values(j);
    if (values(j) > v.ub) viol = std::max(viol, values(j) - v.ub);
    if (viol > rep.max_bound_violation) {
      rep.max_bound_violation = viol;
      if (viol > tol) detail << "bound violation " << viol << " on " << v.name << "; ";
    }
    if (v.is_binary) {
      const Real frac = std::abs(values(j) - std::round(values(j)));
      if (frac > rep.max_integrality_violation) {
        rep.max_integrality_violation = frac;
        if (frac > tol) detail << "fractional binary " << v.name << " = " << values(j) << "; ";
      }
    }
  }
  for (const auto& row : p.rows()) {
    Real activity = 0.0;
    for (const auto& [col, coeff] : row.terms) activity += coeff * values(col);
    Real viol = 0.0;
    switch (row.rel) {
      case Relation::LessEqual: viol = activity - row.rhs; break;
      case Relation::GreaterEqual: viol = row.rhs - activity; break;
      case Relation::Equal: viol = std::abs(activity - row.rhs); break;
    }
    if (viol > rep.max_row_violation) {
      rep.max_row_violation = viol;
      if (viol > tol) detail << "row '" << row.name << "' violated by " << viol << "; ";
    }
  }
  rep.ok = rep.max_row_violation <= tol && rep.max_bound_violation <= tol &&
           rep.max_integrality_violation <= tol;
  rep.detail = detail.str();
  return rep;
}

void write_problem(const Problem& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("milp: cannot open " + path + " for writing");
  out << std::setprecision(17);
  out << "# minimize\n";
  for (int j = 0; j < p.num_variables(); ++j) {
    const Variable& v = p.variables()[j];
    out << "var " << v.name << ' ' << v.lb << ' ' << v.ub << ' ' << (v.is_binary ? 1 : 0) << ' '
        << p.objective()[j] << '\n';
  }
  for (const auto& row : p.rows()) {
    out << "row " << (row.name.empty() ? "-" : row.name) << ' ';
    switch (row.rel) {
      case Relation::LessEqual: out << "<="; break;
      case Relation::Equal: out << "=="; break;
      case Relation::GreaterEqual: out << ">="; break;
    }
    out << ' ' << row.rhs;
    for (const auto& [col, coeff] : row.terms) out << ' ' << col << ':' << coeff;
    out << '\n';
  }
}

}  // namespace bems::milp
