#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "bems/types.hpp"

namespace bems::milp {

enum class Relation { LessEqual, Equal, GreaterEqual };

struct Variable {
  std::string name;
  Real lb = 0.0;
  Real ub = 0.0;
  bool is_binary = false;
};

struct ConstraintRow {
  std::string name;
  std::vector<std::pair<int, Real>> terms;  // (column, coefficient)
  Relation rel = Relation::LessEqual;
  Real rhs = 0.0;
};

// Sparse minimization problem over bounded continuous and binary variables.
class Problem {
 public:
  int add_variable(const std::string& name, Real lb, Real ub, bool is_binary = false);
  int add_binary(const std::string& name) { return add_variable(name, 0.0, 1.0, true); }
  int add_constraint(std::vector<std::pair<int, Real>> terms, Relation rel, Real rhs,
                     const std::string& name = "");
  void add_objective_term(int col, Real coeff);

  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_constraints() const { return static_cast<int>(rows_.size()); }
  int num_binaries() const;

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<ConstraintRow>& rows() const { return rows_; }
  const std::vector<Real>& objective() const { return objective_; }

  void validate() const;  // throws std::invalid_argument on malformed content

 private:
  std::vector<Variable> variables_;
  std::vector<ConstraintRow> rows_;
  std::vector<Real> objective_;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, TimeLimitIncumbent };

const char* to_string(SolveStatus s);

struct SolveStats {
  std::int64_t lp_iterations = 0;
  std::int64_t nodes = 0;
  double wall_seconds = 0.0;
  Real best_bound = 0.0;
  Real gap = 0.0;
};

struct Solution {
  SolveStatus status = SolveStatus::Infeasible;
  bool has_values = false;
  Vector values;  // structural variables, present when has_values
  Real objective = 0.0;
  SolveStats stats;
};

struct SolverOptions {
  double time_limit_s = 20.0;          // wall-clock backstop
  std::int64_t node_limit = 200000;
  std::int64_t iteration_budget = 4000000;  // deterministic simplex-iteration cap
  std::uint64_t seed = 0;
  Real integrality_tol = 1e-6;
  Real gap_tol = 1e-6;
  // When positive, the search may stop once the relative incumbent-bound gap
  // drops below this value; the result is then reported as
  // TimeLimitIncumbent rather than Optimal.
  Real early_stop_gap = 0.0;
  // Optional trace of (best bound, incumbent objective) after each node.
  std::function<void(Real, Real)> on_progress;
};

// Solves the LP relaxation (binary markers ignored, their [0,1] bounds kept).
Solution solve_lp(const Problem& p);

// Best-first branch and bound over the binary variables. Branching picks the
// most fractional binary, lowest index on ties; a rounding heuristic seeds
// the incumbent at the root.
Solution solve_milp(const Problem& p, const SolverOptions& opts = {});

// Plain-arithmetic feasibility check, independent of the solver internals.
struct FeasibilityReport {
  bool ok = false;
  Real max_row_violation = 0.0;
  Real max_bound_violation = 0.0;
  Real max_integrality_violation = 0.0;
  std::string detail;
};

FeasibilityReport verify_solution(const Problem& p, const Vector& values, Real tol);

// Text dump, one constraint per line:
//   var <name> <lb> <ub> <binary> <objective-coefficient>
//   row <name> <relation> <rhs> <col>:<coeff> ...
void write_problem(const Problem& p, const std::string& path);

}  // namespace bems::milp
