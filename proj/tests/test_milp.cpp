#include <doctest.h>

#include <cmath>
#include <fstream>
#include <optional>
#include <vector>

#include "bems/milp.hpp"
#include "bems/rng.hpp"

using namespace bems;
using namespace bems::milp;

namespace {

// ---------------------------------------------------------------------------
// Independent oracle: a classical dense Big-M tableau simplex over x >= 0
// with bounds supplied as explicit rows. Deliberately naive (full tableau,
// Bland's rule) so it shares nothing with the production solver.
// ---------------------------------------------------------------------------

struct OracleRow {
  std::vector<Real> a;
  Relation rel;
  Real rhs;
};

std::optional<Real> tableau_solve(int n, std::vector<OracleRow> rows, std::vector<Real> cost) {
  const int m = static_cast<int>(rows.size());
  for (auto& r : rows) {
    if (r.rhs < 0.0) {
      for (auto& v : r.a) v = -v;
      r.rhs = -r.rhs;
      r.rel = r.rel == Relation::LessEqual
                  ? Relation::GreaterEqual
                  : (r.rel == Relation::GreaterEqual ? Relation::LessEqual : Relation::Equal);
    }
  }
  int n_slack = 0, n_art = 0;
  for (const auto& r : rows) {
    if (r.rel != Relation::Equal) ++n_slack;
    if (r.rel != Relation::LessEqual) ++n_art;
  }
  const int width = n + n_slack + n_art;
  const int art_begin = n + n_slack;
  Matrix t = Matrix::Zero(m + 1, width + 1);
  std::vector<int> basis(m, -1);
  int s_at = n, a_at = art_begin;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) t(i, j) = rows[i].a[j];
    t(i, width) = rows[i].rhs;
    if (rows[i].rel == Relation::LessEqual) {
      t(i, s_at) = 1.0;
      basis[i] = s_at++;
    } else if (rows[i].rel == Relation::GreaterEqual) {
      t(i, s_at) = -1.0;
      ++s_at;
      t(i, a_at) = 1.0;
      basis[i] = a_at++;
    } else {
      t(i, a_at) = 1.0;
      basis[i] = a_at++;
    }
  }

  auto iterate = [&](bool allow_artificials) -> bool {
    for (int iter = 0; iter < 50000; ++iter) {
      int enter = -1;
      const int scan = allow_artificials ? width : art_begin;
      for (int j = 0; j < scan; ++j) {  // Bland: first improving column
        if (t(m, j) < -1e-9) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      Real best = 0.0;
      for (int i = 0; i < m; ++i) {
        if (t(i, enter) > 1e-9) {
          const Real ratio = t(i, width) / t(i, enter);
          if (leave < 0 || ratio < best - 1e-12 ||
              (ratio < best + 1e-12 && basis[i] < basis[leave])) {
            leave = i;
            best = ratio;
          }
        }
      }
      if (leave < 0) return false;  // unbounded
      t.row(leave) /= t(leave, enter);
      for (int i = 0; i <= m; ++i) {
        if (i != leave && t(i, enter) != 0.0) t.row(i) -= t(i, enter) * t.row(leave);
      }
      basis[leave] = enter;
    }
    return false;
  };

  // Phase 1: drive the artificials to zero under their own objective.
  for (int j = art_begin; j < width; ++j) t(m, j) = 1.0;
  for (int i = 0; i < m; ++i) {
    if (basis[i] >= art_begin) t.row(m) -= t.row(i);
  }
  if (!iterate(true)) return std::nullopt;
  if (-t(m, width) > 1e-7) return std::nullopt;  // infeasible

  // Pivot any degenerate artificial out of the basis where possible.
  for (int i = 0; i < m; ++i) {
    if (basis[i] < art_begin) continue;
    for (int j = 0; j < art_begin; ++j) {
      if (std::abs(t(i, j)) > 1e-9) {
        t.row(i) /= t(i, j);
        for (int k = 0; k <= m; ++k) {
          if (k != i && t(k, j) != 0.0) t.row(k) -= t(k, j) * t.row(i);
        }
        basis[i] = j;
        break;
      }
    }
  }

  // Phase 2: real objective, artificial columns barred from entering.
  t.row(m).setZero();
  for (int j = 0; j < n; ++j) t(m, j) = cost[j];
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n && cost[basis[i]] != 0.0) t.row(m) -= cost[basis[i]] * t.row(i);
  }
  if (!iterate(false)) return std::nullopt;
  return -t(m, width);
}

struct RandomLp {
  Problem problem;
  int n = 0;
  std::vector<OracleRow> oracle_rows;
  std::vector<Real> cost;
};

// Feasible-by-construction instance: a random interior point sets the right
// hand sides. Bounds become oracle rows so the oracle stays an x >= 0 method.
RandomLp make_random_lp(Rng& rng, int n, int m, int n_binary = 0) {
  RandomLp lp;
  lp.n = n;
  std::vector<Real> x0(n), ub(n);
  for (int j = 0; j < n; ++j) {
    const bool bin = j < n_binary;
    ub[j] = bin ? 1.0 : rng.uniform(2.0, 8.0);
    x0[j] = bin ? (rng.uniform() < 0.5 ? 0.0 : 1.0) : rng.uniform(0.0, ub[j]);
    lp.problem.add_variable("x" + std::to_string(j), 0.0, ub[j], bin);
    lp.cost.push_back(rng.uniform(-5.0, 5.0));
    lp.problem.add_objective_term(j, lp.cost.back());
    OracleRow bound;
    bound.a.assign(n, 0.0);
    bound.a[j] = 1.0;
    bound.rel = Relation::LessEqual;
    bound.rhs = ub[j];
    lp.oracle_rows.push_back(bound);
  }
  for (int i = 0; i < m; ++i) {
    OracleRow row;
    row.a.assign(n, 0.0);
    std::vector<std::pair<int, Real>> terms;
    Real activity = 0.0;
    for (int j = 0; j < n; ++j) {
      if (rng.uniform() < 0.45) {
        const Real coeff = rng.uniform(-4.0, 4.0);
        row.a[j] = coeff;
        terms.emplace_back(j, coeff);
        activity += coeff * x0[j];
      }
    }
    if (terms.empty()) continue;
    const Real pick = rng.uniform();
    if (pick < 0.4) {
      row.rel = Relation::LessEqual;
      row.rhs = activity + rng.uniform(0.1, 3.0);
    } else if (pick < 0.8) {
      row.rel = Relation::GreaterEqual;
      row.rhs = activity - rng.uniform(0.1, 3.0);
    } else {
      row.rel = Relation::Equal;
      row.rhs = activity;
    }
    lp.problem.add_constraint(terms, row.rel, row.rhs, "r" + std::to_string(i));
    lp.oracle_rows.push_back(row);
  }
  return lp;
}

// Exhaustive enumeration over binary fixings, each reduced to an LP.
std::optional<Real> enumerate_milp(const Problem& p) {
  std::vector<int> binaries;
  for (int j = 0; j < p.num_variables(); ++j) {
    if (p.variables()[j].is_binary) binaries.push_back(j);
  }
  const int nb = static_cast<int>(binaries.size());
  std::optional<Real> best;
  for (int mask = 0; mask < (1 << nb); ++mask) {
    Problem fixed = p;
    // Rebuild with pinned bounds.
    Problem q;
    for (int j = 0; j < p.num_variables(); ++j) {
      const Variable& v = p.variables()[j];
      Real lb = v.lb, ub = v.ub;
      for (int k = 0; k < nb; ++k) {
        if (binaries[k] == j) lb = ub = ((mask >> k) & 1) ? 1.0 : 0.0;
      }
      q.add_variable(v.name, lb, ub, false);
      q.add_objective_term(j, p.objective()[j]);
    }
    for (const auto& row : p.rows()) q.add_constraint(row.terms, row.rel, row.rhs, row.name);
    const Solution s = solve_lp(q);
    if (s.status == SolveStatus::Optimal) {
      if (!best || s.objective < *best) best = s.objective;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("textbook one-variable LP") {
  Problem p;
  const int x = p.add_variable("x", 0.0, 10.0);
  p.add_objective_term(x, 1.0);
  p.add_constraint({{x, 1.0}}, Relation::GreaterEqual, 3.0);
  const Solution s = solve_lp(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.values(x) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(s.objective == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("facet optimum of a two-variable LP") {
  Problem p;
  const int x = p.add_variable("x", 0.0, 1.0);
  const int y = p.add_variable("y", 0.0, 1.0);
  p.add_objective_term(x, -1.0);
  p.add_objective_term(y, -1.0);
  p.add_constraint({{x, 1.0}, {y, 1.0}}, Relation::LessEqual, 1.0);
  const Solution s = solve_lp(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.objective == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(s.values(x) + s.values(y) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("contradictory constraints are infeasible") {
  Problem p;
  const int x = p.add_variable("x", 0.0, 10.0);
  p.add_constraint({{x, 1.0}}, Relation::GreaterEqual, 1.0);
  p.add_constraint({{x, 1.0}}, Relation::LessEqual, 0.0);
  CHECK(solve_lp(p).status == SolveStatus::Infeasible);
  CHECK(solve_milp(p).status == SolveStatus::Infeasible);
}

TEST_CASE("missing upper bound with improving direction is unbounded") {
  Problem p;
  const int x = p.add_variable("x", 0.0, std::numeric_limits<Real>::infinity());
  p.add_objective_term(x, -1.0);
  p.add_constraint({{x, 1.0}}, Relation::GreaterEqual, 1.0);
  CHECK(solve_lp(p).status == SolveStatus::Unbounded);
}

TEST_CASE("malformed problems are rejected before solving") {
  Problem nan_coeff;
  const int x = nan_coeff.add_variable("x", 0.0, 1.0);
  nan_coeff.add_constraint({{x, std::nan("")}}, Relation::LessEqual, 1.0);
  CHECK_THROWS(solve_lp(nan_coeff));

  Problem bad_index;
  bad_index.add_variable("x", 0.0, 1.0);
  bad_index.add_constraint({{5, 1.0}}, Relation::LessEqual, 1.0);
  CHECK_THROWS(solve_lp(bad_index));

  Problem bad_binary;
  bad_binary.add_variable("b", -1.0, 1.0, true);
  CHECK_THROWS(solve_milp(bad_binary));

  Problem empty_interval;
  empty_interval.add_variable("x", 2.0, 1.0);
  CHECK_THROWS(solve_lp(empty_interval));
}

TEST_CASE("integral relaxation solves at the root") {
  Problem p;
  const int b0 = p.add_binary("b0");
  const int b1 = p.add_binary("b1");
  p.add_objective_term(b0, 1.0);
  p.add_objective_term(b1, 2.0);
  p.add_constraint({{b0, 1.0}, {b1, 1.0}}, Relation::GreaterEqual, 1.0);
  const Solution s = solve_milp(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s.stats.nodes <= 1);  // relaxation already integral
}

TEST_CASE("random LPs agree with the dense tableau oracle") {
  Rng rng(101);
  int solved = 0;
  for (int i = 0; i < 100; ++i) {
    const int n = 3 + static_cast<int>(rng.below(28));
    const int m = 2 + static_cast<int>(rng.below(12));
    RandomLp lp = make_random_lp(rng, n, m);
    const Solution mine = solve_lp(lp.problem);
    const std::optional<Real> oracle = tableau_solve(lp.n, lp.oracle_rows, lp.cost);
    REQUIRE(mine.status == SolveStatus::Optimal);
    REQUIRE(oracle.has_value());
    CHECK(std::abs(mine.objective - *oracle) < 1e-8 * (1.0 + std::abs(*oracle)));
    const FeasibilityReport rep = verify_solution(lp.problem, mine.values, 1e-6);
    CHECK(rep.ok);
    ++solved;
  }
  CHECK(solved == 100);
}

TEST_CASE("random MILPs agree with exhaustive enumeration") {
  Rng rng(202);
  for (int i = 0; i < 20; ++i) {
    const int nb = 2 + static_cast<int>(rng.below(5));
    const int nc = 3 + static_cast<int>(rng.below(10));
    RandomLp lp = make_random_lp(rng, nb + nc, 4 + static_cast<int>(rng.below(6)), nb);
    const Solution mine = solve_milp(lp.problem);
    const std::optional<Real> oracle = enumerate_milp(lp.problem);
    REQUIRE(oracle.has_value());
    REQUIRE(mine.status == SolveStatus::Optimal);
    CHECK(std::abs(mine.objective - *oracle) < 1e-6 * (1.0 + std::abs(*oracle)));
    const FeasibilityReport rep = verify_solution(lp.problem, mine.values, 1e-6);
    CHECK(rep.ok);
  }
}

TEST_CASE("branch-and-bound bounds are monotone and the gap closes") {
  Rng rng(303);
  RandomLp lp = make_random_lp(rng, 14, 8, 6);
  SolverOptions opts;
  Real last_bound = -std::numeric_limits<Real>::infinity();
  Real last_inc = std::numeric_limits<Real>::infinity();
  bool monotone = true;
  opts.on_progress = [&](Real bound, Real inc) {
    if (bound < last_bound - 1e-9) monotone = false;
    if (inc > last_inc + 1e-9) monotone = false;
    last_bound = std::max(last_bound, bound);
    last_inc = std::min(last_inc, inc);
  };
  const Solution s = solve_milp(lp.problem, opts);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(monotone);
  CHECK(s.stats.gap <= 1e-6 * (1.0 + std::abs(s.objective)));
}

TEST_CASE("solves are deterministic") {
  Rng rng(404);
  RandomLp lp = make_random_lp(rng, 18, 9, 5);
  const Solution a = solve_milp(lp.problem);
  const Solution b = solve_milp(lp.problem);
  REQUIRE(a.status == SolveStatus::Optimal);
  REQUIRE(b.status == SolveStatus::Optimal);
  CHECK(a.objective == b.objective);
  REQUIRE(a.values.size() == b.values.size());
  for (int j = 0; j < a.values.size(); ++j) CHECK(a.values(j) == b.values(j));
}

TEST_CASE("problem dump lists variables and rows") {
  Problem p;
  const int x = p.add_variable("x", 0.0, 2.0);
  const int b = p.add_binary("b");
  p.add_objective_term(x, 1.5);
  p.add_constraint({{x, 1.0}, {b, -2.0}}, Relation::LessEqual, 1.0, "link");
  const std::string path = "/tmp/bems_milp_dump.txt";
  write_problem(p, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("var x 0 2 0 1.5") != std::string::npos);
  CHECK(text.find("var b 0 1 1 0") != std::string::npos);
  CHECK(text.find("row link <= 1") != std::string::npos);
}
