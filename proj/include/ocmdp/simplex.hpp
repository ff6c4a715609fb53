#pragma once

#include <vector>

#include "ocmdp/polytope.hpp"

namespace ocmdp {

enum class LpStatus { optimal, infeasible, unbounded_guard };

const char* to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  double optimum = 0.0;
  OccupancyMeasure argmax;
};

// Raw LP over nonnegative variables: max c'x s.t. Aeq x = beq, Ain x <= bin,
// x >= 0.  Rows may be rank-deficient; they are reduced internally.
struct LpProblem {
  int num_vars = 0;
  std::vector<LinearRow> equalities;
  std::vector<LinearRow> inequalities;
  std::vector<double> objective;
};

struct RawLpSolution {
  LpStatus status = LpStatus::infeasible;
  double value = 0.0;
  std::vector<double> x;
};

RawLpSolution lp_solve_max(const LpProblem& problem);

// max objective'q over the polytope intersected with extra inequality rows
// (rows given over q variables only; auxiliaries are appended internally).
LpSolution lp_maximize(const std::vector<double>& objective_q,
                       const OccupancyPolytope& poly,
                       const std::vector<LinearRow>& extra_ineq = {});

// Gaussian elimination to a full-rank row set; *consistent is cleared when a
// zero row with nonzero rhs shows up.
std::vector<LinearRow> reduce_equalities(const std::vector<LinearRow>& rows,
                                         int num_vars, bool* consistent);

}  // namespace ocmdp
