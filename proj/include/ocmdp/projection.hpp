#pragma once

#include <memory>
#include <vector>

#include "ocmdp/polytope.hpp"

namespace ocmdp {

struct ProjectionOptions {
  double tol = 1e-7;      // KKT residual target
  int max_iters = 100000;
  double sigma = 2.0;     // splitting penalty
  double relax = 1.7;     // over-relaxation factor
};

struct ProjectionResult {
  std::vector<double> q;  // projected point, q variables only
  double residual = 0.0;  // achieved KKT residual
  int iterations = 0;
};

/// Euclidean projection onto an occupancy polytope by operator splitting:
/// alternating an equality-constrained KKT solve (prefactorized once per
/// polytope) with a box projection, over-relaxed.  Warm-starts across calls,
/// which keeps the episode loop cheap; reset() clears the carried state.
///
/// Throws SolverError on an infeasible polytope (certified by an LP
/// feasibility phase) or on non-convergence, carrying the final residual.
class ProjectionEngine {
 public:
  explicit ProjectionEngine(const OccupancyPolytope& poly,
                            ProjectionOptions opts = {});
  ~ProjectionEngine();
  ProjectionEngine(ProjectionEngine&&) noexcept;
  ProjectionEngine& operator=(ProjectionEngine&&) noexcept;

  ProjectionResult project(const std::vector<double>& q0);
  void reset();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One-shot convenience; q0 lives in triple space.
OccupancyMeasure project(const std::vector<double>& q0,
                         const OccupancyPolytope& poly, double tol = 1e-7);

}  // namespace ocmdp
