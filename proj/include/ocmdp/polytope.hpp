#pragma once

#include <string>
#include <vector>

#include "ocmdp/cmdp.hpp"

namespace ocmdp {

struct LinearRow {
  std::vector<double> coeffs;  // dense over the polytope's variables
  double rhs = 0.0;
  std::string label;
};

// Per-(x,a) L1 confidence block.  Each successor triple gets one auxiliary
// variable s >= |q(x,a,x') - phat(x')*q(x,a)| and the block carries the
// budget sum_{x'} s <= eps * q(x,a).
struct ConfidenceBlock {
  int pair = 0;
  int first_triple = 0;
  int n_succ = 0;
  int first_aux = 0;  // variable index of the block's first s
  std::vector<double> phat;
  double eps = 0.0;
};

/// Linear representation of the set of valid occupancy measures, either for
/// a fixed kernel (exact mode: q(x,a,x') = P(x'|x,a) q(x,a)) or for an L1
/// confidence ball around an empirical kernel (confidence mode, linearized
/// with one auxiliary variable per triple).
///
/// Variables are [q (total_triples), s (num_aux)].  All variables are
/// nonnegative; q also has the upper bound 1, which is implied by the layer
/// normalization and kept only as box data for the projection solver.
struct OccupancyPolytope {
  LayerLayout shape;
  int num_q = 0;
  int num_aux = 0;
  bool exact_mode = true;
  std::vector<LinearRow> equalities;
  std::vector<LinearRow> inequalities;
  std::vector<ConfidenceBlock> blocks;

  int num_vars() const { return num_q + num_aux; }
};

// Normalization + flow-conservation rows over q only; the validity
// conditions shared by both modes.
std::vector<LinearRow> occupancy_flow_rows(const LayerLayout& shape);

OccupancyPolytope build_exact_polytope(const LayerLayout& shape,
                                       const std::vector<double>& kernel);

// eps_pairs is clamped to 2 (the L1 diameter of the simplex) before rows are
// built; blocks whose clamped radius is >= 2 are vacuous and dropped.
OccupancyPolytope build_confidence_polytope(const LayerLayout& shape,
                                            const std::vector<double>& phat_triples,
                                            const std::vector<double>& eps_pairs);

inline constexpr double kEpsilonClamp = 2.0;

// Extend a q-point with the natural values of the auxiliary variables
// (s = |q - phat*q(x,a)|), giving a full variable vector.
std::vector<double> lift_point(const OccupancyPolytope& poly,
                               const std::vector<double>& q);

// Max constraint violation of a q-point against the polytope's defining
// data (equalities, inequalities under the natural lift, and the box).
double membership_residual(const OccupancyPolytope& poly,
                           const std::vector<double>& q);

inline bool contains(const OccupancyPolytope& poly, const std::vector<double>& q,
                     double tol) {
  return membership_residual(poly, q) <= tol;
}

}  // namespace ocmdp
