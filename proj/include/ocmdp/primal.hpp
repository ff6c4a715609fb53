#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "ocmdp/confidence.hpp"
#include "ocmdp/polytope.hpp"
#include "ocmdp/projection.hpp"

namespace ocmdp {

// 5 |X| |A| / L.
double primal_step_constant(int num_states, int num_actions, int horizon);

// 1 / (lbar * C * sqrt(T)); an all-zero loss history falls back to lbar = 1.
double primal_step_size(double lbar, double C, long long T);

struct PrimalOptions {
  std::optional<double> step_constant;  // override for C
  double proj_tol = 1e-7;
  int proj_max_iters = 100000;
  // When set, the learner projects onto the exact polytope of this kernel
  // instead of tracking confidence sets (known-transitions ablation).
  std::optional<std::vector<double>> known_kernel;
};

struct PrimalUpdateInfo {
  bool epoch_changed = false;
  int epoch = 1;
  double eta = 0.0;
  double proj_residual = 0.0;
};

/// Projected-gradient occupancy learner over the current confidence
/// polytope, with the adaptive 1/(lbar C sqrt(T)) step size.  The iterate
/// starts uniform over each layer's triples; counters advance with every
/// observed trajectory and the polytope is rebuilt on epoch changes.
class PrimalPlayer {
 public:
  PrimalPlayer(const LayerLayout& shape, double delta, long long T,
               PrimalOptions opts = {});

  const std::vector<double>& occupancy() const { return qhat_; }
  const ConfidenceState& confidence() const { return conf_; }
  const OccupancyPolytope& polytope() const { return poly_; }
  double loss_sup() const { return lbar_; }
  double step_constant() const { return C_; }
  int epoch() const { return conf_.epoch; }

  PrimalUpdateInfo update(const std::vector<double>& loss_pairs,
                          const Trajectory& traj);

 private:
  void rebuild_polytope();

  LayerLayout shape_;
  long long T_;
  double C_;
  PrimalOptions opts_;
  ConfidenceState conf_;
  std::vector<double> qhat_;
  double lbar_ = 0.0;
  OccupancyPolytope poly_;
  std::unique_ptr<ProjectionEngine> engine_;
};

std::vector<double> uniform_occupancy(const LayerLayout& shape);

// sum_{t=t1..t2} loss_t' (q_t - comparator); losses are pair-indexed, the
// occupancies and the comparator live in triple space.  1-based window.
double interval_regret(const LayerLayout& shape,
                       const std::vector<std::vector<double>>& losses,
                       const std::vector<std::vector<double>>& occupancies,
                       const std::vector<double>& comparator, int t1, int t2);

}  // namespace ocmdp
