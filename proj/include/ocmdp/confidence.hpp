#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ocmdp/cmdp.hpp"

namespace ocmdp {

/// Visit counters and epoch bookkeeping for transition confidence sets.
///
/// Live counters advance every episode; the epoch-start snapshots feed the
/// empirical kernel and the L1 radii, so both stay constant within an epoch.
/// A new epoch starts as soon as some pair's live count reaches
/// max(1, 2 * snapshot).
struct ConfidenceState {
  LayerLayout shape;
  double delta = 0.1;
  long long T = 0;
  int epoch = 1;
  std::vector<long long> pair_start, pair_live;      // N_i and live N, per pair
  std::vector<long long> triple_start, triple_live;  // M_i and live M, per triple

  static ConfidenceState init(const LayerLayout& shape, double delta, long long T);

  // Returns true if the doubling trigger fired (epoch advanced and the
  // snapshots were refreshed from the live counters).
  bool record_trajectory(const Trajectory& traj);

  // sqrt(2 |X_{k+1}| ln(T|X||A|/delta) / max(1, N_i(x,a))), clamped to 2.
  double epsilon(int x, int a) const;
  double epsilon_raw(int x, int a) const;  // pre-clamp, for diagnostics

  // M_i / max(1, N_i); all-zero counts give the zero vector.
  std::vector<double> empirical_kernel(int x, int a) const;

  // Dense forms consumed by the polytope builder.
  std::vector<double> epsilon_pairs() const;
  std::vector<double> empirical_kernel_triples() const;

  std::string dump_json() const;
  static ConfidenceState load_json(const std::string& text);
};

}  // namespace ocmdp
