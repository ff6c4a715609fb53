#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ocmdp {

// Tolerance used by all structural validation checks (kernel rows, occupancy
// normalization/flow, policy normalization).
inline constexpr double kValidationTol = 1e-9;

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& msg, double residual = 0.0)
      : std::runtime_error(msg), residual(residual) {}
  double residual;
};

/// Dense indexing for a layered (loop-free) state space.
///
/// States are numbered consecutively layer by layer: layer 0 holds state 0,
/// layer k holds the next layer_sizes[k] ids.  Every non-terminal state has
/// the same action set {0..num_actions-1}.  A "pair" is an (x,a) with x
/// non-terminal; a "triple" is an (x,a,x') with x' in the next layer.  Both
/// are stored densely, so occupancy measures, rewards and losses are flat
/// vectors.
struct LayerLayout {
  std::vector<std::vector<int>> layers;  // state ids per layer
  std::vector<int> layer_of;             // state -> layer
  std::vector<int> pos_in_layer;         // state -> offset within its layer
  int num_actions = 0;

  std::vector<int> pair_base;    // state -> first pair index (-1 for terminal)
  std::vector<int> triple_base;  // pair -> first triple index
  int total_pairs = 0;
  int total_triples = 0;

  LayerLayout() = default;
  LayerLayout(const std::vector<int>& layer_sizes, int num_actions);

  int horizon() const { return static_cast<int>(layers.size()) - 1; }
  int num_states() const { return static_cast<int>(layer_of.size()); }
  bool is_terminal(int x) const { return layer_of[x] == horizon(); }
  int pair_index(int x, int a) const { return pair_base[x] + a; }
  int triple_index(int x, int a, int x_next) const {
    return triple_base[pair_index(x, a)] + pos_in_layer[x_next];
  }
  // Number of successor states of x (size of the next layer).
  int succ_count(int x) const {
    return static_cast<int>(layers[layer_of[x] + 1].size());
  }

  bool operator==(const LayerLayout& other) const {
    return layers == other.layers && num_actions == other.num_actions;
  }
};

/// Layered CMDP: layout plus the true transition kernel, hidden from the
/// learner at run time.  kernel[triple_index(x,a,x')] = P(x'|x,a).
struct LoopFreeCmdp {
  LayerLayout shape;
  std::vector<double> kernel;
  std::vector<std::string> state_names;   // optional; empty = "s<i>"
  std::vector<std::string> action_names;  // optional; empty = "a<i>"

  double prob(int x, int a, int x_next) const {
    return kernel[shape.triple_index(x, a, x_next)];
  }
};

/// Occupancy measure over (x,a,x') triples; the primal decision variable.
struct OccupancyMeasure {
  std::vector<double> triple;
};

/// Action distribution per non-terminal state, pair-indexed.
struct Policy {
  std::vector<double> probs;
  double prob(const LayerLayout& shape, int x, int a) const {
    return probs[shape.pair_index(x, a)];
  }
};

/// One episode: (x_k, a_k) for k = 0..L-1 plus the terminal state.
struct Trajectory {
  std::vector<std::pair<int, int>> steps;
  int terminal = -1;
};

/// Per-episode reward vector r(x,a) in [0,1], pair-indexed.
struct RewardSample {
  std::vector<double> values;
};

/// Per-episode constraint matrix g_i(x,a) in [-1,1]; non-positive entries
/// mean satisfaction.  Stored row-major: values[i * pairs + pair].
struct ConstraintSample {
  int m = 0;
  std::vector<double> values;
};

// ---------------------------------------------------------------------------
// Validation

void validate_cmdp(const LoopFreeCmdp& p);
void validate_policy(const LayerLayout& shape, const Policy& pi);
// Throws ValidationError naming the first violated condition (negativity,
// per-layer normalization, flow conservation).
void validate_occupancy(const LayerLayout& shape, const OccupancyMeasure& q,
                        double tol = kValidationTol);

// ---------------------------------------------------------------------------
// Marginals and vector-space bridges

// q(x,a) = sum_{x'} q(x,a,x'); pair-indexed result.
std::vector<double> pair_marginal(const LayerLayout& shape,
                                  const std::vector<double>& q_triple);
// q(x) = sum_a q(x,a); indexed by state (terminal state gets inflow mass).
std::vector<double> state_marginal(const LayerLayout& shape,
                                   const std::vector<double>& q_triple);
// Broadcast a pair vector onto triples: out(x,a,x') = v(x,a).  Preserves
// inner products against occupancy measures exactly.
std::vector<double> lift_pair_vector(const LayerLayout& shape,
                                     const std::vector<double>& v_pair);
// <v_pair, q(x,a)> computed without materializing the marginal.
double pair_dot(const LayerLayout& shape, const std::vector<double>& v_pair,
                const std::vector<double>& q_triple);

// ---------------------------------------------------------------------------
// Operations

// pi(a|x) = q(x,a)/q(x) where q(x) > 0; uniform over actions where q(x) = 0.
Policy induce_policy(const LayerLayout& shape, const OccupancyMeasure& q);
// Same map without the validity check, for points that carry solver-level
// residual (the caller is expected to have validated at its own tolerance).
Policy induce_policy_unchecked(const LayerLayout& shape,
                               const OccupancyMeasure& q);

// Exact layer-by-layer forward product Pr[x_k=x, a_k=a, x_{k+1}=x'].
OccupancyMeasure induce_occupancy(const LoopFreeCmdp& p, const Policy& pi);

Trajectory sample_trajectory(const LoopFreeCmdp& p, const Policy& pi,
                             std::mt19937_64& rng);
Trajectory sample_trajectory(const LoopFreeCmdp& p, const Policy& pi,
                             std::uint64_t seed);

// Cast an arbitrary finite MDP into a loop-free one by duplicating the state
// space per step.  transitions[x][a][x'] is the original kernel; layer 0 is
// the start state, layers 1..L-1 hold a copy of every state, layer L is a
// single sink.
LoopFreeCmdp cast_loop_free(int num_states, int num_actions,
                            const std::vector<std::vector<std::vector<double>>>& transitions,
                            int start_state, int horizon);

// ---------------------------------------------------------------------------
// RNG helpers (explicit so trajectories are reproducible bit-for-bit)

inline double next_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Inverse-CDF draw from an unnormalized nonnegative weight vector.
int sample_categorical(const std::vector<double>& weights, int first, int count,
                       std::mt19937_64& rng);

}  // namespace ocmdp
