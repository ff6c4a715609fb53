#include "ocmdp/cmdp.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace ocmdp {

LayerLayout::LayerLayout(const std::vector<int>& layer_sizes, int actions) {
  if (layer_sizes.size() < 2)
    throw ValidationError("layout needs at least two layers");
  if (actions < 1) throw ValidationError("layout needs at least one action");
  num_actions = actions;
  int next_id = 0;
  layers.resize(layer_sizes.size());
  for (std::size_t k = 0; k < layer_sizes.size(); ++k) {
    if (layer_sizes[k] < 1)
      throw ValidationError("empty layer " + std::to_string(k));
    for (int i = 0; i < layer_sizes[k]; ++i) {
      layers[k].push_back(next_id);
      layer_of.push_back(static_cast<int>(k));
      pos_in_layer.push_back(i);
      ++next_id;
    }
  }
  pair_base.assign(next_id, -1);
  for (int x = 0; x < next_id; ++x) {
    if (layer_of[x] == horizon()) continue;
    pair_base[x] = total_pairs;
    total_pairs += num_actions;
  }
  triple_base.assign(total_pairs, 0);
  for (int x = 0; x < next_id; ++x) {
    if (layer_of[x] == horizon()) continue;
    for (int a = 0; a < num_actions; ++a) {
      triple_base[pair_index(x, a)] = total_triples;
      total_triples += succ_count(x);
    }
  }
}

void validate_cmdp(const LoopFreeCmdp& p) {
  const LayerLayout& s = p.shape;
  if (s.layers.front().size() != 1 || s.layers.back().size() != 1)
    throw ValidationError("first and last layers must be singletons");
  if (p.kernel.size() != static_cast<std::size_t>(s.total_triples))
    throw ValidationError("kernel size does not match layout");
  for (int x = 0; x < s.num_states(); ++x) {
    if (s.is_terminal(x)) continue;
    for (int a = 0; a < s.num_actions; ++a) {
      double sum = 0.0;
      for (int j = 0; j < s.succ_count(x); ++j) {
        double v = p.kernel[s.triple_base[s.pair_index(x, a)] + j];
        if (v < -kValidationTol || v > 1.0 + kValidationTol)
          throw ValidationError("transition probability out of [0,1] at (" +
                                std::to_string(x) + "," + std::to_string(a) + ")");
        sum += v;
      }
      if (std::abs(sum - 1.0) > kValidationTol)
        throw ValidationError("transition row does not sum to 1 at (" +
                              std::to_string(x) + "," + std::to_string(a) + ")");
    }
  }
}

void validate_policy(const LayerLayout& shape, const Policy& pi) {
  if (pi.probs.size() != static_cast<std::size_t>(shape.total_pairs))
    throw ValidationError("policy size does not match layout");
  for (int x = 0; x < shape.num_states(); ++x) {
    if (shape.is_terminal(x)) continue;
    double sum = 0.0;
    for (int a = 0; a < shape.num_actions; ++a) {
      double v = pi.probs[shape.pair_index(x, a)];
      if (v < -kValidationTol)
        throw ValidationError("negative action probability at state " +
                              std::to_string(x));
      sum += v;
    }
    if (std::abs(sum - 1.0) > kValidationTol)
      throw ValidationError("policy does not sum to 1 at state " +
                            std::to_string(x));
  }
}

void validate_occupancy(const LayerLayout& shape, const OccupancyMeasure& q,
                        double tol) {
  if (q.triple.size() != static_cast<std::size_t>(shape.total_triples))
    throw ValidationError("occupancy size does not match layout");
  for (std::size_t i = 0; i < q.triple.size(); ++i) {
    if (q.triple[i] < -tol)
      throw ValidationError("negative occupancy entry at triple " +
                            std::to_string(i));
  }
  const int L = shape.horizon();
  for (int k = 0; k < L; ++k) {
    double sum = 0.0;
    for (int x : shape.layers[k])
      for (int a = 0; a < shape.num_actions; ++a)
        for (int j = 0; j < shape.succ_count(x); ++j)
          sum += q.triple[shape.triple_base[shape.pair_index(x, a)] + j];
    if (std::abs(sum - 1.0) > tol)
      throw ValidationError("layer " + std::to_string(k) +
                            " normalization violated (sum=" + std::to_string(sum) + ")");
  }
  // Flow conservation at every internal state.
  for (int k = 1; k < L; ++k) {
    for (int x : shape.layers[k]) {
      double out = 0.0;
      for (int a = 0; a < shape.num_actions; ++a)
        for (int j = 0; j < shape.succ_count(x); ++j)
          out += q.triple[shape.triple_base[shape.pair_index(x, a)] + j];
      double in = 0.0;
      for (int xp : shape.layers[k - 1])
        for (int a = 0; a < shape.num_actions; ++a)
          in += q.triple[shape.triple_index(xp, a, x)];
      if (std::abs(in - out) > tol)
        throw ValidationError("flow conservation violated at state " +
                              std::to_string(x));
    }
  }
}

std::vector<double> pair_marginal(const LayerLayout& shape,
                                  const std::vector<double>& q_triple) {
  std::vector<double> out(shape.total_pairs, 0.0);
  for (int pr = 0; pr < shape.total_pairs; ++pr) {
    int begin = shape.triple_base[pr];
    int end = (pr + 1 < shape.total_pairs)
                  ? shape.triple_base[pr + 1]
                  : shape.total_triples;
    for (int t = begin; t < end; ++t) out[pr] += q_triple[t];
  }
  return out;
}

std::vector<double> state_marginal(const LayerLayout& shape,
                                   const std::vector<double>& q_triple) {
  std::vector<double> out(shape.num_states(), 0.0);
  for (int x = 0; x < shape.num_states(); ++x) {
    if (shape.is_terminal(x)) continue;
    for (int a = 0; a < shape.num_actions; ++a) {
      int base = shape.triple_base[shape.pair_index(x, a)];
      for (int j = 0; j < shape.succ_count(x); ++j) out[x] += q_triple[base + j];
    }
  }
  // Terminal state receives total inflow from the last internal layer.
  int xl = shape.layers.back().front();
  for (int x : shape.layers[shape.horizon() - 1])
    for (int a = 0; a < shape.num_actions; ++a)
      out[xl] += q_triple[shape.triple_index(x, a, xl)];
  return out;
}

std::vector<double> lift_pair_vector(const LayerLayout& shape,
                                     const std::vector<double>& v_pair) {
  std::vector<double> out(shape.total_triples, 0.0);
  for (int x = 0; x < shape.num_states(); ++x) {
    if (shape.is_terminal(x)) continue;
    for (int a = 0; a < shape.num_actions; ++a) {
      int pr = shape.pair_index(x, a);
      int base = shape.triple_base[pr];
      for (int j = 0; j < shape.succ_count(x); ++j) out[base + j] = v_pair[pr];
    }
  }
  return out;
}

double pair_dot(const LayerLayout& shape, const std::vector<double>& v_pair,
                const std::vector<double>& q_triple) {
  double acc = 0.0;
  for (int pr = 0; pr < shape.total_pairs; ++pr) {
    int begin = shape.triple_base[pr];
    int end = (pr + 1 < shape.total_pairs)
                  ? shape.triple_base[pr + 1]
                  : shape.total_triples;
    double m = 0.0;
    for (int t = begin; t < end; ++t) m += q_triple[t];
    acc += v_pair[pr] * m;
  }
  return acc;
}

Policy induce_policy(const LayerLayout& shape, const OccupancyMeasure& q) {
  validate_occupancy(shape, q);
  return induce_policy_unchecked(shape, q);
}

Policy induce_policy_unchecked(const LayerLayout& shape,
                               const OccupancyMeasure& q) {
  std::vector<double> qa = pair_marginal(shape, q.triple);
  Policy pi;
  pi.probs.assign(shape.total_pairs, 0.0);
  for (int x = 0; x < shape.num_states(); ++x) {
    if (shape.is_terminal(x)) continue;
    double qx = 0.0;
    for (int a = 0; a < shape.num_actions; ++a) qx += qa[shape.pair_index(x, a)];
    if (qx > 0.0) {
      for (int a = 0; a < shape.num_actions; ++a) {
        int pr = shape.pair_index(x, a);
        pi.probs[pr] = std::max(0.0, qa[pr]) / qx;
      }
    } else {
      // Unreachable state: the ratio is 0/0, fall back to uniform.
      for (int a = 0; a < shape.num_actions; ++a)
        pi.probs[shape.pair_index(x, a)] = 1.0 / shape.num_actions;
    }
  }
  return pi;
}

OccupancyMeasure induce_occupancy(const LoopFreeCmdp& p, const Policy& pi) {
  validate_policy(p.shape, pi);
  const LayerLayout& s = p.shape;
  OccupancyMeasure q;
  q.triple.assign(s.total_triples, 0.0);
  std::vector<double> reach(s.num_states(), 0.0);
  reach[s.layers[0][0]] = 1.0;
  for (int k = 0; k < s.horizon(); ++k) {
    for (int x : s.layers[k]) {
      if (reach[x] == 0.0) continue;
      for (int a = 0; a < s.num_actions; ++a) {
        double mass = reach[x] * pi.probs[s.pair_index(x, a)];
        if (mass == 0.0) continue;
        int base = s.triple_base[s.pair_index(x, a)];
        const auto& next = s.layers[k + 1];
        for (std::size_t j = 0; j < next.size(); ++j) {
          double v = mass * p.kernel[base + static_cast<int>(j)];
          q.triple[base + static_cast<int>(j)] = v;
          reach[next[j]] += v;
        }
      }
    }
  }
  return q;
}

int sample_categorical(const std::vector<double>& weights, int first, int count,
                       std::mt19937_64& rng) {
  double total = 0.0;
  for (int i = 0; i < count; ++i) total += std::max(0.0, weights[first + i]);
  double u = next_uniform(rng) * total;
  double acc = 0.0;
  int last_positive = 0;
  for (int i = 0; i < count; ++i) {
    double w = std::max(0.0, weights[first + i]);
    if (w > 0.0) last_positive = i;
    acc += w;
    if (u < acc) return i;
  }
  return last_positive;
}

Trajectory sample_trajectory(const LoopFreeCmdp& p, const Policy& pi,
                             std::mt19937_64& rng) {
  const LayerLayout& s = p.shape;
  Trajectory out;
  int x = s.layers[0][0];
  for (int k = 0; k < s.horizon(); ++k) {
    int a = sample_categorical(pi.probs, s.pair_base[x], s.num_actions, rng);
    int j = sample_categorical(p.kernel, s.triple_base[s.pair_index(x, a)],
                               s.succ_count(x), rng);
    out.steps.emplace_back(x, a);
    x = s.layers[k + 1][j];
  }
  out.terminal = x;
  return out;
}

Trajectory sample_trajectory(const LoopFreeCmdp& p, const Policy& pi,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_trajectory(p, pi, rng);
}

LoopFreeCmdp cast_loop_free(
    int num_states, int num_actions,
    const std::vector<std::vector<std::vector<double>>>& transitions,
    int start_state, int horizon) {
  if (horizon < 1) throw ValidationError("horizon must be at least 1");
  if (start_state < 0 || start_state >= num_states)
    throw ValidationError("start state out of range");
  std::vector<int> sizes;
  sizes.push_back(1);
  for (int k = 1; k < horizon; ++k) sizes.push_back(num_states);
  sizes.push_back(1);
  LoopFreeCmdp out;
  out.shape = LayerLayout(sizes, num_actions);
  out.kernel.assign(out.shape.total_triples, 0.0);
  const LayerLayout& s = out.shape;
  // Original state behind each layered state (sink maps to -1).
  auto original = [&](int k, int pos) {
    if (k == 0) return start_state;
    return pos;
  };
  for (int k = 0; k < horizon; ++k) {
    for (int x : s.layers[k]) {
      int ox = original(k, s.pos_in_layer[x]);
      for (int a = 0; a < num_actions; ++a) {
        int base = s.triple_base[s.pair_index(x, a)];
        if (k + 1 < horizon) {
          for (int j = 0; j < num_states; ++j)
            out.kernel[base + j] = transitions[ox][a][j];
        } else {
          // Last step: collapse every successor into the sink.
          out.kernel[base] = 1.0;
        }
      }
    }
  }
  validate_cmdp(out);
  return out;
}

}  // namespace ocmdp
