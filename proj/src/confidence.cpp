#include "ocmdp/confidence.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace ocmdp {

ConfidenceState ConfidenceState::init(const LayerLayout& shape, double delta,
                                      long long T) {
  if (delta <= 0.0 || delta >= 1.0)
    throw ValidationError("delta must be in (0,1)");
  if (T < 1) throw ValidationError("episode budget must be positive");
  ConfidenceState cs;
  cs.shape = shape;
  cs.delta = delta;
  cs.T = T;
  cs.epoch = 1;
  cs.pair_start.assign(shape.total_pairs, 0);
  cs.pair_live.assign(shape.total_pairs, 0);
  cs.triple_start.assign(shape.total_triples, 0);
  cs.triple_live.assign(shape.total_triples, 0);
  return cs;
}

bool ConfidenceState::record_trajectory(const Trajectory& traj) {
  if (static_cast<int>(traj.steps.size()) != shape.horizon())
    throw ValidationError("trajectory length does not match horizon");
  for (std::size_t k = 0; k < traj.steps.size(); ++k) {
    auto [x, a] = traj.steps[k];
    if (shape.layer_of[x] != static_cast<int>(k))
      throw ValidationError("trajectory state in wrong layer");
    int next = (k + 1 < traj.steps.size()) ? traj.steps[k + 1].first
                                           : traj.terminal;
    ++pair_live[shape.pair_index(x, a)];
    ++triple_live[shape.triple_index(x, a, next)];
  }
  bool fire = false;
  for (auto [x, a] : traj.steps) {
    int pr = shape.pair_index(x, a);
    if (pair_live[pr] >= std::max<long long>(1, 2 * pair_start[pr])) {
      fire = true;
      break;
    }
  }
  if (fire) {
    ++epoch;
    pair_start = pair_live;
    triple_start = triple_live;
  }
  return fire;
}

double ConfidenceState::epsilon_raw(int x, int a) const {
  const double n = static_cast<double>(
      std::max<long long>(1, pair_start[shape.pair_index(x, a)]));
  const double next_size = static_cast<double>(shape.succ_count(x));
  const double log_arg = static_cast<double>(T) * shape.num_states() *
                         shape.num_actions / delta;
  return std::sqrt(2.0 * next_size * std::log(log_arg) / n);
}

double ConfidenceState::epsilon(int x, int a) const {
  return std::min(2.0, epsilon_raw(x, a));
}

std::vector<double> ConfidenceState::empirical_kernel(int x, int a) const {
  int pr = shape.pair_index(x, a);
  double denom = static_cast<double>(std::max<long long>(1, pair_start[pr]));
  std::vector<double> out(shape.succ_count(x), 0.0);
  int base = shape.triple_base[pr];
  for (int j = 0; j < shape.succ_count(x); ++j)
    out[j] = static_cast<double>(triple_start[base + j]) / denom;
  return out;
}

std::vector<double> ConfidenceState::epsilon_pairs() const {
  std::vector<double> out(shape.total_pairs, 0.0);
  for (int x = 0; x < shape.num_states(); ++x) {
    if (shape.is_terminal(x)) continue;
    for (int a = 0; a < shape.num_actions; ++a)
      out[shape.pair_index(x, a)] = epsilon(x, a);
  }
  return out;
}

std::vector<double> ConfidenceState::empirical_kernel_triples() const {
  std::vector<double> out(shape.total_triples, 0.0);
  for (int x = 0; x < shape.num_states(); ++x) {
    if (shape.is_terminal(x)) continue;
    for (int a = 0; a < shape.num_actions; ++a) {
      std::vector<double> row = empirical_kernel(x, a);
      int base = shape.triple_base[shape.pair_index(x, a)];
      for (std::size_t j = 0; j < row.size(); ++j) out[base + j] = row[j];
    }
  }
  return out;
}

std::string ConfidenceState::dump_json() const {
  nlohmann::json j;
  std::vector<int> sizes;
  for (const auto& layer : shape.layers) sizes.push_back((int)layer.size());
  j["layer_sizes"] = sizes;
  j["num_actions"] = shape.num_actions;
  j["delta"] = delta;
  j["T"] = T;
  j["epoch"] = epoch;
  j["pair_start"] = pair_start;
  j["pair_live"] = pair_live;
  j["triple_start"] = triple_start;
  j["triple_live"] = triple_live;
  return j.dump(2);
}

ConfidenceState ConfidenceState::load_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  LayerLayout shape(j.at("layer_sizes").get<std::vector<int>>(),
                    j.at("num_actions").get<int>());
  ConfidenceState cs = init(shape, j.at("delta").get<double>(),
                            j.at("T").get<long long>());
  cs.epoch = j.at("epoch").get<int>();
  cs.pair_start = j.at("pair_start").get<std::vector<long long>>();
  cs.pair_live = j.at("pair_live").get<std::vector<long long>>();
  cs.triple_start = j.at("triple_start").get<std::vector<long long>>();
  cs.triple_live = j.at("triple_live").get<std::vector<long long>>();
  return cs;
}

}  // namespace ocmdp
