#include "ocmdp/environment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ocmdp {

double ScalarFamily::mean() const {
  switch (kind) {
    case Kind::point: return a;
    case Kind::bernoulli: return p;
    case Kind::beta: return a / (a + b);
    case Kind::scaled_bernoulli: return a + p * (b - a);
    case Kind::uniform: return 0.5 * (a + b);
  }
  return 0.0;
}

double ScalarFamily::support_lo() const {
  switch (kind) {
    case Kind::point: return a;
    case Kind::bernoulli: return 0.0;
    case Kind::beta: return 0.0;
    case Kind::scaled_bernoulli: return std::min(a, b);
    case Kind::uniform: return std::min(a, b);
  }
  return 0.0;
}

double ScalarFamily::support_hi() const {
  switch (kind) {
    case Kind::point: return a;
    case Kind::bernoulli: return 1.0;
    case Kind::beta: return 1.0;
    case Kind::scaled_bernoulli: return std::max(a, b);
    case Kind::uniform: return std::max(a, b);
  }
  return 0.0;
}

double ScalarFamily::sample(std::mt19937_64& rng) const {
  switch (kind) {
    case Kind::point: return a;
    case Kind::bernoulli: return next_uniform(rng) < p ? 1.0 : 0.0;
    case Kind::beta: {
      std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
      double x = ga(rng);
      double y = gb(rng);
      double s = x + y;
      return s > 0.0 ? x / s : 0.5;
    }
    case Kind::scaled_bernoulli: return next_uniform(rng) < p ? b : a;
    case Kind::uniform: return a + (b - a) * next_uniform(rng);
  }
  return 0.0;
}

const std::vector<double>& Schedule::at(long long t) const {
  switch (kind) {
    case Kind::alternating:
      return phases[(t % 2 == 0) ? 1 : 0];
    case Kind::phase_switch:
      return (t < switch_at) ? phases[0] : phases[1];
    case Kind::explicit_list:
      if (t < 1 || t > static_cast<long long>(list.size()))
        throw ValidationError("adversarial schedule exhausted at t=" +
                              std::to_string(t));
      return list[static_cast<std::size_t>(t - 1)];
  }
  throw ValidationError("bad schedule kind");
}

std::vector<std::vector<double>> Schedule::unique_over(long long T) const {
  std::vector<std::vector<double>> out;
  auto push_unique = [&out](const std::vector<double>& v) {
    for (const auto& u : out) {
      if (u.size() != v.size()) continue;
      double diff = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i)
        diff = std::max(diff, std::abs(u[i] - v[i]));
      if (diff < 1e-12) return;
    }
    out.push_back(v);
  };
  switch (kind) {
    case Kind::alternating:
      push_unique(phases[0]);
      if (T >= 2) push_unique(phases[1]);
      break;
    case Kind::phase_switch:
      if (switch_at > 1) push_unique(phases[0]);
      if (switch_at <= T) push_unique(phases[1]);
      break;
    case Kind::explicit_list:
      for (long long t = 1; t <= T; ++t) push_unique(at(t));
      break;
  }
  return out;
}

std::vector<double> Schedule::mean_over(long long T) const {
  std::vector<double> acc(at(1).size(), 0.0);
  for (long long t = 1; t <= T; ++t) {
    const std::vector<double>& v = at(t);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
  }
  for (double& v : acc) v /= static_cast<double>(T);
  return acc;
}

void EnvironmentSpec::validate(const LayerLayout& shape, long long T) const {
  const std::size_t pairs = static_cast<std::size_t>(shape.total_pairs);
  if (m < 1) throw ValidationError("need at least one constraint");
  if (reward_regime == Regime::stochastic) {
    if (reward_families.size() != pairs)
      throw ValidationError("reward family count does not match layout");
    for (const ScalarFamily& f : reward_families)
      if (f.support_lo() < -kValidationTol || f.support_hi() > 1.0 + kValidationTol)
        throw ValidationError("reward family support leaves [0,1]");
  } else {
    for (long long t : {1LL, T})
      if (reward_schedule.at(t).size() != pairs)
        throw ValidationError("reward schedule size does not match layout");
  }
  if (constraint_regime == Regime::stochastic) {
    if (constraint_families.size() != static_cast<std::size_t>(m))
      throw ValidationError("constraint family count does not match m");
    for (const auto& block : constraint_families) {
      if (block.size() != pairs)
        throw ValidationError("constraint family count does not match layout");
      for (const ScalarFamily& f : block)
        if (f.support_lo() < -1.0 - kValidationTol ||
            f.support_hi() > 1.0 + kValidationTol)
          throw ValidationError("constraint family support leaves [-1,1]");
    }
  } else {
    for (long long t : {1LL, T})
      if (constraint_schedule.at(t).size() != pairs * m)
        throw ValidationError("constraint schedule size does not match layout");
  }
}

std::pair<RewardSample, ConstraintSample> draw_episode(const EnvironmentSpec& spec,
                                                       long long t,
                                                       std::mt19937_64& rng) {
  RewardSample r;
  if (spec.reward_regime == Regime::stochastic) {
    r.values.reserve(spec.reward_families.size());
    for (const ScalarFamily& f : spec.reward_families)
      r.values.push_back(f.sample(rng));
  } else {
    r.values = spec.reward_schedule.at(t);
  }
  ConstraintSample g;
  g.m = spec.m;
  if (spec.constraint_regime == Regime::stochastic) {
    g.values.reserve(spec.constraint_families.size() *
                     spec.constraint_families.front().size());
    for (const auto& block : spec.constraint_families)
      for (const ScalarFamily& f : block) g.values.push_back(f.sample(rng));
  } else {
    g.values = spec.constraint_schedule.at(t);
  }
  return {std::move(r), std::move(g)};
}

std::vector<double> mean_reward(const EnvironmentSpec& spec, long long T) {
  if (spec.reward_regime == Regime::stochastic) {
    std::vector<double> out;
    out.reserve(spec.reward_families.size());
    for (const ScalarFamily& f : spec.reward_families) out.push_back(f.mean());
    return out;
  }
  return spec.reward_schedule.mean_over(T);
}

std::vector<double> mean_constraints(const EnvironmentSpec& spec, long long T) {
  if (spec.constraint_regime == Regime::stochastic) {
    std::vector<double> out;
    for (const auto& block : spec.constraint_families)
      for (const ScalarFamily& f : block) out.push_back(f.mean());
    return out;
  }
  return spec.constraint_schedule.mean_over(T);
}

std::vector<std::vector<double>> unique_constraint_matrices(
    const EnvironmentSpec& spec, long long T) {
  if (spec.constraint_regime == Regime::stochastic)
    return {mean_constraints(spec, T)};
  return spec.constraint_schedule.unique_over(T);
}

Schedule load_schedule_csv(const std::string& path, int vector_size,
                           int column_offset) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open schedule file: " + path);
  Schedule s;
  s.kind = Schedule::Kind::explicit_list;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> fields;
    while (std::getline(ss, cell, ',')) fields.push_back(std::stod(cell));
    if (static_cast<int>(fields.size()) < 1 + column_offset + vector_size)
      throw ValidationError("short schedule row in " + path);
    s.list.emplace_back(fields.begin() + 1 + column_offset,
                        fields.begin() + 1 + column_offset + vector_size);
  }
  if (s.list.empty()) throw ValidationError("empty schedule file: " + path);
  return s;
}

}  // namespace ocmdp
