#include "ocmdp/config.hpp"

#include <cmath>
#include <fstream>
#include <map>

namespace ocmdp {

using nlohmann::json;

LoopFreeCmdp cmdp_from_json(const json& j) {
  std::vector<std::vector<std::string>> layer_names =
      j.at("layers").get<std::vector<std::vector<std::string>>>();
  std::vector<std::string> actions =
      j.at("actions").get<std::vector<std::string>>();
  std::vector<int> sizes;
  std::map<std::string, int> state_id;
  std::vector<std::string> names;
  for (const auto& layer : layer_names) {
    sizes.push_back(static_cast<int>(layer.size()));
    for (const std::string& s : layer) {
      if (state_id.count(s))
        throw ValidationError("duplicate state name: " + s);
      state_id[s] = static_cast<int>(names.size());
      names.push_back(s);
    }
  }
  std::map<std::string, int> action_id;
  for (std::size_t i = 0; i < actions.size(); ++i)
    action_id[actions[i]] = static_cast<int>(i);

  LoopFreeCmdp p;
  p.shape = LayerLayout(sizes, static_cast<int>(actions.size()));
  p.state_names = names;
  p.action_names = actions;
  p.kernel.assign(p.shape.total_triples, 0.0);
  for (const auto& [sname, amap] : j.at("transitions").items()) {
    if (!state_id.count(sname))
      throw ValidationError("unknown state in transitions: " + sname);
    int x = state_id[sname];
    for (const auto& [aname, row] : amap.items()) {
      if (!action_id.count(aname))
        throw ValidationError("unknown action in transitions: " + aname);
      int a = action_id[aname];
      for (const auto& [tname, prob] : row.items()) {
        if (!state_id.count(tname))
          throw ValidationError("unknown successor state: " + tname);
        int xn = state_id[tname];
        if (p.shape.layer_of[xn] != p.shape.layer_of[x] + 1)
          throw ValidationError("transition skips layers: " + sname + " -> " + tname);
        p.kernel[p.shape.triple_index(x, a, xn)] = prob.get<double>();
      }
    }
  }
  validate_cmdp(p);
  return p;
}

json cmdp_to_json(const LoopFreeCmdp& p) {
  const LayerLayout& s = p.shape;
  auto sname = [&](int x) {
    return x < static_cast<int>(p.state_names.size()) ? p.state_names[x]
                                                      : "s" + std::to_string(x);
  };
  auto aname = [&](int a) {
    return a < static_cast<int>(p.action_names.size()) ? p.action_names[a]
                                                       : "a" + std::to_string(a);
  };
  json j;
  j["layers"] = json::array();
  for (const auto& layer : s.layers) {
    json names = json::array();
    for (int x : layer) names.push_back(sname(x));
    j["layers"].push_back(names);
  }
  j["actions"] = json::array();
  for (int a = 0; a < s.num_actions; ++a) j["actions"].push_back(aname(a));
  json trans = json::object();
  for (int x = 0; x < s.num_states(); ++x) {
    if (s.is_terminal(x)) continue;
    json amap = json::object();
    for (int a = 0; a < s.num_actions; ++a) {
      json row = json::object();
      for (int jj = 0; jj < s.succ_count(x); ++jj) {
        double v = p.kernel[s.triple_base[s.pair_index(x, a)] + jj];
        if (v != 0.0) row[sname(s.layers[s.layer_of[x] + 1][jj])] = v;
      }
      amap[aname(a)] = row;
    }
    trans[sname(x)] = amap;
  }
  j["transitions"] = trans;
  return j;
}

namespace {

ScalarFamily family_from_json(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "point") return ScalarFamily::point(j.at("value").get<double>());
  if (kind == "bernoulli")
    return ScalarFamily::bernoulli(j.at("p").get<double>());
  if (kind == "beta")
    return ScalarFamily::beta(j.at("alpha").get<double>(),
                              j.at("beta").get<double>());
  if (kind == "scaled_bernoulli")
    return ScalarFamily::scaled_bernoulli(j.at("lo").get<double>(),
                                          j.at("hi").get<double>(),
                                          j.at("p").get<double>());
  if (kind == "uniform")
    return ScalarFamily::uniform(j.at("lo").get<double>(),
                                 j.at("hi").get<double>());
  throw ValidationError("unknown family kind: " + kind);
}

// Nested [state][action] arrays flattened to the dense pair vector.
std::vector<double> pair_vector_from_json(const json& j,
                                          const LayerLayout& shape) {
  auto rows = j.get<std::vector<std::vector<double>>>();
  std::vector<double> out(shape.total_pairs, 0.0);
  int state = 0;
  for (int x = 0; x < shape.num_states(); ++x) {
    if (shape.is_terminal(x)) continue;
    if (state >= static_cast<int>(rows.size()))
      throw ValidationError("pair table has too few states");
    if (static_cast<int>(rows[state].size()) != shape.num_actions)
      throw ValidationError("pair table row has wrong action count");
    for (int a = 0; a < shape.num_actions; ++a)
      out[shape.pair_index(x, a)] = rows[state][a];
    ++state;
  }
  return out;
}

std::vector<ScalarFamily> families_from_json(const json& j,
                                             const LayerLayout& shape) {
  auto rows = j.get<std::vector<std::vector<json>>>();
  std::vector<ScalarFamily> out(shape.total_pairs);
  int state = 0;
  for (int x = 0; x < shape.num_states(); ++x) {
    if (shape.is_terminal(x)) continue;
    if (state >= static_cast<int>(rows.size()))
      throw ValidationError("family table has too few states");
    for (int a = 0; a < shape.num_actions; ++a)
      out[shape.pair_index(x, a)] = family_from_json(rows[state][a]);
    ++state;
  }
  return out;
}

// Matrices appear as [constraint][state][action]; flatten row-major.
std::vector<double> matrix_from_json(const json& j, const LayerLayout& shape,
                                     int m) {
  std::vector<double> out;
  if (j.size() != static_cast<std::size_t>(m))
    throw ValidationError("constraint matrix has wrong m");
  for (const json& block : j) {
    std::vector<double> v = pair_vector_from_json(block, shape);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

Schedule schedule_from_json(const json& j, const LayerLayout& shape, int m,
                            bool is_constraint, const std::string& base_dir) {
  Schedule s;
  std::string kind = j.at("kind").get<std::string>();
  auto load_vec = [&](const json& v) {
    return is_constraint ? matrix_from_json(v, shape, m)
                         : pair_vector_from_json(v, shape);
  };
  if (kind == "alternating") {
    s.kind = Schedule::Kind::alternating;
    s.phases = {load_vec(j.at("odd")), load_vec(j.at("even"))};
  } else if (kind == "phase_switch") {
    s.kind = Schedule::Kind::phase_switch;
    s.phases = {load_vec(j.at("before")), load_vec(j.at("after"))};
    s.switch_at = j.at("switch_at").get<long long>();
  } else if (kind == "file") {
    std::string path = j.at("path").get<std::string>();
    if (!base_dir.empty() && !path.empty() && path.front() != '/')
      path = base_dir + "/" + path;
    int size = is_constraint ? m * shape.total_pairs : shape.total_pairs;
    int offset = is_constraint ? 0 : m * shape.total_pairs;
    s = load_schedule_csv(path, size, offset);
  } else if (kind == "explicit") {
    s.kind = Schedule::Kind::explicit_list;
    for (const json& v : j.at("list")) s.list.push_back(load_vec(v));
  } else {
    throw ValidationError("unknown schedule kind: " + kind);
  }
  return s;
}

}  // namespace

EnvironmentSpec environment_from_json(const json& j, const LayerLayout& shape,
                                      const std::string& base_dir) {
  EnvironmentSpec spec;
  spec.m = j.at("m").get<int>();
  const json& rj = j.at("rewards");
  std::string rregime = rj.at("regime").get<std::string>();
  spec.reward_regime =
      rregime == "adversarial" ? Regime::adversarial : Regime::stochastic;
  if (spec.reward_regime == Regime::stochastic) {
    spec.reward_families = families_from_json(rj.at("families"), shape);
  } else {
    spec.reward_schedule =
        schedule_from_json(rj.at("schedule"), shape, spec.m, false, base_dir);
  }
  const json& gj = j.at("constraints");
  std::string gregime = gj.at("regime").get<std::string>();
  spec.constraint_regime =
      gregime == "adversarial" ? Regime::adversarial : Regime::stochastic;
  if (spec.constraint_regime == Regime::stochastic) {
    const json& blocks = gj.at("families");
    if (blocks.size() != static_cast<std::size_t>(spec.m))
      throw ValidationError("constraint families do not match m");
    for (const json& block : blocks)
      spec.constraint_families.push_back(families_from_json(block, shape));
  } else {
    spec.constraint_schedule =
        schedule_from_json(gj.at("schedule"), shape, spec.m, true, base_dir);
  }
  return spec;
}

FullConfig config_from_json(const json& j, const std::string& base_dir) {
  FullConfig cfg;
  cfg.cmdp = cmdp_from_json(j.at("cmdp"));
  cfg.env = environment_from_json(j.at("environment"), cfg.cmdp.shape, base_dir);
  const json& aj = j.at("algorithm");
  cfg.T = aj.at("T").get<long long>();
  cfg.delta = aj.value("delta", 0.1);
  cfg.algo.proj_tol = aj.value("proj_tol", 1e-7);
  cfg.algo.proj_max_iters = aj.value("proj_max_iters", 100000);
  if (aj.contains("C") && !aj["C"].is_null())
    cfg.algo.C_override = aj["C"].get<double>();
  if (aj.contains("K") && !aj["K"].is_null())
    cfg.algo.K_override = aj["K"].get<double>();
  if (aj.contains("dual_eta") && !aj["dual_eta"].is_null())
    cfg.algo.dual_eta_override = aj["dual_eta"].get<double>();
  if (j.contains("experiment")) cfg.experiment = j["experiment"];
  return cfg;
}

FullConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config: " + path);
  json j = json::parse(in);
  std::string base_dir;
  auto slash = path.find_last_of('/');
  if (slash != std::string::npos) base_dir = path.substr(0, slash);
  return config_from_json(j, base_dir);
}

ExperimentConfig experiment_from_config(const FullConfig& cfg) {
  ExperimentConfig exp;
  const json& e = cfg.experiment;
  if (e.is_null() || e.empty())
    throw ValidationError("config has no experiment section");
  exp.name = e.value("name", "experiment");
  std::vector<long long> T_grid;
  if (e.contains("T_grid"))
    T_grid = e["T_grid"].get<std::vector<long long>>();
  else
    T_grid = {2000, 8000, 32000};  // default checkpoint grid for slope fits
  std::vector<std::uint64_t> seeds;
  if (e.contains("seeds") && e["seeds"].is_array()) {
    seeds = e["seeds"].get<std::vector<std::uint64_t>>();
  } else {
    std::uint64_t base = 1;
    int count = 1;
    if (e.contains("seeds")) {
      base = e["seeds"].value("base", 1);
      count = e["seeds"].value("count", 1);
    }
    for (int i = 0; i < count; ++i) seeds.push_back(base + i);
  }
  for (long long T : T_grid) {
    for (std::uint64_t seed : seeds) {
      RunSpec spec;
      spec.group = "T" + std::to_string(T);
      spec.cfg.cmdp = cfg.cmdp;
      spec.cfg.env = cfg.env;
      spec.cfg.T = T;
      spec.cfg.delta = cfg.delta;
      spec.cfg.seed = seed;
      spec.cfg.algo = cfg.algo;
      exp.runs.push_back(std::move(spec));
    }
  }
  if (e.contains("criteria")) {
    for (const json& c : e["criteria"]) {
      CriterionSpec spec;
      spec.name = c.at("name").get<std::string>();
      spec.kind = c.at("kind").get<std::string>();
      spec.metric = c.value("metric", "");
      spec.target = c.at("target").get<double>();
      spec.group_prefix = c.value("group", "");
      spec.required = c.value("required", true);
      exp.criteria.push_back(std::move(spec));
    }
  }
  return exp;
}

json summary_json(const RunTrace& trace, const OracleReport& oracle,
                  const MetricsSummary& metrics, const json& config_echo) {
  json j;
  j["R_T"] = metrics.regret;
  j["R_T_mean_reward"] = metrics.regret_mean_reward;
  j["V_T"] = metrics.violation_signed;
  j["V_T_plus"] = metrics.violation_pos;
  j["cum_reward"] = metrics.cum_reward;
  j["cum_reward_realized"] = metrics.cum_reward_realized;
  j["lambda_max_l1"] = metrics.lambda_max_l1;
  j["max_window_regret_qstar"] = metrics.max_window_regret_qstar;
  j["window_regret_qstar_by_level"] = metrics.window_regret_qstar_by_level;
  j["dual_regret_zero"] = metrics.dual_regret_zero;
  j["OPT"] = oracle.opt;
  j["opt_status"] = to_string(oracle.opt_status);
  j["rho"] = oracle.rho;
  if (oracle.zeta) j["zeta"] = *oracle.zeta;
  j["slater_holds"] = oracle.slater_holds;
  j["condition2_holds"] = oracle.condition2_holds;
  j["condition2_threshold"] = oracle.condition2_threshold_value;
  j["coverage_ok"] = metrics.coverage_ok;
  j["azuma_reward_margin"] = metrics.azuma_reward_margin;
  j["azuma_reward_bound"] = metrics.azuma_reward_bound_value;
  j["azuma_constraint_max_ratio"] = metrics.azuma_constraint_max_ratio;
  j["epochs"] = metrics.epochs;
  j["proj_residual_max"] = metrics.proj_residual_max;
  j["dual_eta"] = trace.dual_eta;
  j["dual_cap"] = trace.dual_cap;
  j["primal_C"] = trace.primal_C;
  j["T"] = trace.T;
  j["delta"] = trace.delta;
  j["seed"] = trace.seed;
  j["wall_seconds"] = trace.wall_seconds;
  j["config"] = config_echo;
  return j;
}

}  // namespace ocmdp
