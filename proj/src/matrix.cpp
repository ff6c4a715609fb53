#include "ocmdp/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <set>

#include <json.hpp>

namespace ocmdp {

double metric_value(const MetricsSummary& s, const std::string& name) {
  if (name == "regret") return s.regret;
  if (name == "regret_mean_reward") return s.regret_mean_reward;
  if (name == "cum_reward") return s.cum_reward;
  if (name == "violation_pos") return s.violation_pos;
  if (name == "violation_signed") return s.violation_signed;
  if (name == "lambda_max_l1") return s.lambda_max_l1;
  if (name == "max_window_regret_qstar") return s.max_window_regret_qstar;
  if (name == "max_window_regret_qstar_hat") return s.max_window_regret_qstar_hat;
  if (name == "dual_regret_zero") return s.dual_regret_zero;
  if (name == "proj_residual_max") return s.proj_residual_max;
  throw ValidationError("unknown metric: " + name);
}

bool metric_flag(const MetricsSummary& s, const std::string& name) {
  if (name == "lambda_le_zeta") return s.lambda_le_zeta;
  if (name == "lambda_le_cap") return s.lambda_le_cap;
  if (name == "coverage_ok") return s.coverage_ok;
  if (name == "azuma_reward_ok") return s.azuma_reward_ok;
  if (name == "azuma_constraint_ok") return s.azuma_constraint_ok;
  throw ValidationError("unknown predicate: " + name);
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

RunResult execute(const RunSpec& spec, const std::string& out_dir,
                  bool write_csv) {
  RunResult res;
  res.group = spec.group;
  res.T = spec.cfg.T;
  res.seed = spec.cfg.seed;
  try {
    RunTrace trace = run(spec.cfg);
    OracleReport oracle = solve_offline(spec.cfg.env, spec.cfg.cmdp, spec.cfg.T);
    res.metrics = compute_metrics(trace, oracle);
    res.wall_seconds = trace.wall_seconds;
    if (write_csv && !out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      std::ofstream os(out_dir + "/" + spec.group + "_seed" +
                       std::to_string(spec.cfg.seed) + ".csv");
      write_trace_csv(os, trace);
    }
  } catch (const std::exception& e) {
    res.failed = true;
    res.error = e.what();
  }
  return res;
}

CriterionResult evaluate(const CriterionSpec& spec,
                         const std::vector<RunResult>& runs) {
  CriterionResult out;
  out.name = spec.name;
  out.kind = spec.kind;
  out.target = spec.target;
  std::vector<const RunResult*> matching;
  for (const RunResult& r : runs) {
    if (r.failed) continue;
    if (!spec.group_prefix.empty() &&
        r.group.rfind(spec.group_prefix, 0) != 0)
      continue;
    matching.push_back(&r);
  }
  if (matching.empty()) {
    out.measured = std::nan("");
    out.pass = false;
    return out;
  }
  if (spec.kind == "slope_max") {
    std::map<long long, std::vector<double>> by_T;
    for (const RunResult* r : matching)
      by_T[r->T].push_back(metric_value(r->metrics, spec.metric));
    std::vector<std::pair<double, double>> checkpoints;
    for (auto& [T, vals] : by_T)
      checkpoints.emplace_back(static_cast<double>(T), median(vals));
    GrowthFit fit = fit_growth(checkpoints);
    out.measured = fit.slope;
    out.pass = fit.slope <= spec.target;
  } else if (spec.kind == "fraction_min") {
    int hits = 0;
    for (const RunResult* r : matching)
      hits += metric_flag(r->metrics, spec.metric) ? 1 : 0;
    out.measured = static_cast<double>(hits) / matching.size();
    out.pass = out.measured >= spec.target;
  } else if (spec.kind == "reward_fraction_min") {
    std::vector<double> fracs;
    for (const RunResult* r : matching) {
      const MetricsSummary& s = r->metrics;
      double base = s.rho / (1.0 + s.rho) * static_cast<double>(r->T) * s.opt;
      fracs.push_back(base > 0.0 ? s.cum_reward / base : std::nan(""));
    }
    out.measured = median(fracs);
    out.pass = out.measured >= spec.target;
  } else if (spec.kind == "value_max") {
    std::vector<double> vals;
    for (const RunResult* r : matching)
      vals.push_back(metric_value(r->metrics, spec.metric));
    out.measured = median(vals);
    out.pass = out.measured <= spec.target;
  } else {
    throw ValidationError("unknown criterion kind: " + spec.kind);
  }
  return out;
}

}  // namespace

ExperimentReport run_matrix(const ExperimentConfig& cfg,
                            const std::string& out_dir, int workers) {
  ExperimentReport report;
  report.name = cfg.name;
  report.runs.resize(cfg.runs.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < cfg.runs.size(); ++i)
      report.runs[i] = execute(cfg.runs[i], out_dir, cfg.write_run_csv);
  } else {
    std::size_t next = 0;
    while (next < cfg.runs.size()) {
      std::size_t batch = std::min<std::size_t>(workers, cfg.runs.size() - next);
      std::vector<std::future<RunResult>> futs;
      for (std::size_t j = 0; j < batch; ++j)
        futs.push_back(std::async(std::launch::async, execute,
                                  std::cref(cfg.runs[next + j]),
                                  std::cref(out_dir), cfg.write_run_csv));
      for (std::size_t j = 0; j < batch; ++j)
        report.runs[next + j] = futs[j].get();
      next += batch;
    }
  }
  for (const CriterionSpec& c : cfg.criteria) {
    CriterionResult res = evaluate(c, report.runs);
    if (c.required && !res.pass) report.all_required_pass = false;
    report.criteria.push_back(std::move(res));
  }
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream os(out_dir + "/report.json");
    os << report_json(report);
  }
  return report;
}

std::string report_json(const ExperimentReport& report) {
  nlohmann::json j;
  j["name"] = report.name;
  j["all_required_pass"] = report.all_required_pass;
  j["criteria"] = nlohmann::json::array();
  for (const CriterionResult& c : report.criteria) {
    nlohmann::json cj;
    cj["name"] = c.name;
    cj["kind"] = c.kind;
    cj["target"] = c.target;
    if (std::isnan(c.measured))
      cj["measured"] = nullptr;
    else
      cj["measured"] = c.measured;
    cj["pass"] = c.pass;
    j["criteria"].push_back(cj);
  }
  j["runs"] = nlohmann::json::array();
  for (const RunResult& r : report.runs) {
    nlohmann::json rj;
    rj["group"] = r.group;
    rj["T"] = r.T;
    rj["seed"] = r.seed;
    rj["failed"] = r.failed;
    if (r.failed) {
      rj["error"] = r.error;
    } else {
      const MetricsSummary& s = r.metrics;
      rj["regret"] = s.regret;
      rj["regret_mean_reward"] = s.regret_mean_reward;
      rj["cum_reward"] = s.cum_reward;
      rj["violation_signed"] = s.violation_signed;
      rj["violation_pos"] = s.violation_pos;
      rj["lambda_max_l1"] = s.lambda_max_l1;
      rj["max_window_regret_qstar"] = s.max_window_regret_qstar;
      rj["coverage_ok"] = s.coverage_ok;
      rj["azuma_reward_ok"] = s.azuma_reward_ok;
      rj["azuma_constraint_ok"] = s.azuma_constraint_ok;
      rj["epochs"] = s.epochs;
      rj["opt"] = s.opt;
      rj["rho"] = s.rho;
      if (s.zeta) rj["zeta"] = *s.zeta;
      rj["wall_seconds"] = r.wall_seconds;
    }
    j["runs"].push_back(rj);
  }
  return j.dump(2);
}

}  // namespace ocmdp
