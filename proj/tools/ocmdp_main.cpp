// Command-line driver: simulate (one run), oracle (offline report only),
// matrix (experiment grid), validate (fixture self-tests).

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ocmdp/config.hpp"

using nlohmann::json;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 1;
  double tol = 0.0;    // 0 = keep config value
  double delta = 0.0;  // 0 = keep config value
};

void add_common(CLI::App* cmd, CommonArgs* args, bool config_required) {
  auto* opt = cmd->add_option("--config", args->config_path, "config JSON path");
  if (config_required) opt->required();
  cmd->add_option("--seed", args->seed, "run seed");
  cmd->add_option("--out", args->out_dir, "output directory");
  cmd->add_option("--tol", args->tol, "projection tolerance override");
  cmd->add_option("--delta", args->delta, "confidence parameter override");
}

ocmdp::FullConfig load(const CommonArgs& args) {
  ocmdp::FullConfig cfg = ocmdp::load_config(args.config_path);
  if (args.tol > 0.0) cfg.algo.proj_tol = args.tol;
  if (args.delta > 0.0) cfg.delta = args.delta;
  return cfg;
}

json config_echo(const CommonArgs& args, const ocmdp::FullConfig& cfg) {
  json j;
  j["path"] = args.config_path;
  j["T"] = cfg.T;
  j["delta"] = cfg.delta;
  j["proj_tol"] = cfg.algo.proj_tol;
  j["seed"] = args.seed;
  return j;
}

int cmd_simulate(const CommonArgs& args) {
  ocmdp::FullConfig cfg = load(args);
  ocmdp::RunConfig rc{cfg.cmdp, cfg.env, cfg.T, cfg.delta, args.seed, cfg.algo};
  ocmdp::RunTrace trace = ocmdp::run(rc);
  ocmdp::OracleReport oracle = ocmdp::solve_offline(cfg.env, cfg.cmdp, cfg.T);
  ocmdp::MetricsSummary metrics = ocmdp::compute_metrics(trace, oracle);
  json summary = ocmdp::summary_json(trace, oracle, metrics,
                                     config_echo(args, cfg));
  if (!args.out_dir.empty()) {
    std::filesystem::create_directories(args.out_dir);
    std::ofstream csv(args.out_dir + "/trace_seed" + std::to_string(args.seed) +
                      ".csv");
    ocmdp::write_trace_csv(csv, trace);
    std::ofstream js(args.out_dir + "/summary_seed" + std::to_string(args.seed) +
                     ".json");
    js << summary.dump(2) << "\n";
  }
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_oracle(const CommonArgs& args) {
  ocmdp::FullConfig cfg = load(args);
  ocmdp::OracleReport rep = ocmdp::solve_offline(cfg.env, cfg.cmdp, cfg.T);
  json j;
  j["OPT"] = rep.opt;
  j["opt_status"] = ocmdp::to_string(rep.opt_status);
  j["rho"] = rep.rho;
  j["slater_holds"] = rep.slater_holds;
  j["condition2_holds"] = rep.condition2_holds;
  j["condition2_threshold"] = rep.condition2_threshold_value;
  if (rep.zeta) j["zeta"] = *rep.zeta;
  if (rep.opt_status == ocmdp::LpStatus::optimal)
    j["q_star"] = rep.q_star.triple;
  j["q_margin"] = rep.q_margin.triple;
  if (rep.q_mix) j["q_mix"] = rep.q_mix->triple;
  std::cout << j.dump(2) << "\n";
  if (!args.out_dir.empty()) {
    std::filesystem::create_directories(args.out_dir);
    std::ofstream os(args.out_dir + "/oracle.json");
    os << j.dump(2) << "\n";
  }
  return 0;
}

int cmd_matrix(const CommonArgs& args, int workers) {
  ocmdp::FullConfig cfg = load(args);
  ocmdp::ExperimentConfig exp = ocmdp::experiment_from_config(cfg);
  ocmdp::ExperimentReport report =
      ocmdp::run_matrix(exp, args.out_dir, workers);
  for (const ocmdp::CriterionResult& c : report.criteria)
    std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.name
              << "  (target " << c.target << ", measured " << c.measured
              << ")\n";
  int failed_runs = 0;
  for (const auto& r : report.runs) failed_runs += r.failed ? 1 : 0;
  std::cout << report.runs.size() - failed_runs << "/" << report.runs.size()
            << " runs completed\n";
  return report.all_required_pass ? 0 : 1;
}

// Quick self-check on the canonical two-layer fixture: offline oracle values
// and run determinism.
int cmd_validate(const CommonArgs& args) {
  using namespace ocmdp;
  LoopFreeCmdp p;
  p.shape = LayerLayout({1, 2, 1}, 2);
  p.kernel.assign(p.shape.total_triples, 0.0);
  p.kernel[p.shape.triple_index(0, 0, 1)] = 1.0;
  p.kernel[p.shape.triple_index(0, 1, 2)] = 1.0;
  for (int x : {1, 2})
    for (int a = 0; a < 2; ++a) p.kernel[p.shape.triple_index(x, a, 3)] = 1.0;

  EnvironmentSpec env;
  env.m = 1;
  env.reward_families.assign(p.shape.total_pairs, ScalarFamily::point(0.0));
  env.reward_families[p.shape.pair_index(0, 0)] = ScalarFamily::point(1.0);
  env.constraint_families.emplace_back(p.shape.total_pairs,
                                       ScalarFamily::point(0.0));
  env.constraint_families[0][p.shape.pair_index(0, 0)] = ScalarFamily::point(1.0);
  env.constraint_families[0][p.shape.pair_index(0, 1)] = ScalarFamily::point(-1.0);

  int failures = 0;
  auto check = [&failures](bool ok, const std::string& what) {
    std::cout << (ok ? "PASS" : "FAIL") << "  " << what << "\n";
    if (!ok) ++failures;
  };
  OracleReport rep = solve_offline(env, p, 100);
  check(std::abs(rep.opt - 0.5) < 1e-7, "fixture OPT = 0.5");
  check(std::abs(rep.rho - 1.0) < 1e-7, "fixture rho = 1");
  check(rep.zeta && std::abs(*rep.zeta - 80.0) < 1e-9, "fixture zeta = 80");

  RunConfig rc{p, env, 50, 0.1, args.seed, {}};
  std::string csv1 = trace_csv_string(run(rc));
  std::string csv2 = trace_csv_string(run(rc));
  check(csv1 == csv2, "repeated run reproduces its CSV byte-identically");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online constrained-MDP primal-dual simulator"};
  app.require_subcommand(1);

  CommonArgs sim_args, oracle_args, matrix_args, validate_args;
  int workers = 1;

  CLI::App* sim = app.add_subcommand("simulate", "run one seed and emit trace + summary");
  add_common(sim, &sim_args, true);
  CLI::App* oracle = app.add_subcommand("oracle", "offline report only");
  add_common(oracle, &oracle_args, true);
  CLI::App* matrix = app.add_subcommand("matrix", "run the experiment grid");
  add_common(matrix, &matrix_args, true);
  matrix->add_option("--workers", workers, "parallel runs");
  CLI::App* validate = app.add_subcommand("validate", "fixture self-tests");
  add_common(validate, &validate_args, false);

  CLI11_PARSE(app, argc, argv);
  try {
    if (sim->parsed()) return cmd_simulate(sim_args);
    if (oracle->parsed()) return cmd_oracle(oracle_args);
    if (matrix->parsed()) return cmd_matrix(matrix_args, workers);
    if (validate->parsed()) return cmd_validate(validate_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
