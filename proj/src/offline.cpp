#include "ocmdp/offline.hpp"

#include <cmath>

#include "ocmdp/polytope.hpp"

namespace ocmdp {

double condition2_threshold(long long T, int horizon, int m) {
  return std::pow(static_cast<double>(T), -0.125) * horizon *
         std::sqrt(20.0 * m);
}

double zeta_value(int m, int horizon, double rho) {
  return 20.0 * m * horizon * horizon / (rho * rho);
}

std::vector<LinearRow> safety_rows(const LayerLayout& shape, int m,
                                   const std::vector<double>& g_matrix) {
  std::vector<LinearRow> rows;
  const int pairs = shape.total_pairs;
  for (int i = 0; i < m; ++i) {
    LinearRow row;
    std::vector<double> gi(g_matrix.begin() + static_cast<std::size_t>(i) * pairs,
                           g_matrix.begin() + static_cast<std::size_t>(i + 1) * pairs);
    row.coeffs = lift_pair_vector(shape, gi);
    row.rhs = 0.0;
    row.label = "safety constraint " + std::to_string(i);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

// max s subject to q in the polytope and G'q <= -s for every supplied
// constraint row; s is free (split into s+ - s-), so an empty safe set shows
// up as a negative margin rather than infeasibility.
struct MarginSolution {
  bool ok = false;
  double margin = 0.0;
  std::vector<double> q;
};

MarginSolution max_margin(const OccupancyPolytope& poly, int m,
                          const std::vector<std::vector<double>>& g_matrices) {
  LpProblem lp;
  const int nq = poly.num_vars();
  lp.num_vars = nq + 2;
  lp.equalities = poly.equalities;
  lp.inequalities = poly.inequalities;
  for (const auto& g : g_matrices) {
    for (LinearRow& row : safety_rows(poly.shape, m, g)) {
      row.coeffs.resize(lp.num_vars, 0.0);
      row.coeffs[nq] = 1.0;       // + s_plus
      row.coeffs[nq + 1] = -1.0;  // - s_minus
      lp.inequalities.push_back(std::move(row));
    }
  }
  lp.objective.assign(lp.num_vars, 0.0);
  lp.objective[nq] = 1.0;
  lp.objective[nq + 1] = -1.0;
  RawLpSolution sol = lp_solve_max(lp);
  MarginSolution out;
  if (sol.status != LpStatus::optimal) return out;
  out.ok = true;
  out.margin = sol.value;
  out.q.assign(sol.x.begin(), sol.x.begin() + poly.num_q);
  return out;
}

}  // namespace

OracleReport solve_offline(const EnvironmentSpec& spec, const LoopFreeCmdp& p,
                           long long T) {
  spec.validate(p.shape, T);
  OracleReport rep;
  rep.mean_reward = mean_reward(spec, T);
  rep.mean_constraints = mean_constraints(spec, T);

  OccupancyPolytope poly = build_exact_polytope(p.shape, p.kernel);

  LpSolution opt = lp_maximize(lift_pair_vector(p.shape, rep.mean_reward), poly,
                               safety_rows(p.shape, spec.m, rep.mean_constraints));
  rep.opt_status = opt.status;
  if (opt.status == LpStatus::optimal) {
    rep.opt = opt.optimum;
    rep.q_star = opt.argmax;
  }

  // Margin against the mean matrix decides Slater; the reported rho uses the
  // regime's definition (worst case over the schedule when adversarial).
  MarginSolution mean_margin =
      max_margin(poly, spec.m, {rep.mean_constraints});
  rep.slater_holds = mean_margin.ok && mean_margin.margin > 1e-9;

  MarginSolution rho_sol =
      spec.constraint_regime == Regime::adversarial
          ? max_margin(poly, spec.m, unique_constraint_matrices(spec, T))
          : mean_margin;
  if (rho_sol.ok) {
    rep.rho = rho_sol.margin;
    rep.q_margin.triple = rho_sol.q;
  }

  rep.condition2_threshold_value = condition2_threshold(T, p.shape.horizon(), spec.m);
  rep.condition2_holds = rho_sol.ok && rep.rho >= rep.condition2_threshold_value;
  if (rho_sol.ok && rep.rho > 0.0)
    rep.zeta = zeta_value(spec.m, p.shape.horizon(), rep.rho);

  if (spec.constraint_regime == Regime::adversarial && rho_sol.ok &&
      rep.rho >= 0.0 && opt.status == LpStatus::optimal) {
    OccupancyMeasure mix;
    mix.triple.resize(p.shape.total_triples);
    double w_star = rep.rho / (1.0 + rep.rho);
    double w_margin = 1.0 / (1.0 + rep.rho);
    for (int i = 0; i < p.shape.total_triples; ++i)
      mix.triple[i] = w_star * rep.q_star.triple[i] + w_margin * rep.q_margin.triple[i];
    rep.q_mix = std::move(mix);
  }
  return rep;
}

}  // namespace ocmdp
