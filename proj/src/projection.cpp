#include "ocmdp/projection.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "ocmdp/simplex.hpp"

namespace ocmdp {

struct ProjectionEngine::Impl {
  ProjectionOptions opts;
  OccupancyPolytope poly;  // kept for the infeasibility certificate
  int nq = 0;              // q variables
  int nx = 0;              // q + aux
  int nv = 0;              // q + aux + slacks
  int m = 0;               // equality rows after reduction + slacked rows
  Eigen::MatrixXd A;       // m x nv
  Eigen::VectorXd b;
  Eigen::VectorXd hinv;    // diag of (D + sigma I)^-1
  Eigen::VectorXd lo, hi;
  Eigen::LLT<Eigen::MatrixXd> llt;
  bool inconsistent = false;
  // warm-start state
  Eigen::VectorXd z, u;
  bool warm = false;

  Impl(const OccupancyPolytope& p, ProjectionOptions o) : opts(o), poly(p) {
    nq = p.num_q;
    nx = p.num_vars();
    const int n_ineq = static_cast<int>(p.inequalities.size());
    nv = nx + n_ineq;

    bool consistent = true;
    std::vector<LinearRow> eq = reduce_equalities(p.equalities, nx, &consistent);
    if (!consistent) {
      inconsistent = true;
      return;
    }
    m = static_cast<int>(eq.size()) + n_ineq;
    A = Eigen::MatrixXd::Zero(m, nv);
    b = Eigen::VectorXd::Zero(m);
    int r = 0;
    for (const LinearRow& row : eq) {
      for (int j = 0; j < nx && j < static_cast<int>(row.coeffs.size()); ++j)
        A(r, j) = row.coeffs[j];
      b(r) = row.rhs;
      ++r;
    }
    for (int i = 0; i < n_ineq; ++i) {
      const LinearRow& row = p.inequalities[i];
      for (int j = 0; j < nx && j < static_cast<int>(row.coeffs.size()); ++j)
        A(r, j) = row.coeffs[j];
      A(r, nx + i) = 1.0;
      b(r) = row.rhs;
      ++r;
    }
    hinv = Eigen::VectorXd::Constant(nv, 1.0 / opts.sigma);
    for (int j = 0; j < nq; ++j) hinv(j) = 1.0 / (1.0 + opts.sigma);
    lo = Eigen::VectorXd::Zero(nv);
    hi = Eigen::VectorXd::Constant(nv, std::numeric_limits<double>::infinity());
    for (int j = 0; j < nq; ++j) hi(j) = 1.0;

    Eigen::MatrixXd schur = A * hinv.asDiagonal() * A.transpose();
    llt.compute(schur);
    if (llt.info() != Eigen::Success) {
      schur.diagonal().array() += 1e-12 * (1.0 + schur.diagonal().maxCoeff());
      llt.compute(schur);
      if (llt.info() != Eigen::Success)
        throw SolverError("projection KKT factorization failed");
    }
    z = Eigen::VectorXd::Zero(nv);
    u = Eigen::VectorXd::Zero(nv);
  }

  Eigen::VectorXd clamp(const Eigen::VectorXd& v) const {
    return v.cwiseMax(lo).cwiseMin(hi);
  }

  // KKT residual at z with equality duals nu and box duals sigma*u.
  double kkt_residual(const Eigen::VectorXd& q0ext, const Eigen::VectorXd& nu) const {
    Eigen::VectorXd stat = -q0ext + A.transpose() * nu + opts.sigma * u;
    for (int j = 0; j < nq; ++j) stat(j) += z(j);
    double res = stat.lpNorm<Eigen::Infinity>();
    res = std::max(res, (A * z - b).lpNorm<Eigen::Infinity>());
    return res;
  }

  void certify_feasible_or_throw(double residual) {
    LpProblem feas;
    feas.num_vars = nx;
    feas.equalities = poly.equalities;
    feas.inequalities = poly.inequalities;
    feas.objective.assign(nx, 0.0);
    RawLpSolution sol = lp_solve_max(feas);
    if (sol.status == LpStatus::infeasible)
      throw SolverError("projection domain is infeasible");
    throw SolverError("projection did not converge within iteration cap",
                      residual);
  }

  ProjectionResult run(const std::vector<double>& q0) {
    if (inconsistent)
      throw SolverError("projection domain is infeasible (inconsistent equalities)");
    Eigen::VectorXd q0ext = Eigen::VectorXd::Zero(nv);
    for (int j = 0; j < nq && j < static_cast<int>(q0.size()); ++j)
      q0ext(j) = q0[j];
    if (!warm) {
      z = clamp(q0ext);
      u.setZero();
      warm = true;
    }
    Eigen::VectorXd nu = Eigen::VectorXd::Zero(m);
    double residual = std::numeric_limits<double>::infinity();
    int iter = 0;
    for (; iter < opts.max_iters; ++iter) {
      Eigen::VectorXd rhs = q0ext + opts.sigma * (z - u);
      Eigen::VectorXd t = hinv.cwiseProduct(rhs);
      nu = llt.solve(A * t - b);
      Eigen::VectorXd y = t - hinv.cwiseProduct(A.transpose() * nu);
      Eigen::VectorXd yh = opts.relax * y + (1.0 - opts.relax) * z;
      z = clamp(yh + u);
      u += yh - z;
      if ((iter & 7) == 7) {
        residual = kkt_residual(q0ext, nu);
        if (residual <= opts.tol) break;
      }
    }
    if (residual > opts.tol) {
      residual = kkt_residual(q0ext, nu);
      if (residual > opts.tol) certify_feasible_or_throw(residual);
    }
    ProjectionResult out;
    out.q.assign(z.data(), z.data() + nq);
    out.residual = residual;
    out.iterations = iter + 1;
    return out;
  }
};

ProjectionEngine::ProjectionEngine(const OccupancyPolytope& poly,
                                   ProjectionOptions opts)
    : impl_(std::make_unique<Impl>(poly, opts)) {}
ProjectionEngine::~ProjectionEngine() = default;
ProjectionEngine::ProjectionEngine(ProjectionEngine&&) noexcept = default;
ProjectionEngine& ProjectionEngine::operator=(ProjectionEngine&&) noexcept = default;

ProjectionResult ProjectionEngine::project(const std::vector<double>& q0) {
  return impl_->run(q0);
}

void ProjectionEngine::reset() {
  impl_->warm = false;
}

OccupancyMeasure project(const std::vector<double>& q0,
                         const OccupancyPolytope& poly, double tol) {
  ProjectionOptions opts;
  opts.tol = tol;
  ProjectionEngine engine(poly, opts);
  OccupancyMeasure out;
  out.triple = engine.project(q0).q;
  return out;
}

}  // namespace ocmdp
