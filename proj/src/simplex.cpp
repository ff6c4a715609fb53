#include "ocmdp/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ocmdp {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded_guard: return "unbounded_guard";
  }
  return "?";
}

std::vector<LinearRow> reduce_equalities(const std::vector<LinearRow>& rows,
                                         int num_vars, bool* consistent) {
  if (consistent) *consistent = true;
  std::vector<std::vector<double>> m;
  m.reserve(rows.size());
  double scale = 0.0;
  for (const LinearRow& r : rows) {
    std::vector<double> v(r.coeffs);
    v.resize(num_vars, 0.0);
    v.push_back(r.rhs);
    for (int j = 0; j < num_vars; ++j) scale = std::max(scale, std::abs(v[j]));
    m.push_back(std::move(v));
  }
  const double tol = std::max(1e-12, 1e-11 * scale);
  std::size_t rank = 0;
  for (int col = 0; col < num_vars && rank < m.size(); ++col) {
    std::size_t best = rank;
    for (std::size_t i = rank; i < m.size(); ++i)
      if (std::abs(m[i][col]) > std::abs(m[best][col])) best = i;
    if (std::abs(m[best][col]) <= tol) continue;
    std::swap(m[rank], m[best]);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == rank || std::abs(m[i][col]) <= 0.0) continue;
      double f = m[i][col] / m[rank][col];
      for (int j = col; j <= num_vars; ++j) m[i][j] -= f * m[rank][j];
      m[i][col] = 0.0;
    }
    ++rank;
  }
  for (std::size_t i = rank; i < m.size(); ++i) {
    if (std::abs(m[i][num_vars]) > 1e-8 && consistent) *consistent = false;
  }
  std::vector<LinearRow> out;
  out.reserve(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    LinearRow r;
    r.coeffs.assign(m[i].begin(), m[i].begin() + num_vars);
    r.rhs = m[i][num_vars];
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kCostTol = 1e-9;
constexpr int kMaxPivots = 200000;
constexpr int kRefactorEvery = 64;

// Dense revised simplex in standard form, maximization, Bland's rule.
class Simplex {
 public:
  // cols: n columns of length m; b >= 0 is established by the caller.
  Simplex(int m, int n, std::vector<std::vector<double>> cols,
          std::vector<double> b)
      : m_(m), n_(n), cols_(std::move(cols)), b_(std::move(b)) {}

  // Adds artificial columns, minimizes their sum, then optimizes c.
  LpStatus optimize(const std::vector<double>& c, std::vector<double>* x_out,
                    double* value_out) {
    basis_.resize(m_);
    for (int i = 0; i < m_; ++i) basis_[i] = n_ + i;  // artificials
    binv_.assign(m_, std::vector<double>(m_, 0.0));
    for (int i = 0; i < m_; ++i) binv_[i][i] = 1.0;

    std::vector<double> phase1(n_ + m_, 0.0);
    for (int i = 0; i < m_; ++i) phase1[n_ + i] = -1.0;
    if (!run(phase1, /*allow_artificial=*/true)) return LpStatus::unbounded_guard;
    double art_mass = 0.0;
    std::vector<double> xb = basic_solution();
    for (int i = 0; i < m_; ++i)
      if (basis_[i] >= n_) art_mass += xb[i];
    if (art_mass > 1e-7) return LpStatus::infeasible;
    drive_out_artificials();

    std::vector<double> full_c(c);
    full_c.resize(n_ + m_, 0.0);
    if (!run(full_c, /*allow_artificial=*/false)) return LpStatus::unbounded_guard;

    xb = basic_solution();
    std::vector<double>& x = *x_out;
    x.assign(n_, 0.0);
    double value = 0.0;
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) {
        x[basis_[i]] = xb[i];
        value += c[basis_[i]] * xb[i];
      }
    }
    *value_out = value;
    return LpStatus::optimal;
  }

 private:
  std::vector<double> column(int j) const {
    if (j < n_) return cols_[j];
    std::vector<double> e(m_, 0.0);
    e[j - n_] = 1.0;
    return e;
  }

  std::vector<double> basic_solution() const {
    std::vector<double> xb(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      double v = 0.0;
      for (int k = 0; k < m_; ++k) v += binv_[i][k] * b_[k];
      xb[i] = v;
    }
    return xb;
  }

  void refactorize() {
    // Gauss-Jordan inversion of the current basis matrix.
    std::vector<std::vector<double>> a(m_, std::vector<double>(2 * m_, 0.0));
    for (int j = 0; j < m_; ++j) {
      std::vector<double> col = column(basis_[j]);
      for (int i = 0; i < m_; ++i) a[i][j] = col[i];
    }
    for (int i = 0; i < m_; ++i) a[i][m_ + i] = 1.0;
    for (int col = 0; col < m_; ++col) {
      int best = col;
      for (int i = col; i < m_; ++i)
        if (std::abs(a[i][col]) > std::abs(a[best][col])) best = i;
      if (std::abs(a[best][col]) < 1e-13)
        throw SolverError("simplex basis became singular");
      std::swap(a[col], a[best]);
      double inv = 1.0 / a[col][col];
      for (int j = 0; j < 2 * m_; ++j) a[col][j] *= inv;
      for (int i = 0; i < m_; ++i) {
        if (i == col) continue;
        double f = a[i][col];
        if (f == 0.0) continue;
        for (int j = 0; j < 2 * m_; ++j) a[i][j] -= f * a[col][j];
      }
    }
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) binv_[i][j] = a[i][m_ + j];
  }

  bool run(const std::vector<double>& c, bool allow_artificial) {
    int total = n_ + (allow_artificial ? m_ : 0);
    std::vector<char> in_basis(n_ + m_, 0);
    for (int b : basis_) in_basis[b] = 1;
    int since_refactor = 0;
    for (int iter = 0; iter < kMaxPivots; ++iter) {
      std::vector<double> y(m_, 0.0);
      for (int i = 0; i < m_; ++i) {
        double v = 0.0;
        for (int k = 0; k < m_; ++k) v += c[basis_[k]] * binv_[k][i];
        y[i] = v;
      }
      // Bland: smallest-index column with positive reduced cost.
      int enter = -1;
      for (int j = 0; j < total; ++j) {
        if (in_basis[j]) continue;
        std::vector<double> aj = column(j);
        double rc = c[j];
        for (int i = 0; i < m_; ++i) rc -= y[i] * aj[i];
        if (rc > kCostTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;  // optimal
      std::vector<double> aj = column(enter);
      std::vector<double> dir(m_, 0.0);
      for (int i = 0; i < m_; ++i) {
        double v = 0.0;
        for (int k = 0; k < m_; ++k) v += binv_[i][k] * aj[k];
        dir[i] = v;
      }
      std::vector<double> xb = basic_solution();
      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i) {
        if (dir[i] > kPivotTol) {
          double ratio = std::max(0.0, xb[i]) / dir[i];
          if (ratio < best_ratio - 1e-12 ||
              (ratio < best_ratio + 1e-12 &&
               (leave < 0 || basis_[i] < basis_[leave]))) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return false;  // unbounded direction
      pivot(enter, leave, dir, in_basis);
      if (++since_refactor >= kRefactorEvery) {
        refactorize();
        since_refactor = 0;
      }
    }
    throw SolverError("simplex pivot cap exceeded");
  }

  void pivot(int enter, int leave, const std::vector<double>& dir,
             std::vector<char>& in_basis) {
    in_basis[basis_[leave]] = 0;
    in_basis[enter] = 1;
    basis_[leave] = enter;
    double inv = 1.0 / dir[leave];
    for (int k = 0; k < m_; ++k) binv_[leave][k] *= inv;
    for (int i = 0; i < m_; ++i) {
      if (i == leave) continue;
      double f = dir[i];
      if (f == 0.0) continue;
      for (int k = 0; k < m_; ++k) binv_[i][k] -= f * binv_[leave][k];
    }
  }

  void drive_out_artificials() {
    std::vector<char> in_basis(n_ + m_, 0);
    for (int b : basis_) in_basis[b] = 1;
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      // Degenerate pivot onto any real column with a usable element.
      bool done = false;
      for (int j = 0; j < n_ && !done; ++j) {
        if (in_basis[j]) continue;
        std::vector<double> aj = column(j);
        double v = 0.0;
        for (int k = 0; k < m_; ++k) v += binv_[i][k] * aj[k];
        if (std::abs(v) > 1e-8) {
          std::vector<double> dir(m_, 0.0);
          for (int r = 0; r < m_; ++r) {
            double s = 0.0;
            for (int k = 0; k < m_; ++k) s += binv_[r][k] * aj[k];
            dir[r] = s;
          }
          pivot(j, i, dir, in_basis);
          done = true;
        }
      }
      if (!done)
        throw SolverError("redundant row survived preprocessing");
    }
  }

  int m_, n_;
  std::vector<std::vector<double>> cols_;
  std::vector<double> b_;
  std::vector<int> basis_;
  std::vector<std::vector<double>> binv_;
};

}  // namespace

RawLpSolution lp_solve_max(const LpProblem& problem) {
  const int n0 = problem.num_vars;
  bool consistent = true;
  std::vector<LinearRow> eq = reduce_equalities(problem.equalities, n0, &consistent);
  RawLpSolution out;
  if (!consistent) {
    out.status = LpStatus::infeasible;
    return out;
  }
  const int n_slack = static_cast<int>(problem.inequalities.size());
  const int m = static_cast<int>(eq.size()) + n_slack;
  const int n = n0 + n_slack;
  std::vector<std::vector<double>> cols(n, std::vector<double>(m, 0.0));
  std::vector<double> b(m, 0.0);
  int r = 0;
  for (const LinearRow& row : eq) {
    for (int j = 0; j < n0 && j < static_cast<int>(row.coeffs.size()); ++j)
      cols[j][r] = row.coeffs[j];
    b[r] = row.rhs;
    ++r;
  }
  for (int i = 0; i < n_slack; ++i) {
    const LinearRow& row = problem.inequalities[i];
    for (int j = 0; j < n0 && j < static_cast<int>(row.coeffs.size()); ++j)
      cols[j][r] = row.coeffs[j];
    cols[n0 + i][r] = 1.0;
    b[r] = row.rhs;
    ++r;
  }
  for (int i = 0; i < m; ++i) {
    if (b[i] < 0.0) {
      b[i] = -b[i];
      for (int j = 0; j < n; ++j) cols[j][i] = -cols[j][i];
    }
  }
  std::vector<double> c(problem.objective);
  c.resize(n, 0.0);
  Simplex solver(m, n, std::move(cols), std::move(b));
  std::vector<double> x;
  double value = 0.0;
  out.status = solver.optimize(c, &x, &value);
  if (out.status == LpStatus::optimal) {
    x.resize(n0);
    out.x = std::move(x);
    out.value = value;
  }
  return out;
}

LpSolution lp_maximize(const std::vector<double>& objective_q,
                       const OccupancyPolytope& poly,
                       const std::vector<LinearRow>& extra_ineq) {
  LpProblem problem;
  problem.num_vars = poly.num_vars();
  problem.equalities = poly.equalities;
  problem.inequalities = poly.inequalities;
  for (const LinearRow& row : extra_ineq) {
    LinearRow r = row;
    r.coeffs.resize(problem.num_vars, 0.0);
    problem.inequalities.push_back(std::move(r));
  }
  problem.objective = objective_q;
  problem.objective.resize(problem.num_vars, 0.0);
  RawLpSolution raw = lp_solve_max(problem);
  LpSolution out;
  out.status = raw.status;
  out.optimum = raw.value;
  if (raw.status == LpStatus::optimal)
    out.argmax.triple.assign(raw.x.begin(), raw.x.begin() + poly.num_q);
  return out;
}

}  // namespace ocmdp
