#include "ocmdp/polytope.hpp"

#include <algorithm>
#include <cmath>

namespace ocmdp {

std::vector<LinearRow> occupancy_flow_rows(const LayerLayout& shape) {
  std::vector<LinearRow> rows;
  const int n = shape.total_triples;
  for (int k = 0; k < shape.horizon(); ++k) {
    LinearRow row;
    row.coeffs.assign(n, 0.0);
    row.rhs = 1.0;
    row.label = "layer " + std::to_string(k) + " normalization";
    for (int x : shape.layers[k])
      for (int a = 0; a < shape.num_actions; ++a) {
        int base = shape.triple_base[shape.pair_index(x, a)];
        for (int j = 0; j < shape.succ_count(x); ++j) row.coeffs[base + j] = 1.0;
      }
    rows.push_back(std::move(row));
  }
  for (int k = 1; k < shape.horizon(); ++k) {
    for (int x : shape.layers[k]) {
      LinearRow row;
      row.coeffs.assign(n, 0.0);
      row.rhs = 0.0;
      row.label = "flow conservation at state " + std::to_string(x);
      for (int a = 0; a < shape.num_actions; ++a) {
        int base = shape.triple_base[shape.pair_index(x, a)];
        for (int j = 0; j < shape.succ_count(x); ++j) row.coeffs[base + j] += 1.0;
      }
      for (int xp : shape.layers[k - 1])
        for (int a = 0; a < shape.num_actions; ++a)
          row.coeffs[shape.triple_index(xp, a, x)] -= 1.0;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

OccupancyPolytope build_exact_polytope(const LayerLayout& shape,
                                       const std::vector<double>& kernel) {
  if (kernel.size() != static_cast<std::size_t>(shape.total_triples))
    throw ValidationError("kernel size does not match layout");
  OccupancyPolytope poly;
  poly.shape = shape;
  poly.num_q = shape.total_triples;
  poly.num_aux = 0;
  poly.exact_mode = true;
  poly.equalities = occupancy_flow_rows(shape);
  // Kernel rows: q(x,a,x') - P(x'|x,a) * sum_{x''} q(x,a,x'') = 0.
  for (int x = 0; x < shape.num_states(); ++x) {
    if (shape.is_terminal(x)) continue;
    for (int a = 0; a < shape.num_actions; ++a) {
      int base = shape.triple_base[shape.pair_index(x, a)];
      int nsucc = shape.succ_count(x);
      for (int j = 0; j < nsucc; ++j) {
        LinearRow row;
        row.coeffs.assign(poly.num_q, 0.0);
        row.rhs = 0.0;
        row.label = "kernel match at triple " + std::to_string(base + j);
        row.coeffs[base + j] += 1.0;
        for (int jj = 0; jj < nsucc; ++jj) row.coeffs[base + jj] -= kernel[base + j];
        poly.equalities.push_back(std::move(row));
      }
    }
  }
  return poly;
}

OccupancyPolytope build_confidence_polytope(const LayerLayout& shape,
                                            const std::vector<double>& phat_triples,
                                            const std::vector<double>& eps_pairs) {
  if (phat_triples.size() != static_cast<std::size_t>(shape.total_triples) ||
      eps_pairs.size() != static_cast<std::size_t>(shape.total_pairs))
    throw ValidationError("confidence data does not match layout");
  OccupancyPolytope poly;
  poly.shape = shape;
  poly.num_q = shape.total_triples;
  poly.exact_mode = false;

  // Blocks first, so variable indices are known before rows are emitted.
  int aux = 0;
  for (int x = 0; x < shape.num_states(); ++x) {
    if (shape.is_terminal(x)) continue;
    for (int a = 0; a < shape.num_actions; ++a) {
      int pr = shape.pair_index(x, a);
      double eps = std::min(eps_pairs[pr], kEpsilonClamp);
      // An L1 ball of radius 2*q(x,a) holds every split of the pair mass:
      // the block constrains nothing and is dropped.
      if (eps >= kEpsilonClamp) continue;
      ConfidenceBlock blk;
      blk.pair = pr;
      blk.first_triple = shape.triple_base[pr];
      blk.n_succ = shape.succ_count(x);
      blk.first_aux = poly.num_q + aux;
      blk.phat.assign(phat_triples.begin() + blk.first_triple,
                      phat_triples.begin() + blk.first_triple + blk.n_succ);
      blk.eps = eps;
      aux += blk.n_succ;
      poly.blocks.push_back(std::move(blk));
    }
  }
  poly.num_aux = aux;
  const int nv = poly.num_vars();

  for (LinearRow& row : occupancy_flow_rows(shape)) {
    row.coeffs.resize(nv, 0.0);
    poly.equalities.push_back(std::move(row));
  }
  for (const ConfidenceBlock& blk : poly.blocks) {
    for (int j = 0; j < blk.n_succ; ++j) {
      // +/-(q - phat*q(x,a)) - s <= 0
      for (double sign : {1.0, -1.0}) {
        LinearRow row;
        row.coeffs.assign(nv, 0.0);
        row.rhs = 0.0;
        row.label = "abs bound triple " + std::to_string(blk.first_triple + j);
        row.coeffs[blk.first_triple + j] += sign;
        for (int jj = 0; jj < blk.n_succ; ++jj)
          row.coeffs[blk.first_triple + jj] -= sign * blk.phat[j];
        row.coeffs[blk.first_aux + j] = -1.0;
        poly.inequalities.push_back(std::move(row));
      }
    }
    LinearRow budget;
    budget.coeffs.assign(nv, 0.0);
    budget.rhs = 0.0;
    budget.label = "L1 budget pair " + std::to_string(blk.pair);
    for (int j = 0; j < blk.n_succ; ++j) {
      budget.coeffs[blk.first_aux + j] = 1.0;
      budget.coeffs[blk.first_triple + j] -= blk.eps;
    }
    poly.inequalities.push_back(std::move(budget));
  }
  return poly;
}

std::vector<double> lift_point(const OccupancyPolytope& poly,
                               const std::vector<double>& q) {
  std::vector<double> x(q);
  x.resize(poly.num_vars(), 0.0);
  for (const ConfidenceBlock& blk : poly.blocks) {
    double mass = 0.0;
    for (int j = 0; j < blk.n_succ; ++j) mass += q[blk.first_triple + j];
    for (int j = 0; j < blk.n_succ; ++j)
      x[blk.first_aux + j] = std::abs(q[blk.first_triple + j] - blk.phat[j] * mass);
  }
  return x;
}

double membership_residual(const OccupancyPolytope& poly,
                           const std::vector<double>& q) {
  std::vector<double> x = lift_point(poly, q);
  double worst = 0.0;
  for (int i = 0; i < poly.num_q; ++i) {
    worst = std::max(worst, -x[i]);
    worst = std::max(worst, x[i] - 1.0);
  }
  for (const LinearRow& row : poly.equalities) {
    double v = -row.rhs;
    for (std::size_t i = 0; i < row.coeffs.size(); ++i) v += row.coeffs[i] * x[i];
    worst = std::max(worst, std::abs(v));
  }
  for (const LinearRow& row : poly.inequalities) {
    double v = -row.rhs;
    for (std::size_t i = 0; i < row.coeffs.size(); ++i) v += row.coeffs[i] * x[i];
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace ocmdp
