#include "stabcert/linear_feasibility.hpp"

#include <vector>

namespace stabcert {

FeasibilityResult find_feasible_point(const Matrix& G, const Vector& h, double feasibility_tol) {
  require_dim(G.rows() == h.size(), "find_feasible_point: G and h disagree");
  const Eigen::Index m = G.rows();
  const Eigen::Index k = G.cols();
  FeasibilityResult result;
  if (m == 0) {
    result.status = FeasibilityStatus::Feasible;
    result.point = Vector::Zero(k);
    return result;
  }

  std::vector<Eigen::Index> art_row;  // rows that need an artificial
  for (Eigen::Index i = 0; i < m; ++i)
    if (h(i) > 0.0) art_row.push_back(i);
  const Eigen::Index na = static_cast<Eigen::Index>(art_row.size());

  // Columns: p (k) | q (k) | s (m) | a (na) | rhs
  const Eigen::Index col_p = 0, col_q = k, col_s = 2 * k, col_a = 2 * k + m;
  const Eigen::Index ncols = 2 * k + m + na;
  Matrix T = Matrix::Zero(m, ncols + 1);
  std::vector<Eigen::Index> basis(m);
  Eigen::Index a_next = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (h(i) > 0.0) {
      T.block(i, col_p, 1, k) = G.row(i);
      T.block(i, col_q, 1, k) = -G.row(i);
      T(i, col_s + i) = -1.0;
      T(i, col_a + a_next) = 1.0;
      T(i, ncols) = h(i);
      basis[i] = col_a + a_next;
      ++a_next;
    } else {
      T.block(i, col_p, 1, k) = -G.row(i);
      T.block(i, col_q, 1, k) = G.row(i);
      T(i, col_s + i) = 1.0;
      T(i, ncols) = -h(i);
      basis[i] = col_s + i;
    }
  }

  Vector cost = Vector::Zero(ncols);
  cost.tail(na).setOnes();

  constexpr double kPivotTol = 1e-12;
  constexpr double kReducedCostTol = 1e-12;
  const int cap = static_cast<int>(10 * (ncols + m));

  auto reduced_costs = [&]() {
    Vector r = cost;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double cb = cost(basis[i]);
      if (cb != 0.0) r -= cb * T.row(i).head(ncols).transpose();
    }
    return r;
  };

  int it = 0;
  for (;; ++it) {
    if (it >= cap) {
      result.status = FeasibilityStatus::IterationCap;
      result.iterations = it;
      return result;
    }
    const Vector r = reduced_costs();
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < ncols; ++j) {
      if (r(j) < -kReducedCostTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;

    Eigen::Index leave = -1;
    double best_ratio = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double a = T(i, enter);
      if (a <= kPivotTol) continue;
      const double ratio = T(i, ncols) / a;
      if (leave < 0 || ratio < best_ratio - 1e-15 ||
          (ratio <= best_ratio + 1e-15 && basis[i] < basis[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave < 0) break;  // unbounded direction; cannot happen for a bounded-below objective

    T.row(leave) /= T(leave, enter);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i == leave) continue;
      const double f = T(i, enter);
      if (f != 0.0) T.row(i) -= f * T.row(leave);
    }
    basis[leave] = enter;
  }
  result.iterations = it;

  double objective = 0.0;
  Vector sol = Vector::Zero(ncols);
  for (Eigen::Index i = 0; i < m; ++i) {
    sol(basis[i]) = T(i, ncols);
    objective += cost(basis[i]) * T(i, ncols);
  }
  if (objective > feasibility_tol) {
    result.status = FeasibilityStatus::Infeasible;
    return result;
  }
  result.status = FeasibilityStatus::Feasible;
  result.point = sol.segment(col_p, k) - sol.segment(col_q, k);
  return result;
}

}  // namespace stabcert
