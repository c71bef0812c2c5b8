#include "stabcert/cone_algebra.hpp"

#include <cmath>

#include "stabcert/linear_feasibility.hpp"

namespace stabcert {

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Holds: return "holds";
    case Outcome::Fails: return "fails";
    case Outcome::Indeterminate: return "indeterminate";
  }
  return "?";
}

SubspaceBasis kernel_basis(const Matrix& M, const RankPolicy& policy) {
  const Eigen::Index n = M.cols();
  SubspaceBasis out{n, Matrix::Identity(n, n)};
  if (M.rows() == 0 || n == 0) return out;
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const double tau = policy.threshold(M.rows(), M.cols(), s.size() ? s(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tau) ++rank;
  out.vectors = svd.matrixV().rightCols(n - rank);
  return out;
}

bool subspace_contained_in_kernel(const SubspaceBasis& B, const Matrix& T, double tol) {
  require_dim(T.cols() == B.ambient_dim, "subspace_contained_in_kernel: dimension mismatch");
  if (B.trivial() || T.rows() == 0) return true;
  const double bound = tol * (1.0 + T.norm());
  const Matrix images = T * B.vectors;
  for (Eigen::Index j = 0; j < images.cols(); ++j)
    if (images.col(j).norm() > bound) return false;
  return true;
}

SubspaceBasis intersect_with_product_space(const Matrix& M1, const Matrix& extra_rows,
                                           const RankPolicy& policy) {
  require_dim(M1.cols() == extra_rows.cols(), "intersect_with_product_space: dimension mismatch");
  Matrix stacked(M1.rows() + extra_rows.rows(), M1.cols());
  stacked << M1, extra_rows;
  return kernel_basis(stacked, policy);
}

namespace {

/// Functional restricted to ker E (coordinates y with z = K y), unit-normalized.
/// Empty optional when it vanishes on ker E.
std::optional<Vector> restrict_functional(const Matrix& K, const Vector& f, double zero_tol) {
  const Vector g = K.transpose() * f;
  const double fn = f.norm();
  const double gn = g.norm();
  if (fn == 0.0 || gn <= zero_tol * fn) return std::nullopt;
  return Vector(g / gn);
}

}  // namespace

ImplicationVerdict cone_implication(const ConeSpec& premise, const Matrix& conclusion,
                                    const ImplicationOptions& opt) {
  const Eigen::Index n = premise.ambient_dim();
  for (const auto& v : premise.nonneg_functionals)
    require_dim(v.size() == n, "cone_implication: nonneg functional has wrong length");
  for (const auto& v : premise.strict_functionals)
    require_dim(v.size() == n, "cone_implication: strict functional has wrong length");
  require_dim(conclusion.cols() == n, "cone_implication: conclusion has wrong column count");

  ImplicationVerdict verdict;
  const Matrix K = kernel_basis(premise.eq_matrix, opt.rank).vectors;
  const Eigen::Index k = K.cols();

  std::vector<Vector> rows;  // G rows in y-coordinates
  std::vector<double> rhs;
  for (const auto& sigma : premise.nonneg_functionals) {
    if (auto g = restrict_functional(K, sigma, opt.zero_tol)) {
      rows.push_back(*g);
      rhs.push_back(0.0);
    }
  }
  for (const auto& s : premise.strict_functionals) {
    auto g = restrict_functional(K, s, opt.zero_tol);
    if (!g) {
      // sᵀz vanishes on the whole premise span: no z with sᵀz > 0.
      verdict.vacuous = true;
      return verdict;
    }
    rows.push_back(*g);
    rhs.push_back(1.0);
  }

  auto solve = [&](const std::optional<Vector>& extra) {
    const Eigen::Index m = static_cast<Eigen::Index>(rows.size()) + (extra ? 1 : 0);
    Matrix G(m, k);
    Vector h(m);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      G.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
      h(static_cast<Eigen::Index>(i)) = rhs[i];
    }
    if (extra) {
      G.row(m - 1) = extra->transpose();
      h(m - 1) = 1.0;
    }
    return find_feasible_point(G, h, opt.feasibility_tol);
  };

  if (!premise.strict_functionals.empty()) {
    if (k == 0) {
      verdict.vacuous = true;
      return verdict;
    }
    const FeasibilityResult base = solve(std::nullopt);
    if (base.status == FeasibilityStatus::IterationCap) {
      verdict.outcome = Outcome::Indeterminate;
      return verdict;
    }
    if (base.status == FeasibilityStatus::Infeasible) {
      verdict.vacuous = true;
      return verdict;
    }
  }
  if (k == 0) return verdict;

  const double t_norm = conclusion.norm();
  bool capped = false;
  for (Eigen::Index r = 0; r < conclusion.rows(); ++r) {
    auto g = restrict_functional(K, conclusion.row(r).transpose(), opt.zero_tol);
    if (!g) continue;
    for (double sign : {1.0, -1.0}) {
      const FeasibilityResult res = solve(Vector(sign * *g));
      if (res.status == FeasibilityStatus::IterationCap) {
        capped = true;
        continue;
      }
      if (res.status != FeasibilityStatus::Feasible) continue;
      Vector z = K * res.point;
      const double zn = z.norm();
      if (zn == 0.0) continue;
      z /= zn;
      if ((conclusion * z).norm() < opt.violation_tol * t_norm) continue;
      verdict.outcome = Outcome::Fails;
      verdict.witness = std::move(z);
      return verdict;
    }
  }
  if (capped) verdict.outcome = Outcome::Indeterminate;
  return verdict;
}

double distance_to_ray(const Vector& g, const Vector& u) {
  require_dim(g.size() == u.size(), "distance_to_ray: dimension mismatch");
  const double gu = g.dot(u);
  const double uu = u.squaredNorm();
  if (uu == 0.0 || gu <= 0.0) return g.norm();
  // Same value as sqrt(‖g‖² − ⟨g,u⟩²/‖u‖²) without the cancellation near g ∥ u.
  return (g - (gu / uu) * u).norm();
}

}  // namespace stabcert
