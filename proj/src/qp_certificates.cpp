#include "stabcert/qp_certificates.hpp"

#include <cmath>
#include <limits>

#include "stabcert/stationarity.hpp"

namespace stabcert {

BorderedMatrix BorderedMatrix::make(const Matrix& core, const Vector& border) {
  const Eigen::Index n = core.rows();
  require_dim(core.cols() == n && border.size() == n, "BorderedMatrix: dimension mismatch");
  BorderedMatrix m{core, border, Matrix::Zero(n + 1, n + 1)};
  m.assembled.topLeftCorner(n, n) = core;
  m.assembled.topRightCorner(n, 1) = border;
  m.assembled.bottomLeftCorner(1, n) = border.transpose();
  return m;
}

Matrix BorderedMatrix::negated_bottom_row() const {
  Matrix out = assembled;
  out.bottomRows(1) *= -1.0;
  return out;
}

NonsingularityTest nonsingularity(const Matrix& m, const RankPolicy& policy) {
  NonsingularityTest t;
  t.det = determinant(m);
  t.sigma_min = sigma_min(m);
  t.nonsingular = is_nonsingular(m, policy);
  return t;
}

NonsingularityTest interior_test(const Matrix& D, const RankPolicy& policy) {
  return nonsingularity(D, policy);
}

NonsingularityTest bordered_test_positive_lambda(const QpInstance& p, const Vector& x_bar,
                                                 double lambda, const RankPolicy& policy) {
  if (!(lambda > 0.0)) throw std::invalid_argument("bordered_test_positive_lambda: lambda must be positive");
  require_dim(x_bar.size() == p.dim(), "bordered_test_positive_lambda: x_bar has wrong length");
  const Vector u = p.A() * x_bar + p.b();
  return nonsingularity(BorderedMatrix::make(p.D() + lambda * p.A(), u).assembled, policy);
}

namespace {

ImplicationOptions implication_options(const Tolerances& tol) {
  ImplicationOptions o;
  o.rank = tol.rank;
  return o;
}

Matrix joined(const Matrix& core, const Vector& column) {
  Matrix m(core.rows(), core.cols() + 1);
  m << core, column;
  return m;
}

Vector lifted(const Vector& v, double last) {
  Vector out(v.size() + 1);
  out << v, last;
  return out;
}

Vector unit_last(Eigen::Index n) {
  Vector e = Vector::Zero(n + 1);
  e(n) = 1.0;
  return e;
}

/// Active point with ∇f0 = 0; returns u = Ax̄ + b.
Vector zero_lambda_border(const QpInstance& p, const Vector& x_bar, const Tolerances& tol) {
  const Evaluation e = evaluate(p, x_bar);
  if (std::abs(e.constraint) > tol.activity(std::abs(p.alpha())))
    throw StationarityError("zero-multiplier test: constraint is not active");
  if (e.grad_obj.norm() > tol.stationarity(e.grad_obj.norm()))
    throw StationarityError("zero-multiplier test: multiplier is not zero");
  return e.grad_con;
}

}  // namespace

ZeroLambdaSufficient zero_lambda_sufficient(const Matrix& D, const Vector& u, const Tolerances& tol) {
  const Eigen::Index n = D.rows();
  require_dim(D.cols() == n && u.size() == n, "zero_lambda_sufficient: dimension mismatch");
  ZeroLambdaSufficient out;
  out.bordered = nonsingularity(BorderedMatrix::make(D, u).assembled, tol.rank);

  ConeSpec premise{joined(D, u), {unit_last(n)}, {lifted(u, 0.0)}};
  out.ascent = cone_implication(premise, Matrix::Identity(n + 1, n + 1), implication_options(tol));

  const SubspaceBasis kerD = kernel_basis(D, tol.rank);
  out.kernel_orthogonal = subspace_contained_in_kernel(kerD, u.transpose(), tol.base);
  return out;
}

ZeroLambdaSufficient zero_lambda_sufficient(const QpInstance& p, const Vector& x_bar, const Tolerances& tol) {
  return zero_lambda_sufficient(p.D(), zero_lambda_border(p, x_bar, tol), tol);
}

ImplicationVerdict zero_lambda_necessary(const Matrix& D, const Vector& u, const Tolerances& tol) {
  const Eigen::Index n = D.rows();
  require_dim(D.cols() == n && u.size() == n, "zero_lambda_necessary: dimension mismatch");
  ConeSpec premise{joined(D, u), {lifted(u, 0.0), unit_last(n)}, {}};
  return cone_implication(premise, Matrix::Identity(n + 1, n + 1), implication_options(tol));
}

ImplicationVerdict zero_lambda_necessary(const QpInstance& p, const Vector& x_bar, const Tolerances& tol) {
  return zero_lambda_necessary(p.D(), zero_lambda_border(p, x_bar, tol), tol);
}

bool strong_regularity_positive(const DerivativeSnapshot& s, double lambda, const RankPolicy& policy) {
  const Matrix hess_L = s.hess_xx_f0 + lambda * s.hess_xx_F;
  return is_nonsingular(BorderedMatrix::make(hess_L, s.grad_x_F).assembled, policy);
}

ZeroLambdaRegularity strong_regularity_zero(const DerivativeSnapshot& s, const RankPolicy& policy) {
  ZeroLambdaRegularity out;
  const Matrix& H = s.hess_xx_f0;
  out.hessian_nonsingular = is_nonsingular(H, policy);
  if (!out.hessian_nonsingular) {
    out.quadratic_form = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const Vector& u = s.grad_x_F;
  out.quadratic_form = u.dot(H.fullPivLu().solve(u));
  // Rounding scale of uᵀH⁻¹u.
  const double eps = std::numeric_limits<double>::epsilon();
  const double threshold = 8.0 * static_cast<double>(H.rows() + 1) * eps * u.squaredNorm() / sigma_min(H);
  out.holds = out.quadratic_form > threshold;
  return out;
}

CriticalFaceResult critical_face_check(const Matrix& core, const Vector& border, LambdaCase lambda_case,
                                       bool v0_negative, const Tolerances& tol) {
  const Eigen::Index n = core.rows();
  require_dim(core.cols() == n && border.size() == n, "critical_face_check: dimension mismatch");
  CriticalFaceResult out;
  const Matrix linearized = BorderedMatrix::make(core, border).negated_bottom_row();

  if (lambda_case == LambdaCase::Positive) {
    // Critical cone is all of ℝⁿ×ℝ: the only face pair asks for Aᵀu = 0 ⟹ u = 0.
    const bool ok = is_nonsingular(linearized, tol.rank);
    out.subchecks.emplace_back("full_space", ok);
    out.holds = ok;
    return out;
  }
  if (v0_negative) {
    // Critical cone ℝⁿ×{0}.
    const bool ok = is_nonsingular(core, tol.rank);
    out.subchecks.emplace_back("hyperplane", ok);
    out.holds = ok;
    return out;
  }
  // Critical cone ℝⁿ×ℝ₊ with faces ℝⁿ×{0} ⊂ ℝⁿ×ℝ₊.
  const bool small_small = is_nonsingular(core, tol.rank);
  const bool large_large = is_nonsingular(linearized, tol.rank);
  ConeSpec premise{joined(core, -border), {lifted(-border, 0.0), unit_last(n)}, {}};
  const ImplicationVerdict mixed =
      cone_implication(premise, Matrix::Identity(n + 1, n + 1), implication_options(tol));
  out.subchecks.emplace_back("face_pair_hyperplane", small_small);
  out.subchecks.emplace_back("face_pair_halfspace", large_large);
  out.subchecks.emplace_back("face_pair_mixed", mixed.holds());
  out.witness = mixed.witness;
  out.holds = small_small && large_large && mixed.holds();
  return out;
}

}  // namespace stabcert
