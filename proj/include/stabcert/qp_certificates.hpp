#pragma once

#include <string>
#include <vector>

#include "stabcert/cone_algebra.hpp"
#include "stabcert/problem_model.hpp"
#include "stabcert/tolerances.hpp"

namespace stabcert {

/// [[core, border], [borderᵀ, 0]] — the stability matrix of a boundary point.
struct BorderedMatrix {
  Matrix core;
  Vector border;
  Matrix assembled;

  static BorderedMatrix make(const Matrix& core, const Vector& border);

  /// Same matrix with the bottom row negated, [[core, border], [−borderᵀ, 0]].
  Matrix negated_bottom_row() const;
};

/// Nonsingularity decided by σ_min > τ; the determinant is informational.
struct NonsingularityTest {
  double det = 0.0;
  double sigma_min = 0.0;
  bool nonsingular = false;
};

NonsingularityTest nonsingularity(const Matrix& m, const RankPolicy& policy = {});

/// Interior point: S is Lipschitz-like iff D is nonsingular.
NonsingularityTest interior_test(const Matrix& D, const RankPolicy& policy = {});

/// Active point with λ > 0: Lipschitz-like iff [[D+λA, Ax̄+b], [(Ax̄+b)ᵀ, 0]] is nonsingular.
/// Throws std::invalid_argument for λ ≤ 0.
NonsingularityTest bordered_test_positive_lambda(const QpInstance& instance, const Vector& x_bar,
                                                 double lambda, const RankPolicy& policy = {});

/// Sufficient conditions at an active point with λ = 0, u = Ax̄ + b:
///  bordered:   [[D, u], [uᵀ, 0]] nonsingular
///  ascent:     [Dv + γu = 0, γ ≥ 0] ⟹ uᵀv ≤ 0
///  orthogonal: ker D ⊂ u⊥
struct ZeroLambdaSufficient {
  NonsingularityTest bordered;
  ImplicationVerdict ascent;
  bool kernel_orthogonal = false;

  bool all_hold() const { return bordered.nonsingular && ascent.holds() && kernel_orthogonal; }
};

ZeroLambdaSufficient zero_lambda_sufficient(const Matrix& D, const Vector& u,
                                            const Tolerances& tol = {});
ZeroLambdaSufficient zero_lambda_sufficient(const QpInstance& instance, const Vector& x_bar,
                                            const Tolerances& tol = {});

/// Necessary condition at λ = 0: {Dv + γu = 0, uᵀv ≥ 0, γ ≥ 0} = {0}.
ImplicationVerdict zero_lambda_necessary(const Matrix& D, const Vector& u,
                                         const Tolerances& tol = {});
ImplicationVerdict zero_lambda_necessary(const QpInstance& instance, const Vector& x_bar,
                                         const Tolerances& tol = {});

/// Strong regularity of the KKT generalized equation at (x̄, λ), λ > 0:
/// the bordered Lagrangian Hessian is nonsingular.
bool strong_regularity_positive(const DerivativeSnapshot& s, double lambda,
                                const RankPolicy& policy = {});

struct ZeroLambdaRegularity {
  bool hessian_nonsingular = false;
  double quadratic_form = 0.0;  // ∇Fᵀ (∇²f0)⁻¹ ∇F, NaN when singular
  bool holds = false;
};

/// Strong regularity at λ = 0: ∇²xx f0 nonsingular and ∇Fᵀ(∇²xx f0)⁻¹∇F > 0.
ZeroLambdaRegularity strong_regularity_zero(const DerivativeSnapshot& s,
                                            const RankPolicy& policy = {});

enum class LambdaCase { Positive, Zero };

struct CriticalFaceResult {
  bool holds = false;
  std::vector<std::pair<std::string, bool>> subchecks;
  std::optional<Vector> witness;
};

/// Critical-face condition for K = ℝⁿ × ℝ₊ with the linearized operator
/// [[core, border], [−borderᵀ, 0]], enumerating the face pairs of the
/// critical cone. With λ = 0 the `v0_negative` switch selects the critical
/// cone ℝⁿ×{0} (base normal with negative last entry) versus ℝⁿ×ℝ₊.
CriticalFaceResult critical_face_check(const Matrix& core, const Vector& border, LambdaCase lambda_case,
                                       bool v0_negative, const Tolerances& tol = {});

}  // namespace stabcert
