#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stabcert/cone_algebra.hpp"
#include "stabcert/stationarity.hpp"

namespace stabcert {

/// Matrices and cones of the kernel conditions at (x̄, w̄).
///
/// A2 and A2p are absent when the snapshot has no parameter blocks; that is
/// only allowed under qp_structure, where both have trivial kernels.
struct CertificateMatrices {
  Matrix A1;   // [∇²xx f0 + λ∇²xx F | ∇xF]
  std::optional<Matrix> A2;   // [∇²wx f0 + λ∇²wx F | ∇wF]
  Matrix A1p;  // [∇²xx f0 | ∇xF]
  std::optional<Matrix> A2p;  // [∇²wx f0 | ∇wF]
  ConeSpec delta1;  // ker A1p ∩ {∇xFᵀv > 0, γ ≥ 0}
  ConeSpec delta2;  // ker ∇²xx f0 ∩ {∇xFᵀv < 0}
  ConeSpec delta3;  // ker A1p ∩ {∇xFᵀv ≥ 0, γ ≥ 0}
};

CertificateMatrices build_matrices(const DerivativeSnapshot& s, const CaseInfo& info);

enum class Verdict { Yes, No, Unknown };

const char* to_string(Verdict v);

struct ConditionResult {
  std::string id;
  Outcome outcome = Outcome::Holds;
  std::optional<Vector> witness;
  bool vacuous = false;

  bool holds() const { return outcome == Outcome::Holds; }
};

struct StabilityReport {
  CaseInfo case_info;
  std::vector<ConditionResult> conditions;
  Verdict lipschitz_like = Verdict::Unknown;
  /// "iff", "sufficient", "necessary" or "none": which kind of condition decided lipschitz_like.
  std::string lipschitz_basis = "none";
  Verdict robinson_stable = Verdict::Unknown;
  Verdict strong_regular = Verdict::Unknown;
  /// Strong regularity holds, so S has a Lipschitz single-valued localization around (w̄, x̄).
  bool localization = false;

  const ConditionResult* find(const std::string& id) const;
};

/// Interior point: kernel-intersection, kernel-inclusion and nonsingular-Hessian conditions.
std::vector<ConditionResult> check_interior(const DerivativeSnapshot& s, const Tolerances& tol = {});

/// Active point with λ > 0, via L = ker A1 ∩ (ker ∇xF × ℝ).
std::vector<ConditionResult> check_boundary_positive(const DerivativeSnapshot& s, const CaseInfo& info,
                                                     const Tolerances& tol = {});

/// Active point with λ = 0: the four sufficient conditions and the necessary cone condition.
std::vector<ConditionResult> check_boundary_zero(const DerivativeSnapshot& s, const CaseInfo& info,
                                                 const Tolerances& tol = {});

/// Runs the case-specific conditions plus strong regularity and aggregates the verdicts.
StabilityReport stability_verdict(const DerivativeSnapshot& s, const CaseInfo& info,
                                  const Tolerances& tol = {});

namespace condition_id {
inline constexpr const char* kInteriorIntersection = "interior.kernel_intersection_trivial";
inline constexpr const char* kInteriorInclusion = "interior.kernel_inclusion";
inline constexpr const char* kInteriorNonsingular = "interior.hessian_nonsingular";
inline constexpr const char* kPositiveJoint = "positive.joint_kernel_trivial";
inline constexpr const char* kPositiveInclusion = "positive.kernel_inclusion";
inline constexpr const char* kPositiveReduced = "positive.reduced_kernel_trivial";
inline constexpr const char* kZeroIntersection = "zero.kernel_intersection_trivial";
inline constexpr const char* kZeroTangent = "zero.tangent_kernel_inclusion";
inline constexpr const char* kZeroAscent = "zero.ascent_cone_inclusion";
inline constexpr const char* kZeroDescent = "zero.descent_cone_inclusion";
inline constexpr const char* kZeroNecessary = "zero.necessary_cone";
inline constexpr const char* kStrongInterior = "strong.interior_hessian_nonsingular";
inline constexpr const char* kStrongBordered = "strong.bordered_nonsingular";
inline constexpr const char* kStrongZeroSchur = "strong.zero_schur_positive";
inline constexpr const char* kStrongCriticalFace = "strong.critical_face";
}  // namespace condition_id

}  // namespace stabcert
