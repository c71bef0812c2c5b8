#pragma once

#include <optional>
#include <vector>

#include "stabcert/linalg.hpp"

namespace stabcert {

/// Orthonormal basis of a subspace of ℝ^ambient_dim, stored as columns.
struct SubspaceBasis {
  Eigen::Index ambient_dim = 0;
  Matrix vectors;  // ambient_dim × k

  Eigen::Index size() const { return vectors.cols(); }
  bool trivial() const { return vectors.cols() == 0; }
};

/// Basis of {z | Mz = 0}. Rank is decided by singular values above the
/// policy threshold. A matrix with zero rows has the whole space as kernel.
SubspaceBasis kernel_basis(const Matrix& M, const RankPolicy& policy = {});

/// True iff ‖T v‖ ≤ tol·(1 + ‖T‖) for every basis vector v.
bool subspace_contained_in_kernel(const SubspaceBasis& B, const Matrix& T,
                                  double tol = 1e-9);

/// ker(M1) ∩ ker(extra_rows), computed as the kernel of the stacked matrix.
SubspaceBasis intersect_with_product_space(const Matrix& M1, const Matrix& extra_rows,
                                           const RankPolicy& policy = {});

/// Convex cone {z | Ez = 0, σᵀz ≥ 0 ∀σ, sᵀz > 0 ∀s}.
struct ConeSpec {
  Matrix eq_matrix;                     // rows = equations; may have zero rows
  std::vector<Vector> nonneg_functionals;
  std::vector<Vector> strict_functionals;

  Eigen::Index ambient_dim() const { return eq_matrix.cols(); }

  /// A cone on ℝ^dim with no equations.
  static ConeSpec free(Eigen::Index dim) { return ConeSpec{Matrix(0, dim), {}, {}}; }
};

enum class Outcome { Holds, Fails, Indeterminate };

const char* to_string(Outcome o);

struct ImplicationVerdict {
  Outcome outcome = Outcome::Holds;
  std::optional<Vector> witness;  // unit-norm violator when outcome == Fails
  bool vacuous = false;           // premise (with strict part) is empty

  bool holds() const { return outcome == Outcome::Holds; }
};

struct ImplicationOptions {
  RankPolicy rank;
  /// Functionals whose restriction to ker E is at most this (relative) are zero there.
  double zero_tol = 1e-10;
  /// Phase-one objective at or below this counts as feasible.
  double feasibility_tol = 1e-9;
  /// Minimum ‖T ẑ‖ of a unit witness; smaller violations are rounding noise.
  double violation_tol = 1e-8;
};

/// Decides whether every z in the premise cone satisfies Tz = 0.
///
/// The premise is a cone, so the implication fails iff for some row r of T
/// and sign ς the system {Ez = 0, σᵀz ≥ 0, sᵀz ≥ 1, ς·rᵀz ≥ 1} is feasible.
/// Each system is solved by phase-one simplex in coordinates of ker E.
/// An exceeded iteration cap yields Outcome::Indeterminate.
ImplicationVerdict cone_implication(const ConeSpec& premise, const Matrix& conclusion,
                                    const ImplicationOptions& options = {});

/// min over γ ≥ 0 of ‖g − γu‖.
double distance_to_ray(const Vector& g, const Vector& u);

}  // namespace stabcert
