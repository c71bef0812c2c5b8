#pragma once

#include <optional>

#include "stabcert/linalg.hpp"

namespace stabcert {

enum class FeasibilityStatus { Feasible, Infeasible, IterationCap };

struct FeasibilityResult {
  FeasibilityStatus status = FeasibilityStatus::Infeasible;
  Vector point;  // valid when Feasible
  int iterations = 0;
};

/// Decides whether {y ∈ ℝᵏ | G y ≥ h} is nonempty, with y free.
///
/// Dense phase-one simplex with Bland's rule on the standard form
/// G(p − q) − s (+ a) = h. The iteration cap is 10·(variables + constraints);
/// hitting it reports IterationCap rather than a verdict.
FeasibilityResult find_feasible_point(const Matrix& G, const Vector& h,
                                      double feasibility_tol = 1e-9);

}  // namespace stabcert
