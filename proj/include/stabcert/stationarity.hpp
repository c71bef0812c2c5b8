#pragma once

#include <stdexcept>

#include "stabcert/problem_model.hpp"
#include "stabcert/tolerances.hpp"

namespace stabcert {

enum class CaseTag { Interior, BoundaryPositive, BoundaryZero };

const char* to_string(CaseTag c);

/// Activity regime of a stationary reference point and its multiplier.
struct CaseInfo {
  CaseTag tag = CaseTag::Interior;
  double lambda = 0.0;
  double activity_residual = 0.0;  // |F(x̄, w̄)|
};

/// The reference point fails a stationarity precondition.
class StationarityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// MFCQ does not hold at the reference point.
class MfcqError : public StationarityError {
 public:
  using StationarityError::StationarityError;
};

struct StationarityCheck {
  double residual = 0.0;
  bool is_stationary = false;
  bool mfcq_ok = true;
  bool feasible = true;
  std::optional<CaseInfo> case_info;  // set when stationary and MFCQ holds
};

/// True iff F < −tol_act or ‖∇x F‖ > tol.
bool check_mfcq(const DerivativeSnapshot& s, const Tolerances& tol = {});

/// Distance from 0 to ∇x f0 + N_C(x̄): ‖∇f0‖ inside, distance to the ray
/// −ℝ₊∇F on the boundary, +∞ for an infeasible point.
double stationarity_residual(const DerivativeSnapshot& s, const Tolerances& tol = {});

/// λ ≥ 0 with ∇f0 + λ∇F = 0 at an active stationary point.
double lagrange_multiplier(const DerivativeSnapshot& s, const Tolerances& tol = {});

CaseInfo classify_case(const DerivativeSnapshot& s, const Tolerances& tol = {});

/// Full check; never throws for non-stationary or MFCQ-violating points.
StationarityCheck check_stationarity(const DerivativeSnapshot& s, const Tolerances& tol = {});

}  // namespace stabcert
