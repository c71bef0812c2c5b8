#include "stabcert/stationarity.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "stabcert/cone_algebra.hpp"

namespace stabcert {

const char* to_string(CaseTag c) {
  switch (c) {
    case CaseTag::Interior: return "Interior";
    case CaseTag::BoundaryPositive: return "BoundaryPositive";
    case CaseTag::BoundaryZero: return "BoundaryZero";
  }
  return "?";
}

namespace {

double act_tol(const DerivativeSnapshot& s, const Tolerances& tol) {
  return tol.activity(s.activity_scale);
}

}  // namespace

bool check_mfcq(const DerivativeSnapshot& s, const Tolerances& tol) {
  return s.F_value < -act_tol(s, tol) || s.grad_x_F.norm() > tol.base;
}

double stationarity_residual(const DerivativeSnapshot& s, const Tolerances& tol) {
  if (!check_mfcq(s, tol)) throw MfcqError("MFCQ fails: active constraint with vanishing gradient");
  const double ta = act_tol(s, tol);
  if (s.F_value < -ta) return s.grad_f0.norm();
  if (s.F_value > ta) return std::numeric_limits<double>::infinity();
  return distance_to_ray(-s.grad_f0, s.grad_x_F);
}

double lagrange_multiplier(const DerivativeSnapshot& s, const Tolerances& tol) {
  if (std::abs(s.F_value) > act_tol(s, tol))
    throw StationarityError("lagrange_multiplier: constraint is not active");
  const double un = s.grad_x_F.norm();
  if (un <= tol.base) throw MfcqError("lagrange_multiplier: vanishing constraint gradient");
  const double lambda = -s.grad_f0.dot(s.grad_x_F) / (un * un);
  const double gap = (s.grad_f0 + lambda * s.grad_x_F).norm();
  if (gap > tol.stationarity(s.grad_f0.norm())) {
    std::ostringstream os;
    os << "lagrange_multiplier: gradient equation inconsistent (residual " << gap << ")";
    throw StationarityError(os.str());
  }
  if (lambda < -tol.multiplier()) {
    std::ostringstream os;
    os << "lagrange_multiplier: negative multiplier " << lambda << " (not a KKT point)";
    throw StationarityError(os.str());
  }
  return std::abs(lambda) <= tol.multiplier() ? 0.0 : lambda;
}

CaseInfo classify_case(const DerivativeSnapshot& s, const Tolerances& tol) {
  const double ta = act_tol(s, tol);
  CaseInfo info;
  info.activity_residual = std::abs(s.F_value);
  if (s.F_value > ta) throw StationarityError("classify_case: infeasible reference point");
  if (s.F_value < -ta) {
    if (s.grad_f0.norm() > tol.stationarity(s.grad_f0.norm()))
      throw StationarityError("classify_case: interior point with nonzero objective gradient");
    info.tag = CaseTag::Interior;
    return info;
  }
  info.lambda = lagrange_multiplier(s, tol);
  info.tag = info.lambda > tol.multiplier() ? CaseTag::BoundaryPositive : CaseTag::BoundaryZero;
  return info;
}

StationarityCheck check_stationarity(const DerivativeSnapshot& s, const Tolerances& tol) {
  StationarityCheck out;
  out.mfcq_ok = check_mfcq(s, tol);
  out.feasible = s.F_value <= act_tol(s, tol);
  if (!out.mfcq_ok) {
    out.residual = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.residual = stationarity_residual(s, tol);
  out.is_stationary = out.residual <= tol.stationarity(s.grad_f0.norm());
  if (out.is_stationary) out.case_info = classify_case(s, tol);
  return out;
}

}  // namespace stabcert
