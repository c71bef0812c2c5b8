#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stabcert/general_certificates.hpp"
#include "stabcert/qp_certificates.hpp"

namespace stabcert {

enum class AnalysisStatus { Ok, NotStationary, MfcqFails };

const char* to_string(AnalysisStatus s);

/// Process exit code: 0 ok, 2 not stationary, 3 MFCQ fails.
int exit_code(AnalysisStatus s);

/// Closed-form QP tests evaluated for the case at hand.
struct QpSummary {
  std::optional<NonsingularityTest> interior;
  std::optional<NonsingularityTest> bordered;
  std::optional<ZeroLambdaSufficient> zero_sufficient;
  std::optional<ImplicationVerdict> zero_necessary;
};

struct AnalysisReport {
  AnalysisStatus status = AnalysisStatus::Ok;
  Vector x_bar;
  StationarityCheck stationarity;
  std::optional<StabilityReport> stability;  // set when status == Ok
  QpSummary qp;
  std::vector<std::string> warnings;
};

/// Stationarity, case split, kernel conditions, closed-form QP tests and the merged verdicts.
AnalysisReport analyze_instance(const QpInstance& instance, const Vector& x_bar, const Tolerances& tol = {});

/// Same pipeline on a snapshot without the QP closed forms.
AnalysisReport analyze_snapshot(const DerivativeSnapshot& s, const Tolerances& tol = {});

std::string to_json(const AnalysisReport& r);

namespace condition_id {
inline constexpr const char* kQpInterior = "qp.interior_nonsingular";
inline constexpr const char* kQpBordered = "qp.bordered_nonsingular";
inline constexpr const char* kQpZeroBordered = "qp.zero.bordered_nonsingular";
inline constexpr const char* kQpZeroAscent = "qp.zero.ascent_implication";
inline constexpr const char* kQpZeroOrthogonal = "qp.zero.kernel_orthogonality";
inline constexpr const char* kQpZeroNecessary = "qp.zero.necessary";
}  // namespace condition_id

}  // namespace stabcert
