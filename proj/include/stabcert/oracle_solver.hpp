#pragma once

#include <string>
#include <vector>

#include "stabcert/problem_model.hpp"
#include "stabcert/tolerances.hpp"

namespace stabcert {

enum class PointKind { Interior, Boundary };

const char* to_string(PointKind k);

struct StationaryPoint {
  Vector x;
  double lambda = 0.0;
  PointKind kind = PointKind::Interior;
  bool isolated = true;
  double kkt_residual = 0.0;
};

enum class FamilyShape { Sphere, Ball, Affine };

/// Non-isolated stationary points {center + basis·s} with ‖s‖ = 1 (Sphere),
/// ‖s‖ ≤ 1 (Ball) or s free (Affine).
struct StationaryFamily {
  FamilyShape shape = FamilyShape::Sphere;
  Vector center;
  Matrix basis;  // n × k
  double lambda = 0.0;
  PointKind kind = PointKind::Boundary;

  Vector point(const Vector& s) const { return center + basis * s; }
  /// Parameter s of a nearest family member to x.
  Vector nearest_parameter(const Vector& x) const;
  double distance(const Vector& x) const;
};

struct StationarySet {
  std::vector<StationaryPoint> points;
  std::vector<StationaryFamily> families;
  /// True when the enumeration is exhaustive (interior and Cholesky/TRS modes).
  bool complete = true;
  std::vector<std::string> notes;

  bool empty() const { return points.empty() && families.empty(); }
};

struct OracleOptions {
  Tolerances tol;
  /// Grid size of the general-A fallback.
  int grid_size = 4000;
  int newton_iters = 60;
  /// Upper end of the fallback multiplier scan; 0 picks the default horizon.
  double lambda_max = 0.0;
  /// Group weights at or below this fraction of ‖c‖ mark a hard case.
  double hard_case_tol = 1e-11;
};

/// Stationary points with ∇f0 = 0 and F < 0, plus the closed interior family
/// when D is singular.
StationarySet solve_interior(const QpInstance& instance, const OracleOptions& options = {});

/// Boundary stationary points of a trust-region instance (A = I, b = 0, α < 0)
/// by the secular equation; throws std::invalid_argument otherwise.
StationarySet solve_trs_boundary(const QpInstance& instance, const OracleOptions& options = {});

/// Best-effort boundary enumeration by a multiplier scan; complete = false.
StationarySet solve_general_boundary(const QpInstance& instance, const OracleOptions& options = {});

/// Default multiplier horizon of the fallback scan.
double default_lambda_max(const QpInstance& instance);

/// Interior plus boundary enumeration. Positive definite A reduces to a TRS.
StationarySet solve_stationary_set(const QpInstance& instance, const OracleOptions& options = {});

/// +∞ for an empty set.
double distance_to_stationary_set(const Vector& x, const StationarySet& set);

/// Nearest member of the set to x; empty optional for an empty set.
std::optional<Vector> nearest_stationary_point(const Vector& x, const StationarySet& set);

}  // namespace stabcert
