#pragma once

#include <Eigen/Dense>

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace stabcert {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised when operand shapes do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical-rank policy shared by every kernel and nonsingularity decision.
///
/// The default threshold is tau = max(rows, cols) * eps * sigma_max. An
/// absolute override replaces it everywhere (CLI `--rank-tol`).
struct RankPolicy {
  std::optional<double> absolute_override;

  double threshold(Eigen::Index rows, Eigen::Index cols, double sigma_max) const {
    if (absolute_override) return *absolute_override;
    const double eps = std::numeric_limits<double>::epsilon();
    return static_cast<double>(std::max(rows, cols)) * eps * sigma_max;
  }
};

/// Singular values (descending) of a possibly empty matrix.
Vector singular_values(const Matrix& m);

/// Smallest singular value of a square matrix; 0 for an empty matrix.
double sigma_min(const Matrix& m);

/// Number of singular values above the policy threshold.
Eigen::Index numerical_rank(const Matrix& m, const RankPolicy& policy);

/// True when the square matrix has full numerical rank under the policy.
bool is_nonsingular(const Matrix& m, const RankPolicy& policy);

/// Determinant via partial-pivot LU; 1 for the 0x0 matrix.
double determinant(const Matrix& m);

/// ‖M − Mᵀ‖∞ / max(‖M‖∞, tiny)
double relative_asymmetry(const Matrix& m);

inline void require_dim(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

}  // namespace stabcert
