#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stabcert/linalg.hpp"

namespace stabcert {

/// Raised when D or A is asymmetric beyond the accepted noise level.
class SymmetryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parameter tuple w = (D, c, A, b, alpha) of
///   minimize ½xᵀDx + cᵀx  subject to  ½xᵀAx + bᵀx + alpha ≤ 0.
///
/// D and A are stored exactly symmetric. Construction symmetrizes inputs
/// as (M+Mᵀ)/2: silently when the relative asymmetry is at most
/// kSymmetryNoise, with a recorded warning up to kSymmetryLimit, and
/// rejects anything beyond that.
class QpInstance {
 public:
  static constexpr double kSymmetryNoise = 1e-12;
  static constexpr double kSymmetryLimit = 1e-6;

  QpInstance(Matrix D, Vector c, Matrix A, Vector b, double alpha);

  Eigen::Index dim() const { return c_.size(); }
  const Matrix& D() const { return D_; }
  const Vector& c() const { return c_; }
  const Matrix& A() const { return A_; }
  const Vector& b() const { return b_; }
  double alpha() const { return alpha_; }

  /// Dimension of the parameter space, (n²+n) + (n²+n+1).
  Eigen::Index param_dim() const;

  const std::vector<std::string>& warnings() const { return warnings_; }

  /// (tA, tb, t·alpha); the stationary set is unchanged and multipliers scale by 1/t.
  QpInstance with_scaled_constraint(double t) const;

 private:
  Matrix D_;
  Vector c_;
  Matrix A_;
  Vector b_;
  double alpha_;
  std::vector<std::string> warnings_;
};

struct Evaluation {
  double objective;
  double constraint;
  Vector grad_obj;
  Vector grad_con;
};

Evaluation evaluate(const QpInstance& instance, const Vector& x);

/// A direction or displacement (dD, dc, dA, db, dalpha) in parameter space.
struct ParameterDelta {
  Matrix D;
  Vector c;
  Matrix A;
  Vector b;
  double alpha = 0.0;

  static ParameterDelta zero(Eigen::Index n);

  /// ‖D‖_F + ‖c‖ + ‖A‖_F + ‖b‖ + |alpha|.
  double sum_norm() const;
  /// Euclidean norm over all entries.
  double frobenius_norm() const;
  ParameterDelta scaled(double t) const;
};

/// w + t·delta; throws DimensionError on a size mismatch.
QpInstance displaced(const QpInstance& instance, const ParameterDelta& delta, double t = 1.0);

/// Parameter-derivative blocks of a snapshot; rows index the d parameters.
struct ParameterBlocks {
  Matrix hess_wx_f0;  // d × n
  Vector grad_w_F;    // d
  Matrix hess_wx_F;   // d × n
};

/// First and second derivatives of f0 and F at a reference pair (x̄, w̄).
///
/// `params` may be absent only when `qp_structure` is set: the quadratic
/// block structure already guarantees trivial kernels of ∇²wx f0 and of the
/// stacked parameter matrices, and certificate code uses that fact directly.
struct DerivativeSnapshot {
  Vector x_bar;
  Vector grad_f0;
  Matrix hess_xx_f0;
  double F_value = 0.0;
  Vector grad_x_F;
  Matrix hess_xx_F;
  std::optional<ParameterBlocks> params;
  bool qp_structure = false;
  /// |alpha| for QP snapshots; scales the constraint-activity tolerance.
  double activity_scale = 0.0;

  Eigen::Index dim() const { return x_bar.size(); }

  /// Throws DimensionError / SymmetryError / std::invalid_argument.
  void validate() const;
};

/// Largest n for which the QP parameter blocks are materialized.
inline constexpr Eigen::Index kMaxMaterializedDim = 32;

DerivativeSnapshot qp_snapshot(const QpInstance& instance, const Vector& x_bar);

/// Parameter blocks of the QP family at x̄ with parameters ordered
/// (D row-major, c, A row-major, b, alpha).
ParameterBlocks qp_parameter_blocks(const Vector& x_bar);

}  // namespace stabcert
