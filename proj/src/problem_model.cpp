#include "stabcert/problem_model.hpp"

#include <cmath>
#include <sstream>

namespace stabcert {

namespace {

Matrix symmetrized(const Matrix& m, const char* name, std::vector<std::string>& warnings) {
  const double asym = relative_asymmetry(m);
  if (asym > QpInstance::kSymmetryLimit) {
    std::ostringstream os;
    os << name << " is not symmetric (relative asymmetry " << asym << ")";
    throw SymmetryError(os.str());
  }
  if (asym > QpInstance::kSymmetryNoise) {
    std::ostringstream os;
    os << name << " symmetrized (relative asymmetry " << asym << ")";
    warnings.push_back(os.str());
  }
  return 0.5 * (m + m.transpose());
}

}  // namespace

QpInstance::QpInstance(Matrix D, Vector c, Matrix A, Vector b, double alpha)
    : c_(std::move(c)), b_(std::move(b)), alpha_(alpha) {
  const Eigen::Index n = c_.size();
  require_dim(n >= 1, "QpInstance: dimension must be at least 1");
  require_dim(D.rows() == n && D.cols() == n, "QpInstance: D must be n×n");
  require_dim(A.rows() == n && A.cols() == n, "QpInstance: A must be n×n");
  require_dim(b_.size() == n, "QpInstance: b must have length n");
  if (!D.allFinite() || !A.allFinite() || !c_.allFinite() || !b_.allFinite() || !std::isfinite(alpha))
    throw std::invalid_argument("QpInstance: non-finite data");
  D_ = symmetrized(D, "D", warnings_);
  A_ = symmetrized(A, "A", warnings_);
}

Eigen::Index QpInstance::param_dim() const {
  const Eigen::Index n = dim();
  return (n * n + n) + (n * n + n + 1);
}

QpInstance QpInstance::with_scaled_constraint(double t) const {
  return QpInstance(D_, c_, t * A_, t * b_, t * alpha_);
}

Evaluation evaluate(const QpInstance& p, const Vector& x) {
  require_dim(x.size() == p.dim(), "evaluate: x has wrong length");
  Evaluation e;
  const Vector Dx = p.D() * x;
  const Vector Ax = p.A() * x;
  e.objective = 0.5 * x.dot(Dx) + p.c().dot(x);
  e.constraint = 0.5 * x.dot(Ax) + p.b().dot(x) + p.alpha();
  e.grad_obj = Dx + p.c();
  e.grad_con = Ax + p.b();
  return e;
}

ParameterDelta ParameterDelta::zero(Eigen::Index n) {
  return ParameterDelta{Matrix::Zero(n, n), Vector::Zero(n), Matrix::Zero(n, n), Vector::Zero(n), 0.0};
}

double ParameterDelta::sum_norm() const {
  return D.norm() + c.norm() + A.norm() + b.norm() + std::abs(alpha);
}

double ParameterDelta::frobenius_norm() const {
  return std::sqrt(D.squaredNorm() + c.squaredNorm() + A.squaredNorm() + b.squaredNorm() + alpha * alpha);
}

ParameterDelta ParameterDelta::scaled(double t) const {
  return ParameterDelta{t * D, t * c, t * A, t * b, t * alpha};
}

QpInstance displaced(const QpInstance& p, const ParameterDelta& d, double t) {
  const Eigen::Index n = p.dim();
  require_dim(d.D.rows() == n && d.D.cols() == n && d.A.rows() == n && d.A.cols() == n &&
                  d.c.size() == n && d.b.size() == n,
              "displaced: parameter delta has wrong shape");
  return QpInstance(p.D() + t * d.D, p.c() + t * d.c, p.A() + t * d.A, p.b() + t * d.b, p.alpha() + t * d.alpha);
}

ParameterBlocks qp_parameter_blocks(const Vector& x) {
  const Eigen::Index n = x.size();
  const Eigen::Index nn = n * n;
  const Eigen::Index d = 2 * (nn + n) + 1;
  // Row offsets of the D, c, A, b, alpha groups.
  const Eigen::Index oD = 0, oc = nn, oA = nn + n, ob = 2 * nn + n, oalpha = 2 * nn + 2 * n;

  ParameterBlocks blk;
  blk.hess_wx_f0 = Matrix::Zero(d, n);
  blk.hess_wx_F = Matrix::Zero(d, n);
  blk.grad_w_F = Vector::Zero(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    // Block i of the D-rows carries x̄ in column i; the c-rows are the identity.
    blk.hess_wx_f0.block(oD + i * n, i, n, 1) = x;
    blk.hess_wx_f0(oc + i, i) = 1.0;
    blk.hess_wx_F.block(oA + i * n, i, n, 1) = x;
    blk.hess_wx_F(ob + i, i) = 1.0;
    for (Eigen::Index j = 0; j < n; ++j) blk.grad_w_F(oA + i * n + j) = 0.5 * x(i) * x(j);
    blk.grad_w_F(ob + i) = x(i);
  }
  blk.grad_w_F(oalpha) = 1.0;
  return blk;
}

DerivativeSnapshot qp_snapshot(const QpInstance& p, const Vector& x_bar) {
  require_dim(x_bar.size() == p.dim(), "qp_snapshot: x_bar has wrong length");
  const Evaluation e = evaluate(p, x_bar);
  DerivativeSnapshot s;
  s.x_bar = x_bar;
  s.grad_f0 = e.grad_obj;
  s.hess_xx_f0 = p.D();
  s.F_value = e.constraint;
  s.grad_x_F = e.grad_con;
  s.hess_xx_F = p.A();
  s.qp_structure = true;
  s.activity_scale = std::abs(p.alpha());
  if (p.dim() <= kMaxMaterializedDim) s.params = qp_parameter_blocks(x_bar);
  return s;
}

void DerivativeSnapshot::validate() const {
  const Eigen::Index n = dim();
  require_dim(n >= 1, "snapshot: empty x_bar");
  require_dim(grad_f0.size() == n, "snapshot: grad_f0 has wrong length");
  require_dim(grad_x_F.size() == n, "snapshot: grad_x_F has wrong length");
  require_dim(hess_xx_f0.rows() == n && hess_xx_f0.cols() == n, "snapshot: hess_xx_f0 must be n×n");
  require_dim(hess_xx_F.rows() == n && hess_xx_F.cols() == n, "snapshot: hess_xx_F must be n×n");
  if (relative_asymmetry(hess_xx_f0) > QpInstance::kSymmetryLimit)
    throw SymmetryError("snapshot: hess_xx_f0 is not symmetric");
  if (relative_asymmetry(hess_xx_F) > QpInstance::kSymmetryLimit)
    throw SymmetryError("snapshot: hess_xx_F is not symmetric");
  if (!params) {
    if (!qp_structure)
      throw std::invalid_argument("snapshot: parameter blocks are required without qp_structure");
    return;
  }
  const Eigen::Index d = params->grad_w_F.size();
  require_dim(d >= 1, "snapshot: empty parameter space");
  require_dim(params->hess_wx_f0.rows() == d && params->hess_wx_f0.cols() == n,
              "snapshot: hess_wx_f0 must be d×n");
  require_dim(params->hess_wx_F.rows() == d && params->hess_wx_F.cols() == n,
              "snapshot: hess_wx_F must be d×n");
}

}  // namespace stabcert
