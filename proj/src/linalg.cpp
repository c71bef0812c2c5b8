#include "stabcert/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace stabcert {

Vector singular_values(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return Vector(0);
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues();
}

double sigma_min(const Matrix& m) {
  require_dim(m.rows() == m.cols(), "sigma_min: matrix must be square");
  if (m.rows() == 0) return 0.0;
  const Vector s = singular_values(m);
  return s(s.size() - 1);
}

Eigen::Index numerical_rank(const Matrix& m, const RankPolicy& policy) {
  const Vector s = singular_values(m);
  if (s.size() == 0) return 0;
  const double tau = policy.threshold(m.rows(), m.cols(), s(0));
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tau) ++r;
  return r;
}

bool is_nonsingular(const Matrix& m, const RankPolicy& policy) {
  require_dim(m.rows() == m.cols(), "is_nonsingular: matrix must be square");
  return numerical_rank(m, policy) == m.rows();
}

double determinant(const Matrix& m) {
  require_dim(m.rows() == m.cols(), "determinant: matrix must be square");
  if (m.rows() == 0) return 1.0;
  return m.partialPivLu().determinant();
}

double relative_asymmetry(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const double scale = m.cwiseAbs().rowwise().sum().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().rowwise().sum().maxCoeff();
  if (scale == 0.0) return asym == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return asym / scale;
}

}  // namespace stabcert
