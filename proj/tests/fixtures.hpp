#pragma once

#include <cmath>
#include <random>

#include "stabcert/problem_model.hpp"

namespace fixtures {

using stabcert::Matrix;
using stabcert::QpInstance;
using stabcert::Vector;

inline const double kRoot63 = std::sqrt(63.0) / 8.0;

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

/// Unit ball, D = diag(0, −8), c = (1, 0).
inline QpInstance planar() {
  return QpInstance(vec({0.0, -8.0}).asDiagonal(), vec({1.0, 0.0}), Matrix::Identity(2, 2), Vector::Zero(2), -0.5);
}

/// Unit ball, D = diag(0, −8, −8), c = (1, 0, 0).
inline QpInstance spatial() {
  return QpInstance(vec({0.0, -8.0, -8.0}).asDiagonal(), vec({1.0, 0.0, 0.0}), Matrix::Identity(3, 3),
                    Vector::Zero(3), -0.5);
}

/// Point of the stationary circle of spatial() at angle t.
inline Vector spatial_circle(double t) { return vec({-0.125, kRoot63 * std::cos(t), kRoot63 * std::sin(t)}); }

inline Matrix random_symmetric(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix G(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) G(i, j) = g(rng);
  return 0.5 * (G + G.transpose());
}

inline Vector random_vector(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

/// Orthonormal basis of u⊥ (n × (n−1)).
inline Matrix orthogonal_complement(const Vector& u) {
  Eigen::JacobiSVD<Matrix> svd(Matrix(u.transpose()), Eigen::ComputeFullV);
  return svd.matrixV().rightCols(u.size() - 1);
}

/// A QP with x̄ active and stationary with multiplier lambda.
///
/// With `singular` set, the Lagrangian Hessian restricted to u⊥ has a zero
/// eigenvalue, so the bordered matrix is singular.
inline std::pair<QpInstance, Vector> active_instance(Eigen::Index n, double lambda, bool singular,
                                                     std::mt19937_64& rng) {
  const Matrix A = random_symmetric(n, rng);
  const Vector b = random_vector(n, rng);
  const Vector x = random_vector(n, rng);
  const Vector u = A * x + b;
  Matrix H = random_symmetric(n, rng, 2.0);
  if (singular && n > 1) {
    const Matrix Z = orthogonal_complement(u);
    Eigen::SelfAdjointEigenSolver<Matrix> es(Z.transpose() * H * Z);
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 2);
    const Eigen::Index k = pick(rng);
    const Vector q = Z * es.eigenvectors().col(k);
    H -= es.eigenvalues()(k) * q * q.transpose();
    H = 0.5 * (H + H.transpose());
  }
  const Matrix D = H - lambda * A;
  const Vector c = -D * x - lambda * u;
  const double alpha = -(0.5 * x.dot(A * x) + b.dot(x));
  return {QpInstance(D, c, A, b, alpha), x};
}

}  // namespace fixtures
