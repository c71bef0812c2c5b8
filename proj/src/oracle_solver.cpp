#include "stabcert/oracle_solver.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "stabcert/cone_algebra.hpp"

namespace stabcert {

const char* to_string(PointKind k) { return k == PointKind::Interior ? "interior" : "boundary"; }

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Minimizer of sᵀHs − 2gᵀs over the unit sphere, H symmetric positive semidefinite.
Vector sphere_minimizer(const Matrix& H, const Vector& g) {
  const Eigen::Index k = H.rows();
  Eigen::SelfAdjointEigenSolver<Matrix> es(H);
  const Vector& sig = es.eigenvalues();
  const Matrix& V = es.eigenvectors();
  const Vector h = V.transpose() * g;
  const double hn = h.norm();
  const double group_tol = 1e-12 * std::max(1.0, std::abs(sig(k - 1)));

  Eigen::Index g1 = 0;
  while (g1 < k && sig(g1) <= sig(0) + group_tol) ++g1;
  const double w1 = h.head(g1).norm();

  Vector y = Vector::Zero(k);
  if (w1 <= 1e-14 * std::max(hn, std::numeric_limits<double>::min())) {
    double rest = 0.0;
    for (Eigen::Index i = g1; i < k; ++i) {
      y(i) = h(i) / (sig(i) - sig(0));
      rest += y(i) * y(i);
    }
    if (rest <= 1.0) {
      y(0) = std::sqrt(1.0 - rest);
      return V * y;
    }
  }
  // φ(t) = Σ hᵢ²/(σᵢ − σ₁ + t)² is decreasing with φ(‖h‖) ≤ 1.
  auto phi = [&](double t) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      const double d = (sig(i) - sig(0)) + t;
      acc += h(i) * h(i) / (d * d);
    }
    return acc;
  };
  double lo = 0.0, hi = hn;
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (phi(mid) > 1.0 ? lo : hi) = mid;
  }
  for (Eigen::Index i = 0; i < k; ++i) y(i) = h(i) / ((sig(i) - sig(0)) + hi);
  const double yn = y.norm();
  if (yn > 0.0) y /= yn;
  return V * y;
}

Vector least_squares_parameter(const Matrix& B, const Vector& r) {
  return B.completeOrthogonalDecomposition().solve(r);
}

}  // namespace

Vector StationaryFamily::nearest_parameter(const Vector& x) const {
  const Eigen::Index k = basis.cols();
  if (k == 0) return Vector::Zero(0);
  const Vector r = x - center;
  if (shape == FamilyShape::Affine) return least_squares_parameter(basis, r);
  if (shape == FamilyShape::Ball) {
    const Vector s = least_squares_parameter(basis, r);
    if (s.norm() <= 1.0) return s;
  }
  return sphere_minimizer(basis.transpose() * basis, basis.transpose() * r);
}

double StationaryFamily::distance(const Vector& x) const {
  return (x - point(nearest_parameter(x))).norm();
}

namespace {

double kkt_residual(const QpInstance& p, const Vector& x, double lambda, PointKind kind) {
  const Evaluation e = evaluate(p, x);
  double r = (e.grad_obj + lambda * e.grad_con).norm();
  if (kind == PointKind::Boundary) r += std::abs(e.constraint);
  return r;
}

bool same_point(const Vector& a, const Vector& b) {
  return (a - b).norm() <= 1e-9 * (1.0 + std::max(a.norm(), b.norm()));
}

void push_unique(StationarySet& set, StationaryPoint pt) {
  for (const auto& q : set.points)
    if (q.kind == pt.kind && same_point(q.x, pt.x)) return;
  set.points.push_back(std::move(pt));
}

void append(StationarySet& into, const StationarySet& from) {
  for (const auto& p : from.points) push_unique(into, p);
  for (const auto& f : from.families) into.families.push_back(f);
  into.complete = into.complete && from.complete;
  for (const auto& n : from.notes) into.notes.push_back(n);
}

/// Affine map x = e + M y carrying TRS coordinates back to the instance.
struct CoordinateMap {
  Vector e;
  Matrix M;
};

/// Boundary stationary points of min ½yᵀDy + cᵀy on ‖y‖² = r2, λ ≥ 0.
struct TrsRoots {
  std::vector<std::pair<Vector, double>> isolated;  // (y, λ)
  std::vector<StationaryFamily> families;           // in y coordinates
};

TrsRoots trs_secular(const Matrix& D, const Vector& c, double r2, double hard_case_tol) {
  const Eigen::Index n = D.rows();
  Eigen::SelfAdjointEigenSolver<Matrix> es(D);
  const Vector lam = es.eigenvalues();
  const Matrix& Q = es.eigenvectors();
  const Vector g = Q.transpose() * c;
  const double dnorm = std::max(std::abs(lam(0)), std::abs(lam(n - 1)));
  const double group_tol = 1e-12 * (1.0 + dnorm);
  const double hard_tol = hard_case_tol * c.norm();

  struct Group {
    Eigen::Index first, size;
    double value, weight;
    bool hard;
  };
  std::vector<Group> groups;
  for (Eigen::Index i = 0; i < n;) {
    Eigen::Index j = i + 1;
    while (j < n && lam(j) - lam(i) <= group_tol) ++j;
    const double value = lam.segment(i, j - i).mean();
    const double weight = g.segment(i, j - i).norm();
    groups.push_back({i, j - i, value, weight, weight <= hard_tol});
    i = j;
  }

  // ψ(λ) = Σ w²/(λ + λⱼ)² − r2, evaluated at λ = base + t so that the
  // denominator of the pole at `base` is exactly t.
  auto psi = [&](double base, double t) {
    double acc = 0.0;
    for (const auto& gr : groups) {
      if (gr.hard) continue;
      const double d = (base + gr.value) + t;
      acc += gr.weight * gr.weight / (d * d);
    }
    return acc - r2;
  };
  auto dpsi = [&](double base, double t) {
    double acc = 0.0;
    for (const auto& gr : groups) {
      if (gr.hard) continue;
      const double d = (base + gr.value) + t;
      acc -= 2.0 * gr.weight * gr.weight / (d * d * d);
    }
    return acc;
  };
  auto point_at = [&](double base, double t) {
    Vector y(n);
    for (const auto& gr : groups) {
      const double d = (base + gr.value) + t;
      for (Eigen::Index i = gr.first; i < gr.first + gr.size; ++i)
        y(i) = (gr.hard && std::abs(d) <= group_tol) ? 0.0 : -g(i) / d;
    }
    return Vector(Q * y);
  };

  std::vector<double> poles;
  for (const auto& gr : groups)
    if (!gr.hard && -gr.value >= 0.0) poles.push_back(-gr.value);
  std::sort(poles.begin(), poles.end());

  TrsRoots out;
  auto add_root = [&](double base, double t) { out.isolated.emplace_back(point_at(base, t), base + t); };

  // Root of ψ between t_lo and t_hi (relative to base), ψ(t_lo) and ψ(t_hi) of opposite signs.
  auto bisect = [&](double base, double t_lo, double t_hi) {
    const bool lo_positive = psi(base, t_lo) > 0.0;
    for (int it = 0; it < 3000; ++it) {
      const double mid = 0.5 * (t_lo + t_hi);
      if (mid <= std::min(t_lo, t_hi) || mid >= std::max(t_lo, t_hi)) break;
      ((psi(base, mid) > 0.0) == lo_positive ? t_lo : t_hi) = mid;
    }
    return 0.5 * (t_lo + t_hi);
  };

  const double tangency = 1e-12 * r2;
  std::vector<double> left_ends{0.0};
  for (double p : poles)
    if (p > 0.0) left_ends.push_back(p);
  for (std::size_t iv = 0; iv < left_ends.size(); ++iv) {
    const double a = left_ends[iv];
    const bool a_pole = std::find(poles.begin(), poles.end(), a) != poles.end();
    const bool last = iv + 1 == left_ends.size();
    const double b = last ? kInf : left_ends[iv + 1];

    if (last) {
      // ψ decreases from ψ(a⁺) to −r2.
      if (a_pole) {
        double hi = 1.0;
        while (psi(a, hi) > 0.0) hi *= 2.0;
        add_root(a, bisect(a, 0.0, hi));
      } else {
        const double f0 = psi(0.0, 0.0);
        if (std::abs(f0) <= tangency) {
          add_root(0.0, 0.0);
        } else if (f0 > 0.0) {
          double hi = 1.0;
          while (psi(0.0, hi) > 0.0) hi *= 2.0;
          add_root(0.0, bisect(0.0, 0.0, hi));
        }
      }
      continue;
    }

    // Minimizer of the convex ψ on (a, b), as an offset from a.
    const double width = b - a;
    double m;
    if (!a_pole && dpsi(a, 0.0) >= 0.0) {
      m = 0.0;
    } else {
      double lo = 0.0, hi = width;
      for (int it = 0; it < 3000; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (dpsi(a, mid) < 0.0 ? lo : hi) = mid;
      }
      m = 0.5 * (lo + hi);
    }
    const double fm = psi(a, m);
    if (fm > tangency) continue;
    if (fm >= -tangency) {
      add_root(a, m);
      continue;
    }
    const double f0 = a_pole ? kInf : psi(0.0, 0.0);
    if (f0 > tangency)
      add_root(a, bisect(a, 0.0, m));
    else if (f0 >= -tangency)
      add_root(0.0, 0.0);
    add_root(b, bisect(b, m - width, 0.0));
  }

  // Hard case: λ = −λⱼ for a group with vanishing weight.
  for (const auto& gr : groups) {
    if (!gr.hard || -gr.value < -group_tol) continue;
    const double lambda = std::max(0.0, -gr.value);
    Vector y = Vector::Zero(n);
    for (const auto& other : groups) {
      if (&other == &gr) continue;
      const double d = other.value - gr.value;
      for (Eigen::Index i = other.first; i < other.first + other.size; ++i)
        y(i) = other.hard ? 0.0 : -g(i) / d;
    }
    const double rho2 = y.squaredNorm();
    if (rho2 > r2 * (1.0 + 1e-12)) continue;
    const double rad = std::sqrt(std::max(0.0, r2 - rho2));
    const Vector center = Q * y;
    const Matrix slice = Q.middleCols(gr.first, gr.size);
    if (rad <= 1e-12 * std::sqrt(r2)) {
      out.isolated.emplace_back(center, lambda);
    } else if (gr.size == 1) {
      out.isolated.emplace_back(Vector(center + rad * slice.col(0)), lambda);
      out.isolated.emplace_back(Vector(center - rad * slice.col(0)), lambda);
    } else {
      StationaryFamily f;
      f.shape = FamilyShape::Sphere;
      f.center = center;
      f.basis = rad * slice;
      f.lambda = lambda;
      f.kind = PointKind::Boundary;
      out.families.push_back(std::move(f));
    }
  }
  return out;
}

StationarySet boundary_from_trs(const QpInstance& p, const Matrix& D, const Vector& c, double r2,
                                const CoordinateMap& map, const OracleOptions& opt) {
  StationarySet set;
  const TrsRoots roots = trs_secular(D, c, r2, opt.hard_case_tol);
  for (const auto& [y, lambda] : roots.isolated) {
    StationaryPoint pt;
    pt.x = map.e + map.M * y;
    pt.lambda = lambda;
    pt.kind = PointKind::Boundary;
    pt.isolated = true;
    pt.kkt_residual = kkt_residual(p, pt.x, lambda, PointKind::Boundary);
    push_unique(set, std::move(pt));
  }
  for (auto f : roots.families) {
    f.center = map.e + map.M * f.center;
    f.basis = map.M * f.basis;
    set.families.push_back(std::move(f));
  }
  return set;
}

bool is_identity(const Matrix& A, double tol) {
  return (A - Matrix::Identity(A.rows(), A.cols())).lpNorm<Eigen::Infinity>() <= tol;
}

}  // namespace

StationarySet solve_interior(const QpInstance& p, const OracleOptions& opt) {
  StationarySet set;
  const Tolerances& tol = opt.tol;
  const double act = tol.activity(std::abs(p.alpha()));

  if (is_nonsingular(p.D(), tol.rank)) {
    const Vector x = p.D().partialPivLu().solve(-p.c());
    const Evaluation e = evaluate(p, x);
    if (e.constraint < -act) {
      StationaryPoint pt;
      pt.x = x;
      pt.kind = PointKind::Interior;
      pt.kkt_residual = kkt_residual(p, x, 0.0, PointKind::Interior);
      set.points.push_back(std::move(pt));
    }
    return set;
  }

  const Vector x0 = p.D().completeOrthogonalDecomposition().solve(-p.c());
  if ((p.D() * x0 + p.c()).norm() > tol.stationarity(p.c().norm())) return set;

  const Matrix K = kernel_basis(p.D(), tol.rank).vectors;
  const Matrix M = K.transpose() * p.A() * K;
  const Vector g = K.transpose() * (p.A() * x0 + p.b());
  const double F0 = evaluate(p, x0).constraint;
  Eigen::SelfAdjointEigenSolver<Matrix> es(M);
  const double mnorm = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (es.eigenvalues()(0) > 1e-12 * mnorm) {
    const Vector t_star = es.eigenvectors() *
                          (es.eigenvalues().cwiseInverse().asDiagonal() * (es.eigenvectors().transpose() * (-g)));
    const double Fmin = F0 + 0.5 * g.dot(t_star);
    if (Fmin >= -act) return set;
    StationaryFamily f;
    f.shape = FamilyShape::Ball;
    f.center = x0 + K * t_star;
    f.basis = std::sqrt(-2.0 * Fmin) * K * es.eigenvectors() *
              es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    f.lambda = 0.0;
    f.kind = PointKind::Interior;
    StationaryPoint rep;
    rep.x = f.center;
    rep.kind = PointKind::Interior;
    rep.isolated = false;
    rep.kkt_residual = kkt_residual(p, rep.x, 0.0, PointKind::Interior);
    set.points.push_back(std::move(rep));
    set.families.push_back(std::move(f));
    return set;
  }
  StationaryFamily f;
  f.shape = FamilyShape::Affine;
  f.center = x0;
  f.basis = K;
  f.lambda = 0.0;
  f.kind = PointKind::Interior;
  set.families.push_back(std::move(f));
  set.complete = false;
  set.notes.push_back("interior family not bounded by the constraint; distances use the full affine set");
  return set;
}

StationarySet solve_trs_boundary(const QpInstance& p, const OracleOptions& opt) {
  const double scale = 1.0 + p.A().lpNorm<Eigen::Infinity>();
  if (!is_identity(p.A(), 1e-12 * scale) || p.b().lpNorm<Eigen::Infinity>() > 1e-12 * scale || !(p.alpha() < 0.0))
    throw std::invalid_argument("solve_trs_boundary: instance is not a trust-region subproblem");
  const Eigen::Index n = p.dim();
  const CoordinateMap map{Vector::Zero(n), Matrix::Identity(n, n)};
  return boundary_from_trs(p, p.D(), p.c(), -2.0 * p.alpha(), map, opt);
}

double default_lambda_max(const QpInstance& p) {
  const double num = 10.0 * (1.0 + p.D().norm() + p.c().norm());
  const double den = std::min(1.0, p.A().norm() + p.b().norm());
  return den > 0.0 ? num / den : num;
}

StationarySet solve_general_boundary(const QpInstance& p, const OracleOptions& opt) {
  StationarySet set;
  set.complete = false;
  const Eigen::Index n = p.dim();
  const double lambda_max = opt.lambda_max > 0.0 ? opt.lambda_max : default_lambda_max(p);
  const double act = opt.tol.activity(std::abs(p.alpha()));

  std::vector<double> poles;
  {
    Eigen::GeneralizedEigenSolver<Matrix> ges(p.D(), Matrix(-p.A()), false);
    const auto& al = ges.alphas();
    const auto& be = ges.betas();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(be(i)) <= 1e-14 * (1.0 + std::abs(al(i)))) continue;
      const std::complex<double> v = al(i) / be(i);
      if (std::abs(v.imag()) > 1e-9 * (1.0 + std::abs(v.real()))) continue;
      if (v.real() >= 0.0 && v.real() <= lambda_max) poles.push_back(v.real());
    }
    std::sort(poles.begin(), poles.end());
  }

  std::vector<double> grid;
  const int N = std::max(2, opt.grid_size);
  for (int i = 0; i < N; ++i) grid.push_back(lambda_max * i / (N - 1));
  for (double pole : poles)
    for (int k = 1; k <= 12; ++k) {
      const double d = std::pow(10.0, -k) * (1.0 + pole);
      if (pole - d >= 0.0) grid.push_back(pole - d);
      if (pole + d <= lambda_max) grid.push_back(pole + d);
    }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  struct Sample {
    bool ok;
    Vector x;
    double phi;
  };
  auto sample = [&](double lambda) {
    const Matrix H = p.D() + lambda * p.A();
    Eigen::FullPivLU<Matrix> lu(H);
    lu.setThreshold(1e-13);
    if (!lu.isInvertible()) return Sample{false, {}, 0.0};
    const Vector x = lu.solve(Vector(-(p.c() + lambda * p.b())));
    return Sample{true, x, evaluate(p, x).constraint};
  };
  auto accept = [&](const Vector& x, double lambda) {
    const Evaluation e = evaluate(p, x);
    if (e.grad_con.norm() <= opt.tol.base) return;
    if (std::abs(e.constraint) > act) return;
    StationaryPoint pt;
    pt.x = x;
    pt.lambda = lambda;
    pt.kind = PointKind::Boundary;
    pt.kkt_residual = kkt_residual(p, x, lambda, PointKind::Boundary);
    push_unique(set, std::move(pt));
  };

  std::vector<Sample> vals;
  vals.reserve(grid.size());
  for (double l : grid) vals.push_back(sample(l));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (vals[i].ok && std::abs(vals[i].phi) <= act) accept(vals[i].x, grid[i]);
    if (i + 1 == grid.size() || !vals[i].ok || !vals[i + 1].ok) continue;
    if ((vals[i].phi > 0.0) == (vals[i + 1].phi > 0.0)) continue;
    const bool straddles = std::any_of(poles.begin(), poles.end(),
                                       [&](double q) { return q > grid[i] && q < grid[i + 1]; });
    if (straddles) continue;
    double lo = grid[i], hi = grid[i + 1];
    const bool lo_positive = vals[i].phi > 0.0;
    Sample s = vals[i];
    for (int it = 0; it < std::max(60, opt.newton_iters); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      s = sample(mid);
      if (!s.ok) break;
      ((s.phi > 0.0) == lo_positive ? lo : hi) = mid;
    }
    const double root = 0.5 * (lo + hi);
    const Sample r = sample(root);
    if (r.ok) accept(r.x, root);
  }
  set.notes.push_back("boundary points from a multiplier scan on [0, " + std::to_string(lambda_max) + "]");
  return set;
}

StationarySet solve_stationary_set(const QpInstance& p, const OracleOptions& opt) {
  StationarySet set = solve_interior(p, opt);
  const Eigen::Index n = p.dim();

  Eigen::SelfAdjointEigenSolver<Matrix> es(p.A(), Eigen::EigenvaluesOnly);
  const double amax = es.eigenvalues().cwiseAbs().maxCoeff();
  if (amax > 0.0 && es.eigenvalues()(0) > 1e-12 * amax) {
    const Eigen::LLT<Matrix> llt(p.A());
    const Matrix Linv = llt.matrixL().solve(Matrix::Identity(n, n));
    const Matrix M = Linv.transpose();  // L⁻ᵀ
    const Vector e = llt.solve(Vector(-p.b()));
    const double alpha_red = p.alpha() + 0.5 * p.b().dot(e);
    const double act = opt.tol.activity(std::abs(p.alpha()));
    if (alpha_red > -act) {
      set.notes.push_back("feasible set is empty or a single point without constraint qualification");
      if (alpha_red >= -act && alpha_red <= act) set.complete = false;
      return set;
    }
    const Matrix Dr = M.transpose() * p.D() * M;
    const Vector cr = M.transpose() * (p.D() * e + p.c());
    append(set, boundary_from_trs(p, 0.5 * (Dr + Dr.transpose()), cr, -2.0 * alpha_red, {e, M}, opt));
    return set;
  }
  append(set, solve_general_boundary(p, opt));
  return set;
}

double distance_to_stationary_set(const Vector& x, const StationarySet& set) {
  double best = kInf;
  for (const auto& pt : set.points) best = std::min(best, (x - pt.x).norm());
  for (const auto& f : set.families) best = std::min(best, f.distance(x));
  return best;
}

std::optional<Vector> nearest_stationary_point(const Vector& x, const StationarySet& set) {
  std::optional<Vector> best;
  double best_d = kInf;
  for (const auto& pt : set.points) {
    const double d = (x - pt.x).norm();
    if (d < best_d) {
      best_d = d;
      best = pt.x;
    }
  }
  for (const auto& f : set.families) {
    const Vector y = f.point(f.nearest_parameter(x));
    const double d = (x - y).norm();
    if (d < best_d) {
      best_d = d;
      best = y;
    }
  }
  return best;
}

}  // namespace stabcert
