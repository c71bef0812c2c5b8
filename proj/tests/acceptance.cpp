#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "stabcert/analysis.hpp"
#include "stabcert/empirical_verifier.hpp"
#include "stabcert/general_certificates.hpp"
#include "stabcert/oracle_solver.hpp"
#include "stabcert/qp_certificates.hpp"

using namespace stabcert;
using fixtures::vec;

namespace {

struct Result {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Result()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------------------

Result planar_reproduction() {
  const QpInstance p = fixtures::planar();
  bool ok = true;
  std::string detail;
  const std::vector<std::pair<Vector, double>> cases = {
      {vec({-0.125, fixtures::kRoot63}), 8.0}, {vec({-0.125, -fixtures::kRoot63}), 8.0}, {vec({-1.0, 0.0}), 1.0}};
  for (const auto& [x, lambda_expected] : cases) {
    const AnalysisReport r = analyze_instance(p, x);
    if (r.status != AnalysisStatus::Ok || !r.stability || !r.qp.bordered) return {false, "analysis did not complete"};
    const double lambda = r.stability->case_info.lambda;
    ok = ok && std::abs(lambda - lambda_expected) <= 1e-12;
    ok = ok && r.stability->lipschitz_like == Verdict::Yes && r.stability->robinson_stable == Verdict::Yes;
    if (lambda_expected == 8.0) {
      const double det = std::abs(r.qp.bordered->det);
      ok = ok && std::abs(det - 63.0 / 8.0) <= 1e-12 * 63.0 / 8.0;
      detail = "|det|=" + fmt("%.17g", det);
    }
  }
  return {ok, detail + ", lambda in {8, 8, 1}, verdicts yes/yes"};
}

Result spatial_reproduction() {
  const QpInstance p = fixtures::spatial();
  const Vector outer = vec({-1.0, 0.0, 0.0});
  const AnalysisReport r = analyze_instance(p, outer);
  if (!r.stability || !r.qp.bordered) return {false, "analysis did not complete"};
  Matrix B = Matrix::Zero(4, 4);
  B.topLeftCorner(3, 3) = p.D() + p.A();
  B.topRightCorner(3, 1) = outer;
  B.bottomLeftCorner(1, 3) = outer.transpose();
  const double det_oracle = oracle::cofactor_det(B);
  bool ok = std::abs(r.stability->case_info.lambda - 1.0) <= 1e-12 && det_oracle == -49.0 &&
            std::abs(r.qp.bordered->det - det_oracle) <= 1e-12 * 49.0 &&
            r.stability->lipschitz_like == Verdict::Yes && r.stability->robinson_stable == Verdict::Yes;
  double worst_det = 0.0;
  for (double t : {0.0, M_PI / 4, M_PI / 2}) {
    const AnalysisReport d = analyze_instance(p, fixtures::spatial_circle(t));
    if (!d.stability || !d.qp.bordered) return {false, "analysis did not complete"};
    worst_det = std::max(worst_det, std::abs(d.qp.bordered->det));
    ok = ok && std::abs(d.stability->case_info.lambda - 8.0) <= 1e-12 && std::abs(d.qp.bordered->det) <= 1e-10 &&
         d.stability->lipschitz_like == Verdict::No;
  }
  return {ok, "det(outer)=" + fmt("%.17g", r.qp.bordered->det) + " (cofactor " + fmt("%g", det_oracle) +
                  "), max|det| on circle=" + fmt("%.3g", worst_det)};
}

Result positive_equivalence() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(1, 5);
  std::uniform_real_distribution<double> lam(0.0, 10.0);
  int disagreements = 0, singular = 0;
  for (int k = 0; k < 100; ++k) {
    const Eigen::Index n = dim(rng);
    double lambda = 10.0 - lam(rng);  // (0, 10]
    const auto [p, x] = fixtures::active_instance(n, lambda, k % 2 == 1, rng);
    DerivativeSnapshot s = qp_snapshot(p, x);
    s.qp_structure = false;  // decide through the explicit parameter blocks
    CaseInfo info;
    info.tag = CaseTag::BoundaryPositive;
    info.lambda = lambda;
    const auto conds = check_boundary_positive(s, info);
    const bool general = conds[0].holds() && conds[1].holds();
    const bool bordered = bordered_test_positive_lambda(p, x, lambda).nonsingular;
    const bool face = critical_face_check(p.D() + lambda * p.A(), p.A() * x + p.b(), LambdaCase::Positive, false).holds;
    if (!(general == bordered && bordered == face)) ++disagreements;
    if (!bordered) ++singular;
  }
  return {disagreements == 0,
          std::to_string(disagreements) + " disagreements, " + std::to_string(singular) + "/100 singular"};
}

Result zero_implication() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> dim(1, 5);
  int qualifying = 0, counterexamples = 0, draws = 0;
  while (qualifying < 100 && draws < 100000) {
    ++draws;
    const Eigen::Index n = dim(rng);
    const Matrix A = fixtures::random_symmetric(n, rng);
    const Vector b = fixtures::random_vector(n, rng);
    const Vector x = fixtures::random_vector(n, rng);
    Matrix D = fixtures::random_symmetric(n, rng, 2.0);
    if (draws % 5 == 0 && n > 1) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(D);
      Vector ev = es.eigenvalues();
      ev(0) = 0.0;
      D = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
      D = 0.5 * (D + D.transpose());
    }
    const QpInstance p(D, -D * x, A, b, -(0.5 * x.dot(A * x) + b.dot(x)));
    DerivativeSnapshot s = qp_snapshot(p, x);
    s.qp_structure = false;
    CaseInfo info;
    info.tag = CaseTag::BoundaryZero;
    const auto conds = check_boundary_zero(s, info);
    if (!(conds[0].holds() && conds[1].holds() && conds[2].holds())) continue;
    ++qualifying;
    if (!strong_regularity_zero(s).holds) ++counterexamples;
  }

  int sufficient = 0, necessary_fail = 0;
  for (int k = 0; k < 1000; ++k) {
    const Eigen::Index n = dim(rng);
    Matrix D = fixtures::random_symmetric(n, rng, 2.0);
    if (k % 4 == 0 && n > 1) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(D);
      Vector ev = es.eigenvalues();
      ev(n - 1) = 0.0;
      D = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
      D = 0.5 * (D + D.transpose());
    }
    const Vector u = fixtures::random_vector(n, rng);
    if (!zero_lambda_sufficient(D, u).all_hold()) continue;
    ++sufficient;
    if (!zero_lambda_necessary(D, u).holds()) ++necessary_fail;
  }
  return {qualifying == 100 && counterexamples == 0 && necessary_fail == 0 && sufficient > 0,
          std::to_string(counterexamples) + " counterexamples in " + std::to_string(qualifying) +
              " qualifying snapshots; sufficient=>necessary failures " + std::to_string(necessary_fail) + " of " +
              std::to_string(sufficient)};
}

Result oracle_fidelity() {
  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<int> dim(1, 4);
  std::uniform_real_distribution<double> rad(0.5, 2.0);
  double worst_h = 0.0, worst_kkt = 0.0;
  int mismatched = 0;
  for (int k = 0; k < 50; ++k) {
    const Eigen::Index n = dim(rng);
    const Matrix D = fixtures::random_symmetric(n, rng, 3.0);
    const Vector c = fixtures::random_vector(n, rng);
    const double r = rad(rng);
    const QpInstance p(D, c, Matrix::Identity(n, n), Vector::Zero(n), -0.5 * r * r);
    const StationarySet s = solve_stationary_set(p);
    std::vector<Vector> ours, theirs;
    for (const auto& q : s.points) {
      if (q.isolated) ours.push_back(q.x);
      double kkt = (D * q.x + c + q.lambda * q.x).norm();
      if (q.kind == PointKind::Boundary) kkt += std::abs(0.5 * q.x.squaredNorm() - 0.5 * r * r);
      if (q.lambda < 0.0) kkt = INFINITY;
      worst_kkt = std::max(worst_kkt, kkt);
    }
    for (const auto& q : oracle::trs_scan(D, c, r)) theirs.push_back(q.x);
    if (ours.size() != theirs.size() || !s.families.empty()) ++mismatched;
    worst_h = std::max(worst_h, oracle::hausdorff(ours, theirs));
  }
  return {mismatched == 0 && worst_h <= 1e-8 && worst_kkt <= 1e-10,
          "max Hausdorff " + fmt("%.3g", worst_h) + ", max KKT residual " + fmt("%.3g", worst_kkt) + ", " +
              std::to_string(mismatched) + " count mismatches"};
}

Result robinson_corroboration() {
  const QpInstance p = fixtures::planar();
  const Vector x = vec({-0.125, fixtures::kRoot63});
  int good = 0;
  double worst = 0.0;
  for (double radius : {1e-2, 1e-3, 1e-4}) {
    for (std::uint64_t seed : {1, 2, 3}) {
      SamplingConfig cfg;
      cfg.radius_x = radius;
      cfg.radius_w = radius;
      cfg.samples = 200;
      cfg.seed = seed;
      const EmpiricalEstimate e = verify_robinson(p, x, cfg);
      if (e.ratios.count > 0 && std::isfinite(e.max_ratio) && !e.divergence_flag) ++good;
      worst = std::max(worst, e.max_ratio);
    }
  }
  return {good == 9, std::to_string(good) + "/9 runs finite without divergence, max ratio " + fmt("%.4g", worst)};
}

Result lipschitz_falsification() {
  const QpInstance p = fixtures::spatial();
  const Vector x = fixtures::spatial_circle(0.0);
  int flagged = 0;
  std::string growth;
  for (std::uint64_t seed : {1, 2, 3}) {
    SamplingConfig cfg;
    cfg.scheme = PerturbScheme::Tilt;
    cfg.seed = seed;
    const EmpiricalEstimate e = verify_lipschitz_like(p, x, cfg);
    if (e.divergence_flag) ++flagged;
    growth += (growth.empty() ? "" : ", ") + fmt("%.5f", e.companion_max_ratio / e.max_ratio);
  }
  return {flagged >= 2, std::to_string(flagged) + "/3 seeds flagged; growth at radius/10: " + growth};
}

Result cone_properties() {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> small(0, 2);
  std::uniform_int_distribution<int> dim(2, 4);
  double worst_ray = 0.0, worst_kernel = 0.0;
  int sampler_contradictions = 0, bad_witnesses = 0, fails = 0;
  for (int k = 0; k < 1000; ++k) {
    const Eigen::Index n = dim(rng);

    const Vector g = fixtures::random_vector(n, rng);
    const Vector u = fixtures::random_vector(n, rng);
    worst_ray = std::max(worst_ray, std::abs(distance_to_ray(g, u) - oracle::ray_distance_grid(g, u)));

    const Eigen::Index m = 1 + small(rng) + small(rng);
    const Eigen::Index rank = std::max<Eigen::Index>(1, std::min(m, n) - small(rng));
    const Matrix M = Matrix::Random(m, rank) * Matrix::Random(rank, n) * std::pow(10.0, small(rng) - 1);
    const SubspaceBasis B = kernel_basis(M);
    const double sigma_max = singular_values(M)(0);
    const double tau = RankPolicy{}.threshold(m, n, sigma_max);
    for (Eigen::Index j = 0; j < B.size(); ++j)
      worst_kernel = std::max(worst_kernel, (M * B.vectors.col(j)).norm() / std::max(tau, 1e-300));

    ConeSpec cone;
    const Eigen::Index eq = small(rng);
    cone.eq_matrix = eq ? Matrix(Matrix::Random(eq, n)) : Matrix(0, n);
    for (int j = small(rng); j > 0; --j) cone.nonneg_functionals.push_back(fixtures::random_vector(n, rng));
    for (int j = small(rng); j > 0; --j) cone.strict_functionals.push_back(fixtures::random_vector(n, rng));
    Matrix T;
    switch (k % 3) {
      case 0: T = Matrix::Random(1 + small(rng) % 2, n); break;
      case 1: T = eq ? Matrix(Matrix::Random(2, eq) * cone.eq_matrix) : Matrix(Matrix::Zero(1, n)); break;
      default: {
        // Conclusion that holds on a half-space: e₁ᵀ with the cone confined to e₁ ≤ 0 and e₁ ≥ 0.
        Vector e1 = Vector::Zero(n);
        e1(0) = 1.0;
        cone.nonneg_functionals.push_back(e1);
        cone.nonneg_functionals.push_back(-e1);
        T = e1.transpose();
      }
    }
    const ImplicationVerdict v = cone_implication(cone, T);
    if (v.outcome == Outcome::Fails) {
      ++fails;
      const Vector& z = *v.witness;
      bool in = (cone.eq_matrix * z).norm() <= 1e-8;
      for (const auto& s : cone.nonneg_functionals) in = in && s.dot(z) >= -1e-8;
      for (const auto& s : cone.strict_functionals) in = in && s.dot(z) > 0.0;
      if (!in || (T * z).norm() <= 1e-9) ++bad_witnesses;
    }
    if (v.outcome == Outcome::Holds &&
        oracle::sample_violator(cone.eq_matrix, cone.nonneg_functionals, cone.strict_functionals, T, rng))
      ++sampler_contradictions;
  }
  const bool ok = worst_ray <= 1e-6 && worst_kernel <= 1.0 && sampler_contradictions == 0 && bad_witnesses == 0;
  return {ok, "ray err " + fmt("%.2g", worst_ray) + ", max kernel residual/tau " + fmt("%.3g", worst_kernel) +
                  ", sampler violators of passes " + std::to_string(sampler_contradictions) + ", invalid witnesses " +
                  std::to_string(bad_witnesses) + " (" + std::to_string(fails) + " fails)"};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);

  const std::vector<Criterion> criteria = {
      {1, "planar example: multipliers, |det| = 63/8, verdicts", 1.0, planar_reproduction},
      {2, "spatial example: det -49 and singular circle", 1.0, spatial_reproduction},
      {3, "lambda > 0 equivalence of three tests (100 snapshots)", 10.0, positive_equivalence},
      {4, "lambda = 0 implications (100 snapshots)", 10.0, zero_implication},
      {5, "secular solver vs 1e6-point grid scan (50 instances)", 30.0, oracle_fidelity},
      {6, "Robinson corroboration, 3 radii x 3 seeds", 60.0, robinson_corroboration},
      {7, "Lipschitz falsification at the degenerate point, tilt", 60.0, lipschitz_falsification},
      {8, "cone-algebra property suite (1000 cases)", 30.0, cone_properties},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (only && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    const Result o = c.run();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs < c.budget_s;
    if (!pass) ++failures;
    std::printf("%s criterion %d: %s -- %s [%.2fs, budget %.0fs]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.budget_s);
  }
  return failures == 0 ? 0 : 1;
}
