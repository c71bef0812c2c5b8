#include "stabcert/general_certificates.hpp"

#include <stdexcept>

#include "stabcert/qp_certificates.hpp"

namespace stabcert {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

const ConditionResult* StabilityReport::find(const std::string& id) const {
  for (const auto& c : conditions)
    if (c.id == id) return &c;
  return nullptr;
}

namespace {

Matrix bordered_columns(const Matrix& left, const Vector& right) {
  Matrix m(left.rows(), left.cols() + 1);
  m << left, right;
  return m;
}

Vector lifted(const Vector& v, double last) {
  Vector out(v.size() + 1);
  out << v, last;
  return out;
}

Vector unit_last(Eigen::Index n) {
  Vector e = Vector::Zero(n + 1);
  e(n) = 1.0;
  return e;
}

void require_case(const CaseInfo& info, CaseTag expected, const char* op) {
  if (info.tag != expected)
    throw std::invalid_argument(std::string(op) + ": reference point is not in the " + to_string(expected) + " case");
}

void require_parameter_blocks(const DerivativeSnapshot& s) {
  if (!s.params && !s.qp_structure)
    throw std::invalid_argument("certificate: parameter blocks are required without qp_structure");
}

/// Conclusion matrix of an inclusion "⊂ ker M"; when M is structurally injective
/// the inclusion "⊂ {0}" is tested instead.
Matrix conclusion_or_identity(const std::optional<Matrix>& M, Eigen::Index cols) {
  return M ? *M : Matrix(Matrix::Identity(cols, cols));
}

ConditionResult from_bool(const char* id, bool ok) {
  ConditionResult r;
  r.id = id;
  r.outcome = ok ? Outcome::Holds : Outcome::Fails;
  return r;
}

ConditionResult from_implication(const char* id, const ImplicationVerdict& v) {
  ConditionResult r;
  r.id = id;
  r.outcome = v.outcome;
  r.witness = v.witness;
  r.vacuous = v.vacuous;
  return r;
}

ImplicationOptions implication_options(const Tolerances& tol) {
  ImplicationOptions o;
  o.rank = tol.rank;
  return o;
}

/// Kernel vector of M ∩ ker(extra) as a witness when that intersection is nontrivial.
ConditionResult trivial_kernel(const char* id, const SubspaceBasis& B) {
  ConditionResult r = from_bool(id, B.trivial());
  if (!B.trivial()) r.witness = Vector(B.vectors.col(0));
  return r;
}

ConditionResult inclusion(const char* id, const SubspaceBasis& B, const Matrix& T, double tol) {
  ConditionResult r = from_bool(id, subspace_contained_in_kernel(B, T, tol));
  if (!r.holds()) {
    const Matrix images = T * B.vectors;
    Eigen::Index worst = 0;
    images.colwise().norm().maxCoeff(&worst);
    r.witness = Vector(B.vectors.col(worst));
  }
  return r;
}

}  // namespace

CertificateMatrices build_matrices(const DerivativeSnapshot& s, const CaseInfo& info) {
  s.validate();
  const Eigen::Index n = s.dim();
  const double lambda = info.tag == CaseTag::BoundaryPositive ? info.lambda : 0.0;
  const Vector& u = s.grad_x_F;

  CertificateMatrices m;
  m.A1 = bordered_columns(s.hess_xx_f0 + lambda * s.hess_xx_F, u);
  m.A1p = bordered_columns(s.hess_xx_f0, u);
  if (s.params) {
    m.A2 = bordered_columns(s.params->hess_wx_f0 + lambda * s.params->hess_wx_F, s.params->grad_w_F);
    m.A2p = bordered_columns(s.params->hess_wx_f0, s.params->grad_w_F);
  }
  m.delta1 = ConeSpec{m.A1p, {unit_last(n)}, {lifted(u, 0.0)}};
  m.delta2 = ConeSpec{s.hess_xx_f0, {}, {Vector(-u)}};
  m.delta3 = ConeSpec{m.A1p, {lifted(u, 0.0), unit_last(n)}, {}};
  return m;
}

std::vector<ConditionResult> check_interior(const DerivativeSnapshot& s, const Tolerances& tol) {
  s.validate();
  require_parameter_blocks(s);
  const Eigen::Index n = s.dim();
  const SubspaceBasis ker_h = kernel_basis(s.hess_xx_f0, tol.rank);
  std::optional<Matrix> hwx;
  if (s.params) hwx = s.params->hess_wx_f0;

  std::vector<ConditionResult> out;
  if (hwx)
    out.push_back(trivial_kernel(condition_id::kInteriorIntersection,
                                 intersect_with_product_space(s.hess_xx_f0, *hwx, tol.rank)));
  else
    out.push_back(from_bool(condition_id::kInteriorIntersection, true));
  out.push_back(inclusion(condition_id::kInteriorInclusion, ker_h, conclusion_or_identity(hwx, n), tol.base));
  out.push_back(trivial_kernel(condition_id::kInteriorNonsingular, ker_h));
  return out;
}

std::vector<ConditionResult> check_boundary_positive(const DerivativeSnapshot& s, const CaseInfo& info,
                                                     const Tolerances& tol) {
  require_case(info, CaseTag::BoundaryPositive, "check_boundary_positive");
  require_parameter_blocks(s);
  const CertificateMatrices m = build_matrices(s, info);
  const Eigen::Index n = s.dim();
  const Matrix tangent_row = lifted(s.grad_x_F, 0.0).transpose();
  const SubspaceBasis L = intersect_with_product_space(m.A1, tangent_row, tol.rank);

  std::vector<ConditionResult> out;
  if (m.A2) {
    Matrix extra(1 + m.A2->rows(), n + 1);
    extra << tangent_row, *m.A2;
    out.push_back(trivial_kernel(condition_id::kPositiveJoint, intersect_with_product_space(m.A1, extra, tol.rank)));
  } else {
    out.push_back(from_bool(condition_id::kPositiveJoint, true));
  }
  out.push_back(inclusion(condition_id::kPositiveInclusion, L, conclusion_or_identity(m.A2, n + 1), tol.base));
  out.push_back(trivial_kernel(condition_id::kPositiveReduced, L));
  return out;
}

std::vector<ConditionResult> check_boundary_zero(const DerivativeSnapshot& s, const CaseInfo& info,
                                                 const Tolerances& tol) {
  require_case(info, CaseTag::BoundaryZero, "check_boundary_zero");
  require_parameter_blocks(s);
  const CertificateMatrices m = build_matrices(s, info);
  const Eigen::Index n = s.dim();
  const ImplicationOptions opt = implication_options(tol);
  const Matrix T = conclusion_or_identity(m.A2p, n + 1);

  std::vector<ConditionResult> out;
  if (m.A2p)
    out.push_back(trivial_kernel(condition_id::kZeroIntersection,
                                 intersect_with_product_space(m.A1p, *m.A2p, tol.rank)));
  else
    out.push_back(from_bool(condition_id::kZeroIntersection, true));

  const SubspaceBasis tangent =
      intersect_with_product_space(m.A1p, lifted(s.grad_x_F, 0.0).transpose(), tol.rank);
  out.push_back(inclusion(condition_id::kZeroTangent, tangent, T, tol.base));

  out.push_back(from_implication(condition_id::kZeroAscent, cone_implication(m.delta1, T, opt)));

  std::optional<Matrix> hwx;
  if (s.params) hwx = s.params->hess_wx_f0;
  out.push_back(from_implication(condition_id::kZeroDescent,
                                 cone_implication(m.delta2, conclusion_or_identity(hwx, n), opt)));

  out.push_back(from_implication(condition_id::kZeroNecessary, cone_implication(m.delta3, T, opt)));
  return out;
}

namespace {

Verdict all_of(const std::vector<const ConditionResult*>& cs) {
  bool indeterminate = false;
  for (const auto* c : cs) {
    if (c->outcome == Outcome::Fails) return Verdict::No;
    if (c->outcome == Outcome::Indeterminate) indeterminate = true;
  }
  return indeterminate ? Verdict::Unknown : Verdict::Yes;
}

void add_strong_regularity(StabilityReport& r, const DerivativeSnapshot& s, const Tolerances& tol) {
  switch (r.case_info.tag) {
    case CaseTag::Interior: {
      const bool ok = is_nonsingular(s.hess_xx_f0, tol.rank);
      r.conditions.push_back(from_bool(condition_id::kStrongInterior, ok));
      r.strong_regular = ok ? Verdict::Yes : Verdict::No;
      break;
    }
    case CaseTag::BoundaryPositive: {
      const bool ok = strong_regularity_positive(s, r.case_info.lambda, tol.rank);
      const Matrix core = s.hess_xx_f0 + r.case_info.lambda * s.hess_xx_F;
      const CriticalFaceResult face = critical_face_check(core, s.grad_x_F, LambdaCase::Positive, false, tol);
      r.conditions.push_back(from_bool(condition_id::kStrongBordered, ok));
      r.conditions.push_back(from_bool(condition_id::kStrongCriticalFace, face.holds));
      r.strong_regular = ok && face.holds ? Verdict::Yes : (!ok && !face.holds ? Verdict::No : Verdict::Unknown);
      break;
    }
    case CaseTag::BoundaryZero: {
      const ZeroLambdaRegularity z = strong_regularity_zero(s, tol.rank);
      const CriticalFaceResult face = critical_face_check(s.hess_xx_f0, s.grad_x_F, LambdaCase::Zero, false, tol);
      r.conditions.push_back(from_bool(condition_id::kStrongZeroSchur, z.holds));
      ConditionResult fc = from_bool(condition_id::kStrongCriticalFace, face.holds);
      fc.witness = face.witness;
      r.conditions.push_back(std::move(fc));
      r.strong_regular = z.holds && face.holds ? Verdict::Yes : (!z.holds && !face.holds ? Verdict::No : Verdict::Unknown);
      break;
    }
  }
  r.localization = r.strong_regular == Verdict::Yes;
}

}  // namespace

StabilityReport stability_verdict(const DerivativeSnapshot& s, const CaseInfo& info, const Tolerances& tol) {
  StabilityReport r;
  r.case_info = info;
  auto get = [&r](const char* id) { return r.find(id); };

  switch (info.tag) {
    case CaseTag::Interior: {
      r.conditions = check_interior(s, tol);
      const Verdict sufficient = all_of({get(condition_id::kInteriorIntersection), get(condition_id::kInteriorInclusion)});
      if (sufficient == Verdict::Yes) {
        r.lipschitz_like = Verdict::Yes;
        r.lipschitz_basis = s.qp_structure ? "iff" : "sufficient";
      } else if (s.qp_structure && sufficient == Verdict::No) {
        r.lipschitz_like = Verdict::No;
        r.lipschitz_basis = "iff";
      }
      r.robinson_stable = all_of({get(condition_id::kInteriorNonsingular)}) == Verdict::Yes ? Verdict::Yes : Verdict::Unknown;
      break;
    }
    case CaseTag::BoundaryPositive: {
      r.conditions = check_boundary_positive(s, info, tol);
      const Verdict sufficient = all_of({get(condition_id::kPositiveJoint), get(condition_id::kPositiveInclusion)});
      if (sufficient == Verdict::Yes) {
        r.lipschitz_like = Verdict::Yes;
        r.lipschitz_basis = s.qp_structure ? "iff" : "sufficient";
      } else if (s.qp_structure && sufficient == Verdict::No) {
        r.lipschitz_like = Verdict::No;
        r.lipschitz_basis = "iff";
      }
      r.robinson_stable = all_of({get(condition_id::kPositiveReduced)}) == Verdict::Yes ? Verdict::Yes : Verdict::Unknown;
      break;
    }
    case CaseTag::BoundaryZero: {
      r.conditions = check_boundary_zero(s, info, tol);
      const Verdict sufficient = all_of({get(condition_id::kZeroIntersection), get(condition_id::kZeroTangent),
                                         get(condition_id::kZeroAscent), get(condition_id::kZeroDescent)});
      const Verdict necessary = all_of({get(condition_id::kZeroNecessary)});
      if (sufficient == Verdict::Yes) {
        r.lipschitz_like = Verdict::Yes;
        r.lipschitz_basis = "sufficient";
      } else if (necessary == Verdict::No) {
        r.lipschitz_like = Verdict::No;
        r.lipschitz_basis = "necessary";
      }
      r.robinson_stable = sufficient == Verdict::Yes ? Verdict::Yes : Verdict::Unknown;
      break;
    }
  }
  add_strong_regularity(r, s, tol);
  return r;
}

}  // namespace stabcert
