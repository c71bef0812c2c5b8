#include "stabcert/analysis.hpp"

#include <cmath>

#include "stabcert/json_writer.hpp"

namespace stabcert {

const char* to_string(AnalysisStatus s) {
  switch (s) {
    case AnalysisStatus::Ok: return "ok";
    case AnalysisStatus::NotStationary: return "not_stationary";
    case AnalysisStatus::MfcqFails: return "mfcq_fails";
  }
  return "?";
}

int exit_code(AnalysisStatus s) {
  switch (s) {
    case AnalysisStatus::Ok: return 0;
    case AnalysisStatus::NotStationary: return 2;
    case AnalysisStatus::MfcqFails: return 3;
  }
  return 1;
}

namespace {

ConditionResult condition(const char* id, bool ok) {
  ConditionResult r;
  r.id = id;
  r.outcome = ok ? Outcome::Holds : Outcome::Fails;
  return r;
}

ConditionResult condition(const char* id, const ImplicationVerdict& v) {
  ConditionResult r;
  r.id = id;
  r.outcome = v.outcome;
  r.witness = v.witness;
  r.vacuous = v.vacuous;
  return r;
}

struct Decision {
  Verdict verdict = Verdict::Unknown;
  std::string basis = "none";
};

/// Combines two decisions on the same property; contradictions become Unknown.
Decision merge(const Decision& a, const Decision& b, const char* what, std::vector<std::string>& warnings) {
  if (a.verdict == Verdict::Unknown) return b;
  if (b.verdict == Verdict::Unknown) return a;
  if (a.verdict != b.verdict) {
    warnings.push_back(std::string("kernel conditions and closed-form QP test disagree on ") + what);
    return {};
  }
  return {a.verdict, a.basis == "iff" || b.basis == "iff" ? "iff" : a.basis};
}

AnalysisReport run(const DerivativeSnapshot& s, const Tolerances& tol) {
  AnalysisReport r;
  r.x_bar = s.x_bar;
  r.stationarity = check_stationarity(s, tol);
  if (!r.stationarity.mfcq_ok) {
    r.status = AnalysisStatus::MfcqFails;
    return r;
  }
  if (!r.stationarity.is_stationary) {
    r.status = AnalysisStatus::NotStationary;
    return r;
  }
  r.stability = stability_verdict(s, *r.stationarity.case_info, tol);
  return r;
}

}  // namespace

AnalysisReport analyze_snapshot(const DerivativeSnapshot& s, const Tolerances& tol) { return run(s, tol); }

AnalysisReport analyze_instance(const QpInstance& p, const Vector& x_bar, const Tolerances& tol) {
  const DerivativeSnapshot s = qp_snapshot(p, x_bar);
  AnalysisReport r = run(s, tol);
  r.warnings.insert(r.warnings.end(), p.warnings().begin(), p.warnings().end());
  if (r.status != AnalysisStatus::Ok) return r;

  StabilityReport& st = *r.stability;
  Decision lip, rob;
  const Vector u = s.grad_x_F;
  switch (st.case_info.tag) {
    case CaseTag::Interior: {
      r.qp.interior = interior_test(p.D(), tol.rank);
      const bool ok = r.qp.interior->nonsingular;
      st.conditions.push_back(condition(condition_id::kQpInterior, ok));
      lip = {ok ? Verdict::Yes : Verdict::No, "iff"};
      rob = {ok ? Verdict::Yes : Verdict::Unknown, ok ? "sufficient" : "none"};
      break;
    }
    case CaseTag::BoundaryPositive: {
      r.qp.bordered = bordered_test_positive_lambda(p, x_bar, st.case_info.lambda, tol.rank);
      const bool ok = r.qp.bordered->nonsingular;
      st.conditions.push_back(condition(condition_id::kQpBordered, ok));
      lip = {ok ? Verdict::Yes : Verdict::No, "iff"};
      rob = {ok ? Verdict::Yes : Verdict::Unknown, ok ? "sufficient" : "none"};
      break;
    }
    case CaseTag::BoundaryZero: {
      r.qp.zero_sufficient = zero_lambda_sufficient(p.D(), u, tol);
      r.qp.zero_necessary = zero_lambda_necessary(p.D(), u, tol);
      const ZeroLambdaSufficient& zs = *r.qp.zero_sufficient;
      st.conditions.push_back(condition(condition_id::kQpZeroBordered, zs.bordered.nonsingular));
      st.conditions.push_back(condition(condition_id::kQpZeroAscent, zs.ascent));
      st.conditions.push_back(condition(condition_id::kQpZeroOrthogonal, zs.kernel_orthogonal));
      st.conditions.push_back(condition(condition_id::kQpZeroNecessary, *r.qp.zero_necessary));
      if (zs.all_hold()) {
        lip = {Verdict::Yes, "sufficient"};
        rob = {Verdict::Yes, "sufficient"};
      } else if (r.qp.zero_necessary->outcome == Outcome::Fails) {
        lip = {Verdict::No, "necessary"};
      }
      break;
    }
  }
  const Decision merged_lip = merge({st.lipschitz_like, st.lipschitz_basis}, lip, "lipschitz_like", r.warnings);
  st.lipschitz_like = merged_lip.verdict;
  st.lipschitz_basis = merged_lip.basis;
  st.robinson_stable = merge({st.robinson_stable, "sufficient"}, rob, "robinson_stable", r.warnings).verdict;
  if (st.robinson_stable == Verdict::No) st.robinson_stable = Verdict::Unknown;
  return r;
}

namespace {

void write_nonsingularity(JsonWriter& w, const char* name, const NonsingularityTest& t) {
  w.key(name).begin_object();
  w.field("det", t.det);
  w.field("abs_det", std::abs(t.det));
  w.field("sigma_min", t.sigma_min);
  w.field("nonsingular", t.nonsingular);
  w.end_object();
}

}  // namespace

std::string to_json(const AnalysisReport& r) {
  JsonWriter w;
  w.begin_object();
  w.field("status", to_string(r.status));
  w.field("x_bar", r.x_bar);
  w.key("stationarity").begin_object();
  w.field("residual", r.stationarity.residual);
  w.field("is_stationary", r.stationarity.is_stationary);
  w.field("mfcq", r.stationarity.mfcq_ok);
  w.field("feasible", r.stationarity.feasible);
  w.end_object();
  if (r.stability) {
    const StabilityReport& st = *r.stability;
    w.field("case", to_string(st.case_info.tag));
    w.field("lambda", st.case_info.lambda);
    w.field("activity_residual", st.case_info.activity_residual);
    w.key("conditions").begin_array();
    for (const auto& c : st.conditions) {
      w.begin_object();
      w.field("id", c.id);
      w.field("verdict", to_string(c.outcome));
      w.field("vacuous", c.vacuous);
      w.key("witness");
      if (c.witness)
        w.value(*c.witness);
      else
        w.null();
      w.end_object();
    }
    w.end_array();
    w.key("qp").begin_object();
    if (r.qp.interior) write_nonsingularity(w, "interior", *r.qp.interior);
    if (r.qp.bordered) write_nonsingularity(w, "bordered", *r.qp.bordered);
    if (r.qp.zero_sufficient) write_nonsingularity(w, "zero_bordered", r.qp.zero_sufficient->bordered);
    w.end_object();
    w.field("lipschitz_like", to_string(st.lipschitz_like));
    w.field("lipschitz_basis", st.lipschitz_basis);
    w.field("robinson_stable", to_string(st.robinson_stable));
    w.field("strong_regular", to_string(st.strong_regular));
    w.field("localization", st.localization);
  }
  w.key("warnings").begin_array();
  for (const auto& s : r.warnings) w.value(s);
  w.end_array();
  w.end_object();
  return w.str();
}

}  // namespace stabcert
