#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <variant>

#include "CLI11.hpp"
#include "stabcert/analysis.hpp"
#include "stabcert/empirical_verifier.hpp"
#include "stabcert/instance_io.hpp"
#include "stabcert/json_writer.hpp"

using namespace stabcert;

namespace {

struct Options {
  std::string input;
  std::string command = "analyze";
  std::uint64_t seed = 1;
  int samples = 200;
  double radius_x = 1e-2;
  double radius_w = 1e-2;
  std::string scheme = "full";
  double tol = 1e-9;
  double rank_tol = 0.0;
  double lambda_max = 0.0;
  int threads = 1;
  std::string out;
  std::string csv;
  std::string ray;
  int steps = 11;
  double t_min = 0.0;
  double t_max = 1.0;
};

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path);
  f << text;
}

Tolerances tolerances(const Options& o, bool tol_given) {
  Tolerances t;
  if (const char* env = std::getenv("STABCERT_TOL"); env && *env) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0)) throw InputError("STABCERT_TOL must be a positive number");
    t.base = v;
  }
  if (tol_given) t.base = o.tol;
  if (!(t.base > 0.0)) throw InputError("--tol must be positive");
  if (o.rank_tol > 0.0) t.rank.absolute_override = o.rank_tol;
  return t;
}

void write_summary(JsonWriter& w, const RatioSummary& s) {
  w.key("ratios").begin_object();
  w.field("count", s.count);
  w.field("min", s.min);
  w.field("mean", s.mean);
  w.field("median", s.median);
  w.field("p90", s.p90);
  w.field("max", s.max);
  w.end_object();
}

int run_analyze(const std::variant<InstanceDocument, DerivativeSnapshot>& doc, const Options& o,
                const Tolerances& tol) {
  AnalysisReport r;
  if (const auto* inst = std::get_if<InstanceDocument>(&doc)) {
    if (!inst->x_bar) throw InputError("instance has no x_bar");
    r = analyze_instance(inst->instance, *inst->x_bar, tol);
  } else {
    r = analyze_snapshot(std::get<DerivativeSnapshot>(doc), tol);
  }
  emit(to_json(r), o.out);
  if (r.status == AnalysisStatus::NotStationary)
    std::cerr << "x_bar is not stationary (residual " << format_double(r.stationarity.residual) << ")\n";
  if (r.status == AnalysisStatus::MfcqFails) std::cerr << "MFCQ fails at x_bar\n";
  return exit_code(r.status);
}

int run_verify(const InstanceDocument& doc, const Options& o, const Tolerances& tol, bool robinson) {
  if (!doc.x_bar) throw InputError("instance has no x_bar");
  SamplingConfig cfg;
  cfg.radius_x = o.radius_x;
  cfg.radius_w = o.radius_w;
  cfg.samples = o.samples;
  cfg.seed = o.seed;
  cfg.scheme = parse_scheme(o.scheme);
  cfg.threads = o.threads;
  cfg.oracle.tol = tol;
  cfg.oracle.lambda_max = o.lambda_max;
  cfg.validate();

  const AnalysisReport pre = analyze_instance(doc.instance, *doc.x_bar, tol);
  if (pre.status != AnalysisStatus::Ok) {
    std::cerr << "reference point rejected: " << to_string(pre.status) << "\n";
    return exit_code(pre.status);
  }
  const bool best_effort = !solve_stationary_set(doc.instance, cfg.oracle).complete;
  if (best_effort) std::cerr << "warning: oracle enumeration is best-effort for this constraint\n";

  const EmpiricalEstimate est =
      robinson ? verify_robinson(doc.instance, *doc.x_bar, cfg) : verify_lipschitz_like(doc.instance, *doc.x_bar, cfg);

  JsonWriter w;
  w.begin_object();
  w.field("command", o.command);
  w.field("seed", static_cast<std::int64_t>(cfg.seed));
  w.field("samples", cfg.samples);
  w.field("radius_x", cfg.radius_x);
  w.field("radius_w", cfg.radius_w);
  w.field("scheme", to_string(cfg.scheme));
  w.field("max_ratio", est.max_ratio);
  write_summary(w, est.ratios);
  w.field("skipped", est.skipped);
  w.field("unreliable", est.unreliable);
  w.field("divergence_flag", est.divergence_flag);
  w.field("companion_max_ratio", est.companion_max_ratio);
  w.field("best_effort", best_effort);
  w.key("witness_worst");
  if (est.witness_worst) {
    w.begin_object();
    w.field("index", est.witness_worst->index);
    w.field("w_distance", est.witness_worst->w_distance);
    w.field("x_distance", est.witness_worst->x_distance);
    w.field("residual", est.witness_worst->residual);
    w.field("ratio", est.witness_worst->ratio);
    w.end_object();
  } else {
    w.null();
  }
  w.end_object();
  emit(w.str(), o.out);
  if (!o.csv.empty()) emit(records_csv(est.records), o.csv);
  return 0;
}

int run_sweep(const InstanceDocument& doc, const Options& o, const Tolerances& tol, bool radius_given) {
  if (!doc.x_bar) throw InputError("instance has no x_bar");
  if (o.ray.empty()) throw InputError("sweep needs --ray");
  if (o.steps < 1) throw InputError("--steps must be at least 1");
  const ParameterDelta ray = parse_direction(read_text_file(o.ray), doc.instance.dim());
  const Vector& x_bar = *doc.x_bar;
  const Eigen::Index n = doc.instance.dim();
  OracleOptions oracle;
  oracle.tol = tol;
  oracle.lambda_max = o.lambda_max;

  std::string out = "t,point";
  for (Eigen::Index i = 0; i < n; ++i) out += ",x" + std::to_string(i + 1);
  out += ",lambda,kind,isolated,distance_to_x_bar,status,case,lipschitz_like,robinson_stable,strong_regular\n";

  for (int k = 0; k < o.steps; ++k) {
    const double t = o.steps == 1 ? o.t_min : o.t_min + (o.t_max - o.t_min) * k / (o.steps - 1);
    const QpInstance w = displaced(doc.instance, ray, t);
    const StationarySet S = solve_stationary_set(w, oracle);

    struct Row {
      Vector x;
      bool isolated;
    };
    std::vector<Row> rows;
    for (const auto& p : S.points) rows.push_back({p.x, p.isolated});
    for (const auto& f : S.families) rows.push_back({f.point(f.nearest_parameter(x_bar)), false});
    std::stable_sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
      return (a.x - x_bar).norm() < (b.x - x_bar).norm();
    });

    int idx = 0;
    for (const auto& row : rows) {
      const double dist = (row.x - x_bar).norm();
      if (radius_given && dist > o.radius_x) continue;
      const AnalysisReport r = analyze_instance(w, row.x, tol);
      out += format_double(t) + "," + std::to_string(idx++);
      for (Eigen::Index i = 0; i < n; ++i) out += "," + format_double(row.x(i));
      const bool ok = r.stability.has_value();
      out += "," + (ok ? format_double(r.stability->case_info.lambda) : std::string("nan"));
      out += std::string(",") + (ok ? to_string(r.stability->case_info.tag) : "none");
      out += std::string(",") + (row.isolated ? "true" : "false");
      out += "," + format_double(dist);
      out += std::string(",") + to_string(r.status);
      out += std::string(",") + (ok ? to_string(r.stability->case_info.tag) : "none");
      out += std::string(",") + (ok ? to_string(r.stability->lipschitz_like) : "unknown");
      out += std::string(",") + (ok ? to_string(r.stability->robinson_stable) : "unknown");
      out += std::string(",") + (ok ? to_string(r.stability->strong_regular) : "unknown");
      out += "\n";
    }
  }
  emit(out, o.csv.empty() ? o.out : o.csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability certificates for the stationary-point map of a QP with one quadratic constraint"};
  Options o;
  app.add_option("--input", o.input, "Instance or snapshot JSON")->required();
  app.add_option("--command", o.command, "analyze | verify-robinson | verify-lipschitz | sweep")
      ->check(CLI::IsMember({"analyze", "verify-robinson", "verify-lipschitz", "sweep"}));
  app.add_option("--seed", o.seed, "Sampling seed");
  app.add_option("--samples", o.samples, "Monte-Carlo samples");
  auto* radius_x = app.add_option("--radius-x", o.radius_x, "Radius of the x-neighborhood");
  app.add_option("--radius-w", o.radius_w, "Radius of the parameter perturbation");
  app.add_option("--scheme", o.scheme, "Perturbed components: full | tilt | rhs")
      ->check(CLI::IsMember({"full", "tilt", "rhs"}));
  auto* tol = app.add_option("--tol", o.tol, "Base tolerance (default 1e-9 or STABCERT_TOL)");
  app.add_option("--rank-tol", o.rank_tol, "Absolute singular-value threshold for rank decisions");
  app.add_option("--lambda-max", o.lambda_max, "Multiplier horizon of the general-constraint scan (0 = default)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--threads", o.threads, "Worker threads for sampling");
  app.add_option("--out", o.out, "Report path (default stdout)");
  app.add_option("--csv", o.csv, "CSV path");
  app.add_option("--ray", o.ray, "Parameter direction JSON for sweep");
  app.add_option("--steps", o.steps, "Number of sweep points");
  app.add_option("--t-min", o.t_min, "First sweep parameter");
  app.add_option("--t-max", o.t_max, "Last sweep parameter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    const Tolerances t = tolerances(o, tol->count() > 0);
    const auto doc = parse_document(read_text_file(o.input));
    if (o.command == "analyze") return run_analyze(doc, o, t);
    const auto* inst = std::get_if<InstanceDocument>(&doc);
    if (!inst) throw InputError(o.command + " needs a QP instance, not a snapshot");
    if (o.command == "sweep") return run_sweep(*inst, o, t, radius_x->count() > 0);
    return run_verify(*inst, o, t, o.command == "verify-robinson");
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const MfcqError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const StationarityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
