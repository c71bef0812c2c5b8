#include "stabcert/empirical_verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "stabcert/cone_algebra.hpp"
#include "stabcert/json_writer.hpp"
#include "stabcert/stationarity.hpp"

namespace stabcert {

const char* to_string(PerturbScheme s) {
  switch (s) {
    case PerturbScheme::Full: return "full";
    case PerturbScheme::Tilt: return "tilt";
    case PerturbScheme::Rhs: return "rhs";
  }
  return "?";
}

PerturbScheme parse_scheme(const std::string& name) {
  if (name == "full") return PerturbScheme::Full;
  if (name == "tilt") return PerturbScheme::Tilt;
  if (name == "rhs") return PerturbScheme::Rhs;
  throw std::invalid_argument("unknown perturbation scheme: " + name);
}

void SamplingConfig::validate() const {
  if (!(radius_x >= 0.0) || !std::isfinite(radius_x)) throw std::invalid_argument("radius_x must be finite and nonnegative");
  if (!(radius_w >= 0.0) || !std::isfinite(radius_w)) throw std::invalid_argument("radius_w must be finite and nonnegative");
  if (samples < 1) throw std::invalid_argument("samples must be at least 1");
  if (threads < 1) throw std::invalid_argument("threads must be at least 1");
  if (gamma_cap && !(*gamma_cap > 0.0)) throw std::invalid_argument("gamma_cap must be positive");
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Vector gaussian(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = N(rng);
  return v;
}

Matrix symmetric_gaussian(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  Matrix G(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) G(i, j) = N(rng);
  return 0.5 * (G + G.transpose());
}

double uniform01(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

/// Uniform point of the closed ball of radius r in ℝⁿ.
Vector ball_point(Eigen::Index n, double r, std::mt19937_64& rng) {
  Vector v = gaussian(n, rng);
  const double vn = v.norm();
  const double scale = r * std::pow(uniform01(rng), 1.0 / static_cast<double>(n));
  return vn > 0.0 ? Vector(v * (scale / vn)) : Vector(Vector::Zero(n));
}

double default_gamma_cap(const QpInstance& p, const Vector& x_bar) {
  return 0.1 * (1.0 + evaluate(p, x_bar).grad_obj.norm());
}

void require_regular_stationary(const QpInstance& p, const Vector& x_bar, const Tolerances& tol) {
  const StationarityCheck chk = check_stationarity(qp_snapshot(p, x_bar), tol);
  if (!chk.mfcq_ok) throw MfcqError("reference point violates MFCQ");
  if (!chk.is_stationary) throw StationarityError("reference point is not stationary");
}

RatioSummary summarize(std::vector<double> r) {
  RatioSummary s;
  if (r.empty()) return s;
  std::sort(r.begin(), r.end());
  s.count = r.size();
  s.min = r.front();
  s.max = r.back();
  double acc = 0.0;
  for (double v : r) acc += v;
  s.mean = acc / static_cast<double>(r.size());
  const std::size_t m = r.size() / 2;
  s.median = r.size() % 2 ? r[m] : 0.5 * (r[m - 1] + r[m]);
  s.p90 = r[std::min(r.size() - 1, static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(r.size()))) - 1)];
  return s;
}

template <typename Fn>
std::vector<SampleRecord> run_samples(const SamplingConfig& cfg, Fn&& one) {
  std::vector<SampleRecord> records(static_cast<std::size_t>(cfg.samples));
  const int T = std::min(cfg.threads, cfg.samples);
  auto work = [&](int k) {
    for (std::size_t i = static_cast<std::size_t>(k); i < records.size(); i += static_cast<std::size_t>(T))
      records[i] = one(i);
  };
  if (T == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < T; ++k) pool.emplace_back(work, k);
    for (auto& t : pool) t.join();
  }
  return records;
}

EmpiricalEstimate aggregate(std::vector<SampleRecord> records) {
  EmpiricalEstimate est;
  std::vector<double> used;
  for (const auto& r : records) {
    if (r.used()) {
      used.push_back(r.ratio);
      if (!est.witness_worst || r.ratio > est.witness_worst->ratio) est.witness_worst = r;
    } else {
      ++est.skipped;
      if (r.skip_reason == "unreliable") ++est.unreliable;
    }
  }
  est.ratios = summarize(used);
  est.max_ratio = est.ratios.max;
  est.companion_max_ratio = std::numeric_limits<double>::quiet_NaN();
  est.records = std::move(records);
  return est;
}

void attach_companion(EmpiricalEstimate& est, const EmpiricalEstimate& comp) {
  est.companion_max_ratio = comp.ratios.count ? comp.max_ratio : std::numeric_limits<double>::quiet_NaN();
  est.divergence_flag = est.ratios.count > 0 && comp.ratios.count > 0 && comp.max_ratio >= 10.0 * est.max_ratio;
}

/// Newton steps along ∇F onto {F = 0}.
Vector project_to_boundary(const QpInstance& p, Vector x) {
  const double target = 1e-15 * (1.0 + std::abs(p.alpha()));
  for (int it = 0; it < 50; ++it) {
    const Evaluation e = evaluate(p, x);
    if (std::abs(e.constraint) <= target) break;
    const double uu = e.grad_con.squaredNorm();
    if (uu == 0.0) break;
    x -= (e.constraint / uu) * e.grad_con;
  }
  return x;
}

/// Members of `set` inside B(center, r): isolated points plus local samples of
/// every family that meets the ball.
std::vector<Vector> members_in_ball(const StationarySet& set, const Vector& center, double r,
                                    std::mt19937_64& rng) {
  constexpr int kFamilySamples = 16;
  std::vector<Vector> out;
  for (const auto& pt : set.points)
    if ((pt.x - center).norm() <= r) out.push_back(pt.x);
  for (const auto& f : set.families) {
    const Vector s_star = f.nearest_parameter(center);
    const Vector p_star = f.point(s_star);
    if ((p_star - center).norm() > r) continue;
    out.push_back(p_star);
    const Eigen::Index k = f.basis.cols();
    if (k == 0) continue;
    const double smax = singular_values(f.basis)(0);
    if (smax == 0.0) continue;
    const double eta = r / smax;
    for (int j = 0; j < kFamilySamples; ++j) {
      Vector s = s_star + ball_point(k, eta, rng);
      if (f.shape == FamilyShape::Sphere) {
        const double sn = s.norm();
        if (sn == 0.0) continue;
        s /= sn;
      } else if (f.shape == FamilyShape::Ball && s.norm() > 1.0) {
        s /= s.norm();
      }
      const Vector x = f.point(s);
      if ((x - center).norm() <= r) out.push_back(x);
    }
  }
  return out;
}

SampleRecord skipped(SampleRecord r, const char* why) {
  r.skip_reason = why;
  r.ratio = 0.0;
  return r;
}

EmpiricalEstimate robinson_run(const QpInstance& p, const Vector& x_bar, const SamplingConfig& cfg) {
  const Eigen::Index n = p.dim();
  const Tolerances& tol = cfg.oracle.tol;
  const double gamma_cap = cfg.gamma_cap.value_or(default_gamma_cap(p, x_bar));
  const bool active = std::abs(evaluate(p, x_bar).constraint) <= tol.activity(std::abs(p.alpha()));

  auto one = [&](std::size_t i) {
    std::mt19937_64 rng = sample_rng(cfg.seed, i);
    SampleRecord rec;
    rec.index = i;
    const ParameterDelta delta = sample_delta(n, cfg.scheme, cfg.radius_w, rng);
    const QpInstance w = displaced(p, delta);
    Vector x = x_bar + ball_point(n, cfg.radius_x, rng);
    const bool to_boundary = uniform01(rng) < 0.5;
    if (active && to_boundary) x = project_to_boundary(w, x);
    rec.w_distance = delta.sum_norm();
    rec.x_distance = (x - x_bar).norm();
    rec.residual = std::numeric_limits<double>::quiet_NaN();
    if (rec.x_distance > cfg.radius_x) return skipped(rec, "outside_ball");

    const Evaluation e = evaluate(w, x);
    const double act = tol.activity(std::abs(w.alpha()));
    if (e.constraint > act) return skipped(rec, "infeasible");
    rec.residual = e.constraint >= -act ? distance_to_ray(-e.grad_obj, e.grad_con) : e.grad_obj.norm();
    if (rec.residual >= gamma_cap) return skipped(rec, "gamma_cap");
    if (rec.residual <= 1e-14) return skipped(rec, "zero_residual");

    const StationarySet S = solve_stationary_set(w, cfg.oracle);
    if (!S.complete) return skipped(rec, "unreliable");
    const double dist = distance_to_stationary_set(x, S);
    if (!std::isfinite(dist)) return skipped(rec, "empty_set");
    rec.ratio = dist / rec.residual;
    return rec;
  };
  return aggregate(run_samples(cfg, one));
}

EmpiricalEstimate lipschitz_run(const QpInstance& p, const Vector& x_bar, const SamplingConfig& cfg) {
  const Eigen::Index n = p.dim();
  const StationarySet S0 = solve_stationary_set(p, cfg.oracle);

  auto one = [&](std::size_t i) {
    std::mt19937_64 rng = sample_rng(cfg.seed, i);
    SampleRecord rec;
    rec.index = i;
    rec.residual = std::numeric_limits<double>::quiet_NaN();
    const ParameterDelta delta = sample_delta(n, cfg.scheme, cfg.radius_w, rng);
    rec.w_distance = delta.sum_norm();
    if (rec.w_distance == 0.0) return skipped(rec, "zero_distance");
    const StationarySet S1 = solve_stationary_set(displaced(p, delta), cfg.oracle);
    if (!S0.complete || !S1.complete) return skipped(rec, "unreliable");

    double worst = -1.0;
    bool members = false;
    for (const auto& [from, to] : {std::pair{&S1, &S0}, std::pair{&S0, &S1}}) {
      for (const Vector& m : members_in_ball(*from, x_bar, cfg.radius_x, rng)) {
        members = true;
        worst = std::max(worst, distance_to_stationary_set(m, *to));
      }
    }
    if (!members) return skipped(rec, "no_members");
    if (!std::isfinite(worst)) return skipped(rec, "empty_target");
    rec.x_distance = worst;
    rec.ratio = worst / rec.w_distance;
    return rec;
  };
  return aggregate(run_samples(cfg, one));
}

}  // namespace

std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ index));
}

ParameterDelta sample_delta(Eigen::Index n, PerturbScheme scheme, double radius, std::mt19937_64& rng) {
  ParameterDelta d = ParameterDelta::zero(n);
  Eigen::Index m = n;
  switch (scheme) {
    case PerturbScheme::Full:
      d.D = symmetric_gaussian(n, rng);
      d.c = gaussian(n, rng);
      d.A = symmetric_gaussian(n, rng);
      d.b = gaussian(n, rng);
      d.alpha = gaussian(1, rng)(0);
      m = n * (n + 1) + 2 * n + 1;
      break;
    case PerturbScheme::Tilt:
      d.c = gaussian(n, rng);
      break;
    case PerturbScheme::Rhs:
      d.c = gaussian(n, rng);
      d.b = gaussian(n, rng);
      d.alpha = gaussian(1, rng)(0);
      m = 2 * n + 1;
      break;
  }
  const double norm = d.frobenius_norm();
  const double r = radius * std::pow(uniform01(rng), 1.0 / static_cast<double>(m));
  return norm > 0.0 ? d.scaled(r / norm) : ParameterDelta::zero(n);
}

QpInstance perturb(const QpInstance& p, const SamplingConfig& cfg, std::mt19937_64& rng) {
  return displaced(p, sample_delta(p.dim(), cfg.scheme, cfg.radius_w, rng));
}

EmpiricalEstimate verify_robinson(const QpInstance& p, const Vector& x_bar, const SamplingConfig& cfg) {
  cfg.validate();
  require_dim(x_bar.size() == p.dim(), "verify_robinson: x_bar has wrong length");
  require_regular_stationary(p, x_bar, cfg.oracle.tol);
  EmpiricalEstimate est = robinson_run(p, x_bar, cfg);
  if (cfg.companion_run) {
    SamplingConfig c = cfg;
    c.radius_x /= 10.0;
    c.radius_w /= 10.0;
    c.gamma_cap = cfg.gamma_cap.value_or(default_gamma_cap(p, x_bar));
    attach_companion(est, robinson_run(p, x_bar, c));
  }
  return est;
}

EmpiricalEstimate verify_lipschitz_like(const QpInstance& p, const Vector& x_bar, const SamplingConfig& cfg) {
  cfg.validate();
  require_dim(x_bar.size() == p.dim(), "verify_lipschitz_like: x_bar has wrong length");
  require_regular_stationary(p, x_bar, cfg.oracle.tol);
  EmpiricalEstimate est = lipschitz_run(p, x_bar, cfg);
  if (cfg.companion_run) {
    // U = B(x̄, radius_x) is the fixed neighborhood of the inclusion; only w shrinks.
    SamplingConfig c = cfg;
    c.radius_w /= 10.0;
    attach_companion(est, lipschitz_run(p, x_bar, c));
  }
  return est;
}

std::string records_csv(const std::vector<SampleRecord>& records) {
  std::string out = "index,w_distance,x_distance,residual,ratio,skip_reason\n";
  for (const auto& r : records) {
    out += std::to_string(r.index);
    out += ',' + format_double(r.w_distance);
    out += ',' + format_double(r.x_distance);
    out += ',' + format_double(r.residual);
    out += ',' + format_double(r.ratio);
    out += ',' + r.skip_reason + '\n';
  }
  return out;
}

}  // namespace stabcert
