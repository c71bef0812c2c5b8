#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "stabcert/oracle_solver.hpp"

namespace stabcert {

/// Components of w that a perturbation may move.
enum class PerturbScheme {
  Full,  // D, c, A, b, alpha
  Tilt,  // c
  Rhs    // c, b, alpha
};

const char* to_string(PerturbScheme s);
/// Throws std::invalid_argument for an unknown name.
PerturbScheme parse_scheme(const std::string& name);

struct SamplingConfig {
  double radius_x = 1e-2;
  double radius_w = 1e-2;
  int samples = 200;
  /// Samples with residual at or above this are skipped; default 0.1·(1+‖∇f0(x̄)‖).
  std::optional<double> gamma_cap;
  std::uint64_t seed = 1;
  PerturbScheme scheme = PerturbScheme::Full;
  int threads = 1;
  /// Also run at radius/10 with the same seed and set divergence_flag.
  bool companion_run = true;
  OracleOptions oracle;

  /// Throws std::invalid_argument on negative radii, samples < 1 or threads < 1.
  void validate() const;
};

struct SampleRecord {
  std::size_t index = 0;
  double w_distance = 0.0;
  double x_distance = 0.0;
  double residual = 0.0;  // NaN for Lipschitz samples
  double ratio = 0.0;
  std::string skip_reason;  // empty when the ratio counts

  bool used() const { return skip_reason.empty(); }
};

struct RatioSummary {
  std::size_t count = 0;
  double min = 0.0;
  double mean = 0.0;
  double median = 0.0;
  double p90 = 0.0;
  double max = 0.0;
};

struct EmpiricalEstimate {
  double max_ratio = 0.0;
  RatioSummary ratios;
  std::size_t skipped = 0;
  std::size_t unreliable = 0;
  std::optional<SampleRecord> witness_worst;
  bool divergence_flag = false;
  /// max_ratio of the radius/10 companion run; NaN when not run.
  double companion_max_ratio = 0.0;
  std::vector<SampleRecord> records;
};

/// Counter-based stream: sample i of a run depends only on (seed, i).
std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index);

/// Uniform draw from the Frobenius ball of the scheme's components.
/// Symmetric blocks are perturbed symmetrically.
ParameterDelta sample_delta(Eigen::Index n, PerturbScheme scheme, double radius, std::mt19937_64& rng);

QpInstance perturb(const QpInstance& instance, const SamplingConfig& config, std::mt19937_64& rng);

/// Estimates r in d(x, S(w)) ≤ r·d(0, ∇f0(x,w) + N_C(w)(x)) near (x̄, w̄).
/// Throws StationarityError / MfcqError when x̄ is not a regular stationary point.
EmpiricalEstimate verify_robinson(const QpInstance& instance, const Vector& x_bar, const SamplingConfig& config);

/// Estimates ℓ in S(w') ∩ U ⊂ S(w) + ℓ‖w' − w‖B for U = B(x̄, radius_x).
EmpiricalEstimate verify_lipschitz_like(const QpInstance& instance, const Vector& x_bar,
                                        const SamplingConfig& config);

/// One row per sample: index, w_distance, x_distance, residual, ratio, skip_reason.
std::string records_csv(const std::vector<SampleRecord>& records);

}  // namespace stabcert
