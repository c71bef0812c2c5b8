#pragma once

#include "stabcert/linalg.hpp"

namespace stabcert {

/// The analysis knobs. `base` is the value set by `--tol` or STABCERT_TOL.
struct Tolerances {
  double base = 1e-9;
  RankPolicy rank;

  /// |F| at or below this counts as an active constraint.
  double activity(double alpha_scale) const { return base * (1.0 + alpha_scale); }
  /// Multipliers at or below this count as zero.
  double multiplier() const { return base; }
  /// Stationarity residuals at or below this count as stationary.
  double stationarity(double grad_scale) const { return base * (1.0 + grad_scale); }
};

}  // namespace stabcert
