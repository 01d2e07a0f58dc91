#pragma once

#include "cpm/weights.hpp"

#include <vector>

namespace cpm {

/// Tilted integer law P(Z = j) = M_j(x) u^j / (j! G(x,u)) with
/// G(x,u) = exp{x (H(u) - 1)}.
struct AuxiliaryDistribution {
  WeightModel model = WeightModel::unit();
  double x = 0.0;
  double u = 0.0;
  double log_G = 0.0;
  /// Largest retained j; pmf has support_cap + 1 entries (index = j).
  unsigned support_cap = 0;
  /// 2 for even-only weights (odd j carry no mass), otherwise 1.
  unsigned span = 1;
  std::vector<double> pmf;
  /// ln M_j(x) for j = 0..support_cap, from the log-space recurrence.
  std::vector<double> log_moments;
  /// Closed forms x u H'(u) and x (u H'(u) + u^2 H''(u)).
  double mean = 0.0;
  double variance = 0.0;
  double sigma = 0.0;

  double retained_mass() const;
  double pmf_mean() const;
  double pmf_variance() const;
};

/// Builds the pmf up to the first j whose cumulative mass reaches
/// 1 - mass_tolerance.  Throws DomainError for u outside (0, u0), x <= 0,
/// negative weight moments, or when 10^6 terms do not reach the target.
AuxiliaryDistribution build_aux(const WeightModel& model, double x, double u, double mass_tolerance = 1e-12);

/// |k! G u^{-k} p_k / M_k(x) - 1|, evaluated in log space with M_k(x) taken
/// from exact rational arithmetic (x converted exactly) for k <= 400.
double inversion_check(const AuxiliaryDistribution& aux, unsigned k);

struct LocalLimitResult {
  unsigned k = 0;
  double chi = 0.0;
  double x = 0.0;
  double u = 0.0;
  double sigma = 0.0;
  double p_k = 0.0;
  /// p_k sqrt(2 pi) sigma / span; tends to 1.
  double ratio = 0.0;
};

/// x = chi k and u solving u H'(u) = 1/chi, so that E Z = k.
LocalLimitResult local_limit_check(const WeightModel& model, double chi, unsigned k);

/// Same check at an arbitrary intensity x (u solves u H'(u) = k / x).
LocalLimitResult local_limit_check_at(const WeightModel& model, double x, unsigned k);

}  // namespace cpm
