#pragma once

#include "cpm/weights.hpp"

#include <optional>
#include <vector>

namespace cpm {

/// Root u of u H'(u) = 1/chi on (0, u0).
struct SaddleSolution {
  double chi = 0.0;
  double u = 0.0;
  /// |u H'(u) - 1/chi|
  double residual = 0.0;
  double H_u = 0.0;
  double H1_u = 0.0;
  double H2_u = 0.0;
};

/// One iterate of the root finder: bracket and the evaluated point.
struct SaddleStep {
  double lo = 0.0;
  double hi = 0.0;
  double u = 0.0;
  double g = 0.0;  // u H'(u)
};

/// Solves u H'(u) = target for u in (0, u0) by geometric bracketing, then
/// Newton steps guarded by bisection.  g(u) = u H'(u) is increasing when the
/// moments are non-negative.  Throws DomainError when target <= 0, when the
/// model lacks its full series, or when the target is out of reach.
/// Every evaluated point is appended to `trace` when given.
SaddleSolution solve_saddle_target(const WeightModel& model, double target, std::vector<SaddleStep>* trace = nullptr);

SaddleSolution solve_saddle(const WeightModel& model, double chi, std::vector<SaddleStep>* trace = nullptr);

struct RateValue {
  double chi = 0.0;
  /// (H(u)-1)/(u H'(u)) - 1 + ln H'(u)
  double psi = 0.0;
  SaddleSolution saddle;
  /// 1 / sqrt(1 + chi u^2 H''(u))
  double prefactor = 1.0;
};

RateValue rate_function(const WeightModel& model, double chi);

/// Refined prediction of M_k(chi k).
struct RefinedPrediction {
  unsigned k = 0;
  double chi = 0.0;
  double x = 0.0;
  /// ln of  prefactor * (x H'(u) exp{(H(u)-1)/(u H'(u)) - 1})^k
  double log_formula = 0.0;
  /// Lattice span of the auxiliary law: 2 for even-only weights, else 1.
  unsigned lattice_span = 1;
  /// log_formula + ln(lattice_span): the predicted ln M_k.
  double log_value = 0.0;
};

/// Throws DomainError for odd k with an even-only model.
RefinedPrediction refined_prediction(const WeightModel& model, unsigned k, double chi);

/// ln M_k(x) for x/k -> infinity: k ln(x V_1) when V_1 != 0, otherwise
/// (k/2) ln(x k V_2 / e).  For hat models V_2 is the base variance
/// V_2 - V_1^2, which is what the hat model's own second moment already is.
double regime_b_prediction(const WeightModel& model, unsigned k, double x);

/// Closed forms for the built-in laws (gaussian, gamma, bernoulli,
/// exponential, logfact).  `log_value` predicts ln M_k(x); for gamma,
/// exponential and logfact the closed forms are stated for the reduced
/// polynomial S_k = M_k / k! or T_k = M_k / k!, reported in `log_reduced`,
/// and k! is replaced by Stirling's leading term to obtain log_value.
struct SpecialCasePrediction {
  double log_value = 0.0;
  std::optional<double> log_reduced;
  double u = 0.0;  // case-specific saddle parameter (beta for gaussian)
};

SpecialCasePrediction special_case_prediction(const WeightModel& model, unsigned k, double x);

/// Centered Bernoulli weights with x/k -> 0.  k is the (even) moment order.
struct SmallXPrediction {
  double log_value = 0.0;
  /// ln(k/x) - ln ln(k/x): two-term expansion of the saddle u sh(u) = k/x.
  double u_expansion = 0.0;
  /// Exact root of u sh(u) = k/x, for comparison with u_expansion.
  double u_exact = 0.0;
  /// x <= (k/2) exp(-(k/2)^{1/16}): outside the range where the local limit is known.
  bool outside_admissible_range = false;
};

SmallXPrediction bernoulli_small_x_prediction(unsigned k, double x);

/// One row of the exact-vs-asymptotic comparison at x = chi k.
struct CompareRow {
  unsigned k = 0;
  double log_exact = 0.0;      // ln M_k(chi k) from the log-space recurrence
  double log_predicted = 0.0;  // RefinedPrediction::log_value
  double rate_gap = 0.0;       // |(1/k) ln(M_k / x^k) - Psi(chi)|
};

/// Rows for every admissible k in [1, k_max] (even k only for even-only
/// models).  The parallel variant distributes k over OpenMP threads; the
/// serial variant is the reference it is tested against.
std::vector<CompareRow> compare_sweep(const WeightModel& model, double chi, unsigned k_max);
std::vector<CompareRow> compare_sweep_serial(const WeightModel& model, double chi, unsigned k_max);

/// Single-row evaluation used by both sweeps.
CompareRow compare_row(const WeightModel& model, double chi, unsigned k, const RateValue& rate);

}  // namespace cpm
