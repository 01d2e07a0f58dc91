#include "cpm/asymptotics.hpp"

#include "cpm/error.hpp"
#include "cpm/moments.hpp"

#include <omp.h>

#include <cmath>
#include <limits>
#include <numbers>

namespace cpm {

namespace {

constexpr int kMaxIterations = 400;

double stirling_log_factorial(double k) {
  return 0.5 * std::log(2 * std::numbers::pi * k) + k * std::log(k) - k;
}

void require_full_series(const WeightModel& model, const char* what) {
  if (!model.has_full_series()) {
    throw DomainError(std::string("asymptotics: ") + what + " needs the full generating function; " + model.name() +
                      " only has a finite moment prefix");
  }
}

void require_even(const WeightModel& model, unsigned k) {
  if (model.parity_even_only() && k % 2 != 0) {
    throw DomainError("asymptotics: " + model.name() + " has vanishing odd moments; order " + std::to_string(k) +
                      " must be even");
  }
}

}  // namespace

SaddleSolution solve_saddle_target(const WeightModel& model, double target, std::vector<SaddleStep>* trace) {
  if (!(target > 0) || !std::isfinite(target)) throw DomainError("asymptotics: saddle target must be positive and finite");
  require_full_series(model, "the saddle equation");

  const double u0 = model.radius();
  const bool bounded = std::isfinite(u0);
  const double cap = bounded ? u0 * (1 - 1e-12) : std::numeric_limits<double>::infinity();
  auto g = [&](double u) { return u * model.egf_d1(u); };

  double lo = 0, hi = 0;
  auto record = [&](double u, double gu) {
    if (trace) trace->push_back({lo, hi, u, gu});
  };

  double u = bounded ? std::min(1.0, u0 / 2) : 1.0;
  double gu = g(u);
  record(u, gu);
  if (std::isnan(gu)) throw DomainError("asymptotics: u H'(u) is not finite at the starting point for " + model.name());
  if (gu < target) {
    lo = u;
    hi = u;
    for (int i = 0;; ++i) {
      if (i > 2000) throw DomainError("asymptotics: could not bracket the saddle for " + model.name());
      hi = bounded ? hi + (cap - hi) / 2 : 2 * hi;
      const double gh = g(hi);
      record(hi, gh);
      if (gh >= target) break;
      lo = hi;
      if (bounded && cap - hi <= 1e-15 * cap) {
        throw DomainError("asymptotics: target u H'(u) = " + std::to_string(target) + " is not reached below u0 for " +
                          model.name());
      }
    }
  } else {
    hi = u;
    lo = u;
    for (int i = 0;; ++i) {
      if (i > 4000 || lo < 1e-300) throw DomainError("asymptotics: could not bracket the saddle from below for " + model.name());
      lo /= 2;
      const double gl = g(lo);
      record(lo, gl);
      if (gl < target) break;
      hi = lo;
    }
  }

  const double tol = 1e-12 * std::max(1.0, target);
  u = 0.5 * (lo + hi);
  double best_u = u;
  double best_res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < kMaxIterations; ++it) {
    gu = g(u);
    record(u, gu);
    const double res = std::fabs(gu - target);
    if (res < best_res) {
      best_res = res;
      best_u = u;
    }
    if (res <= tol) break;
    if (gu < target) {
      lo = u;
    } else {
      hi = u;
    }
    if (hi - lo <= 4 * std::numeric_limits<double>::epsilon() * hi) break;
    const double slope = model.egf_d1(u) + u * model.egf_d2(u);
    double next = u - (gu - target) / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    u = next;
  }

  SaddleSolution sol;
  sol.chi = 1 / target;
  sol.u = best_u;
  sol.H_u = model.egf(best_u);
  sol.H1_u = model.egf_d1(best_u);
  sol.H2_u = model.egf_d2(best_u);
  sol.residual = std::fabs(best_u * sol.H1_u - target);
  return sol;
}

SaddleSolution solve_saddle(const WeightModel& model, double chi, std::vector<SaddleStep>* trace) {
  if (!(chi > 0)) throw DomainError("asymptotics: chi must be positive");
  SaddleSolution sol = solve_saddle_target(model, 1 / chi, trace);
  sol.chi = chi;
  return sol;
}

RateValue rate_function(const WeightModel& model, double chi) {
  RateValue r;
  r.chi = chi;
  r.saddle = solve_saddle(model, chi);
  const auto& s = r.saddle;
  r.psi = (s.H_u - 1) / (s.u * s.H1_u) - 1 + std::log(s.H1_u);
  r.prefactor = 1 / std::sqrt(1 + chi * s.u * s.u * s.H2_u);
  return r;
}

RefinedPrediction refined_prediction(const WeightModel& model, unsigned k, double chi) {
  require_even(model, k);
  const RateValue rate = rate_function(model, chi);
  const auto& s = rate.saddle;
  RefinedPrediction p;
  p.k = k;
  p.chi = chi;
  p.x = chi * k;
  const double q = (s.H_u - 1) / (s.u * s.H1_u);
  p.log_formula = std::log(rate.prefactor) + k * (std::log(p.x) + std::log(s.H1_u) + q - 1);
  p.lattice_span = model.parity_even_only() ? 2 : 1;
  p.log_value = p.log_formula + std::log(static_cast<double>(p.lattice_span));
  return p;
}

double regime_b_prediction(const WeightModel& model, unsigned k, double x) {
  if (!(x > 0)) throw DomainError("asymptotics: regime-B prediction needs x > 0");
  const double v1 = to_double(model.moment(1));
  if (v1 != 0) {
    if (v1 < 0) throw DomainError("asymptotics: regime-B prediction needs V_1 > 0, got negative mean for " + model.name());
    return k * std::log(x * v1);
  }
  const double v2 = to_double(model.moment(2));
  if (v2 == 0) throw DomainError("asymptotics: regime-B prediction undefined when V_1 = V_2 = 0");
  return 0.5 * k * std::log(x * k * v2 / std::numbers::e);
}

SpecialCasePrediction special_case_prediction(const WeightModel& model, unsigned k, double x) {
  if (k == 0 || !(x > 0)) throw DomainError("asymptotics: special-case prediction needs k >= 1 and x > 0");
  const double dk = k;
  SpecialCasePrediction out;
  switch (model.kind()) {
    case WeightKind::gaussian_centered: {
      require_even(model, k);
      const double half = dk / 2;
      const double v2 = to_double(model.parameters()[0]);
      // beta e^beta = half / x
      const double beta = solve_saddle_target(WeightModel::unit(), half / x).u;
      const double log_a = (std::exp(beta) - 1) / (beta * std::exp(beta)) - 2;
      out.u = beta;
      out.log_value = -0.5 * std::log(2 * (1 + beta)) + half * (std::log(2 * half * half * v2 / beta) + log_a);
      return out;
    }
    case WeightKind::gamma: {
      const double m = to_double(model.parameters()[0]);
      const double th = to_double(model.parameters()[1]);
      const double u = solve_saddle_target(model, dk / x).u;
      const double t = 1 - th * u;
      const double expo = t / (m * th * u) * (1 - std::pow(t, m));
      out.u = u;
      out.log_value = 0.5 * std::log(t / (1 + m * th * u)) + dk * (std::log(dk) - 1 - std::log(u) + expo);
      out.log_reduced = -0.5 * std::log(2 * std::numbers::pi * dk) - dk * std::log(u) +
                        0.5 * std::log(t / (1 + m * th * u)) + dk * expo;
      return out;
    }
    case WeightKind::bernoulli_centered: {
      require_even(model, k);
      const double u = solve_saddle_target(model, dk / x).u;
      const double chi_half = x / (dk / 2);
      const double log_a = (std::cosh(u) - 1) / (u * std::sinh(u)) - 1;
      out.u = u;
      out.log_value = 0.5 * std::log(2 / (2 + chi_half * u * u * std::cosh(u))) + dk * (std::log(dk / u) + log_a);
      return out;
    }
    case WeightKind::exponential: {
      const double chi = x / dk;
      const double u = (2 + chi - std::sqrt(chi * (4 + chi))) / 2;
      out.u = u;
      out.log_reduced = -0.5 * std::log(2 * std::numbers::pi * dk) + 0.5 * std::log((1 - u) / (1 + u)) +
                        dk * (1 - std::log(u) - u);
      out.log_value = *out.log_reduced + stirling_log_factorial(dk);
      return out;
    }
    case WeightKind::log_factorial: {
      out.u = dk / (dk + x);
      out.log_reduced = 0.5 * std::log(x) - 0.5 * std::log(2 * std::numbers::pi * dk * (x + dk)) +
                        dk * std::log1p(x / dk) + x * std::log1p(dk / x);
      out.log_value = *out.log_reduced + stirling_log_factorial(dk);
      return out;
    }
    default:
      throw DomainError("asymptotics: no closed-form special case for " + model.name());
  }
}

SmallXPrediction bernoulli_small_x_prediction(unsigned k, double x) {
  if (!(x > 0)) throw DomainError("asymptotics: small-x prediction needs x > 0");
  if (k % 2 != 0) throw DomainError("asymptotics: centered Bernoulli moments of odd order vanish");
  const double dk = k;
  if (x >= dk) throw DomainError("asymptotics: small-x prediction needs x < k");
  SmallXPrediction out;
  out.log_value = dk * std::log(dk / (std::numbers::e * (std::log(dk) - std::log(x))));
  const double l = std::log(dk / x);
  out.u_expansion = l - std::log(l);
  out.u_exact = solve_saddle_target(WeightModel::bernoulli_centered(), dk / x).u;
  const double half = dk / 2;
  out.outside_admissible_range = x <= half * std::exp(-std::pow(half, 1.0 / 16));
  return out;
}

CompareRow compare_row(const WeightModel& model, double chi, unsigned k, const RateValue& rate) {
  CompareRow row;
  row.k = k;
  const double x = chi * k;
  row.log_exact = log_moment(model, k, x);
  row.log_predicted = refined_prediction(model, k, chi).log_value;
  row.rate_gap = std::fabs((row.log_exact - k * std::log(x)) / k - rate.psi);
  return row;
}

namespace {

std::vector<unsigned> sweep_orders(const WeightModel& model, unsigned k_max) {
  std::vector<unsigned> ks;
  const unsigned step = model.parity_even_only() ? 2 : 1;
  for (unsigned k = step; k <= k_max; k += step) ks.push_back(k);
  return ks;
}

}  // namespace

std::vector<CompareRow> compare_sweep_serial(const WeightModel& model, double chi, unsigned k_max) {
  const RateValue rate = rate_function(model, chi);
  const auto ks = sweep_orders(model, k_max);
  std::vector<CompareRow> rows;
  rows.reserve(ks.size());
  for (unsigned k : ks) rows.push_back(compare_row(model, chi, k, rate));
  return rows;
}

std::vector<CompareRow> compare_sweep(const WeightModel& model, double chi, unsigned k_max) {
  const RateValue rate = rate_function(model, chi);
  const auto ks = sweep_orders(model, k_max);
  std::vector<CompareRow> rows(ks.size());
  const auto count = static_cast<long>(ks.size());
  std::exception_ptr failure;
  // Later k cost O(k^2), so hand out the expensive end first.
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = count - 1; i >= 0; --i) {
    try {
      rows[i] = compare_row(model, chi, ks[i], rate);
    } catch (...) {
#pragma omp critical
      failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

}  // namespace cpm
