#include "cpm/auxdist.hpp"

#include "cpm/asymptotics.hpp"
#include "cpm/error.hpp"
#include "cpm/moments.hpp"

#include <cmath>
#include <numbers>

namespace cpm {

namespace {

constexpr unsigned kMaxSupport = 1'000'000;

}  // namespace

double AuxiliaryDistribution::retained_mass() const {
  double s = 0;
  for (double p : pmf) s += p;
  return s;
}

double AuxiliaryDistribution::pmf_mean() const {
  double s = 0;
  for (std::size_t j = 0; j < pmf.size(); ++j) s += static_cast<double>(j) * pmf[j];
  return s;
}

double AuxiliaryDistribution::pmf_variance() const {
  const double m = pmf_mean();
  double s = 0;
  for (std::size_t j = 0; j < pmf.size(); ++j) {
    const double d = static_cast<double>(j) - m;
    s += d * d * pmf[j];
  }
  return s;
}

AuxiliaryDistribution build_aux(const WeightModel& model, double x, double u, double mass_tolerance) {
  if (!(x > 0)) throw DomainError("auxdist: x must be positive");
  if (!(u > 0) || !(u < model.radius())) {
    throw DomainError("auxdist: u = " + std::to_string(u) + " is outside (0, u0) for " + model.name());
  }
  if (!model.has_full_series()) throw DomainError("auxdist: " + model.name() + " lacks the full generating function");
  if (!(mass_tolerance > 0 && mass_tolerance < 1)) throw DomainError("auxdist: mass tolerance must lie in (0, 1)");

  AuxiliaryDistribution aux;
  aux.model = model;
  aux.x = x;
  aux.u = u;
  aux.span = model.parity_even_only() ? 2 : 1;
  aux.log_G = x * (model.egf(u) - 1);
  const double h1 = model.egf_d1(u);
  const double h2 = model.egf_d2(u);
  aux.mean = x * u * h1;
  aux.variance = x * (u * h1 + u * u * h2);
  aux.sigma = std::sqrt(aux.variance);

  const double lu = std::log(u);
  auto guess = static_cast<double>(aux.mean + 12 * aux.sigma + 64);
  unsigned horizon = static_cast<unsigned>(std::min<double>(guess, kMaxSupport));
  for (;;) {
    const std::vector<double> lm = log_moment_sequence(model, horizon, x);
    std::vector<double> pmf;
    pmf.reserve(horizon + 1);
    double cumulative = 0;
    for (unsigned j = 0; j <= horizon; ++j) {
      const double lp = lm[j] + j * lu - std::lgamma(j + 1.0) - aux.log_G;
      const double p = std::isfinite(lp) ? std::exp(lp) : 0.0;
      pmf.push_back(p);
      cumulative += p;
      // Past the bulk, stop once the mass target is met or the terms are
      // far below rounding noise of the running sum.
      const bool past_bulk = j > aux.mean + 50 * aux.sigma + 10;
      if (cumulative >= 1 - mass_tolerance || (past_bulk && p < 1e-3 * mass_tolerance)) {
        if (j > aux.mean) {
          aux.support_cap = j;
          aux.pmf = std::move(pmf);
          aux.log_moments.assign(lm.begin(), lm.begin() + j + 1);
          return aux;
        }
      }
    }
    if (horizon >= kMaxSupport) {
      throw DomainError("auxdist: mass target not reached within " + std::to_string(kMaxSupport) + " terms");
    }
    horizon = std::min(kMaxSupport, 2 * horizon);
  }
}

double inversion_check(const AuxiliaryDistribution& aux, unsigned k) {
  if (k > aux.support_cap) throw DomainError("auxdist: k = " + std::to_string(k) + " is beyond the retained support");
  const double pk = aux.pmf[k];
  if (!(pk > 0)) throw DomainError("auxdist: P(Z = " + std::to_string(k) + ") is zero");
  double log_mk = aux.log_moments[k];
  if (k <= 400) {
    const MomentValue exact = moment_recurrence(aux.model, k, rational_from_double(aux.x));
    log_mk = *exact.value_log;
  }
  const double log_lhs = std::lgamma(k + 1.0) + aux.log_G - k * std::log(aux.u) + std::log(pk);
  return std::fabs(std::expm1(log_lhs - log_mk));
}

LocalLimitResult local_limit_check_at(const WeightModel& model, double x, unsigned k) {
  if (k == 0) throw DomainError("auxdist: local limit check needs k >= 1");
  if (model.parity_even_only() && k % 2 != 0) throw DomainError("auxdist: odd k has zero mass for " + model.name());
  const SaddleSolution s = solve_saddle_target(model, k / x);
  const AuxiliaryDistribution aux = build_aux(model, x, s.u);
  LocalLimitResult r;
  r.k = k;
  r.chi = x / k;
  r.x = x;
  r.u = s.u;
  r.sigma = aux.sigma;
  r.p_k = k <= aux.support_cap ? aux.pmf[k] : 0.0;
  r.ratio = r.p_k * std::sqrt(2 * std::numbers::pi) * aux.sigma / aux.span;
  return r;
}

LocalLimitResult local_limit_check(const WeightModel& model, double chi, unsigned k) {
  if (!(chi > 0)) throw DomainError("auxdist: chi must be positive");
  return local_limit_check_at(model, chi * k, k);
}

}  // namespace cpm
