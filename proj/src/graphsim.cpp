#include "cpm/graphsim.hpp"

#include "cpm/asymptotics.hpp"
#include "cpm/error.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>

namespace cpm {

namespace {

const WeightModel& sampled_law(const WeightModel& model) {
  return model.kind() == WeightKind::hat ? *model.base() : model;
}

bool samplable(const WeightModel& model) {
  switch (sampled_law(model).kind()) {
    case WeightKind::unit:
    case WeightKind::gaussian_centered:
    case WeightKind::gamma:
    case WeightKind::bernoulli_centered:
    case WeightKind::exponential:
      return true;
    default:
      return false;
  }
}

std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

WeightSampler::WeightSampler(const WeightModel& model) {
  if (!samplable(model)) throw DomainError("graphsim: no sampler for weight model " + model.name());
  const WeightModel& law = sampled_law(model);
  kind_ = law.kind();
  if (model.kind() == WeightKind::hat) shift_ = to_double(law.moment(1));
  if (kind_ == WeightKind::gaussian_centered) {
    normal_ = std::normal_distribution<double>(0.0, std::sqrt(to_double(law.parameters()[0])));
  } else if (kind_ == WeightKind::gamma) {
    gamma_ = std::gamma_distribution<double>(to_double(law.parameters()[0]), to_double(law.parameters()[1]));
  }
}

double WeightSampler::operator()(std::mt19937_64& rng) {
  double w = 1.0;
  switch (kind_) {
    case WeightKind::gaussian_centered:
      w = normal_(rng);
      break;
    case WeightKind::gamma:
      w = gamma_(rng);
      break;
    case WeightKind::bernoulli_centered:
      w = coin_(rng) ? 1.0 : -1.0;
      break;
    case WeightKind::exponential:
      w = exponential_(rng);
      break;
    default:
      break;
  }
  return w - shift_;
}

GraphSimConfig GraphSimConfig::with_kappa(std::uint64_t n, double kappa, WeightModel weights, std::vector<double> s,
                                          std::uint64_t trials, std::uint64_t seed) {
  GraphSimConfig c;
  c.n = n;
  c.rho = kappa * std::log(static_cast<double>(n));
  c.weights = std::move(weights);
  c.s = std::move(s);
  c.trials = trials;
  c.seed = seed;
  return c;
}

double GraphSimConfig::kappa() const { return rho / std::log(static_cast<double>(n)); }

void GraphSimConfig::validate() const {
  if (n < 2) throw DomainError("graphsim: n must be at least 2");
  if (!(rho >= 0) || rho > static_cast<double>(n)) throw DomainError("graphsim: edge probability rho/n must lie in [0, 1]");
  if (trials < 1) throw DomainError("graphsim: trials must be at least 1");
  if (!samplable(weights)) throw DomainError("graphsim: no sampler for weight model " + weights.name());
}

std::vector<double> sample_degrees(const GraphSimConfig& config, std::uint64_t trial_index) {
  const std::uint64_t n = config.n;
  const double p = std::min(1.0, config.rho / static_cast<double>(n));
  std::vector<double> degree(n, 0.0);
  if (p <= 0) return degree;
  std::mt19937_64 rng = trial_stream(config.seed, trial_index);
  WeightSampler weight(config.weights);
  std::vector<char> taken(n, 0);
  std::vector<std::uint64_t> partners;
  for (std::uint64_t i = 0; i + 1 < n; ++i) {
    const std::uint64_t row = n - 1 - i;  // candidates i+1 .. n-1
    std::binomial_distribution<std::uint64_t> count_dist(row, p);
    const std::uint64_t c = count_dist(rng);
    if (c == 0) continue;
    // Floyd's sampling of c distinct offsets from [0, row).
    partners.clear();
    for (std::uint64_t j = row - c; j < row; ++j) {
      std::uniform_int_distribution<std::uint64_t> pick(0, j);
      std::uint64_t t = pick(rng);
      if (taken[t]) t = j;
      taken[t] = 1;
      partners.push_back(t);
    }
    for (std::uint64_t t : partners) {
      taken[t] = 0;
      const double w = weight(rng);
      degree[i] += w;
      degree[i + 1 + t] += w;
    }
  }
  return degree;
}

double sample_dmax(const GraphSimConfig& config, std::uint64_t trial_index) {
  const std::vector<double> degree = sample_degrees(config, trial_index);
  return *std::max_element(degree.begin(), degree.end());
}

std::vector<double> sample_dmax_serial(const GraphSimConfig& config) {
  config.validate();
  std::vector<double> out(config.trials);
  for (std::uint64_t t = 0; t < config.trials; ++t) out[t] = sample_dmax(config, t);
  return out;
}

std::vector<double> sample_dmax_parallel(const GraphSimConfig& config) {
  config.validate();
  std::vector<double> out(config.trials);
  const auto trials = static_cast<long long>(config.trials);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16)
  for (long long t = 0; t < trials; ++t) {
    try {
      out[t] = sample_dmax(config, static_cast<std::uint64_t>(t));
    } catch (...) {
#pragma omp critical
      failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

namespace {

struct TildeSaddle {
  double u, h, h1;
};

TildeSaddle tilde_saddle(const WeightModel& model, double kappa, ThresholdConvention convention) {
  if (!(kappa > 0)) throw DomainError("graphsim: kappa must be positive");
  const WeightModel tilde = tilde_transform(model);
  const double target = convention == ThresholdConvention::printed ? 1 / kappa : 2 / kappa;
  const SaddleSolution s = solve_saddle_target(tilde, target);
  return {s.u, s.H_u, s.H1_u};
}

}  // namespace

double theorem41_threshold(const WeightModel& model, double kappa, ThresholdConvention convention) {
  const TildeSaddle s = tilde_saddle(model, kappa, convention);
  return s.h1 * std::exp((s.h - 1) / (s.u * s.h1) - 0.5);
}

UnionBound union_bound(const WeightModel& model, std::uint64_t n, double kappa, double s_prime,
                       ThresholdConvention convention) {
  if (!(s_prime > 0)) throw DomainError("graphsim: union bound needs s' > 0");
  if (n < 2) throw DomainError("graphsim: union bound needs n >= 2");
  const TildeSaddle s = tilde_saddle(model, kappa, convention);
  UnionBound b;
  const double ln_n = std::log(static_cast<double>(n));
  b.exponent = 2 * ln_n * (0.5 - std::log(s_prime) + std::log(s.h1) + (s.h - 1) / (s.u * s.h1) - 1);
  b.vacuous = b.exponent >= 0;
  b.value = b.vacuous ? 1.0 : std::exp(b.exponent);
  return b;
}

double binomial_ci_half_width(double p_hat, std::uint64_t trials) {
  const double t = static_cast<double>(trials);
  const double guard = 0.5 / t;
  const double p = std::clamp(p_hat, guard, 1 - guard);
  return 1.959963984540054 * std::sqrt(p * (1 - p) / t);
}

GraphTrialResult deviation_experiment(const GraphSimConfig& config, bool parallel) {
  config.validate();
  GraphTrialResult result;
  result.dmax_samples = parallel ? sample_dmax_parallel(config) : sample_dmax_serial(config);
  const double v1 = to_double(config.weights.moment(1));
  const double kappa = config.kappa();
  result.threshold_s = theorem41_threshold(config.weights, kappa, config.convention);
  for (double s : config.s) {
    DeviationRow row;
    row.s = s;
    row.s_prime = s - v1 / static_cast<double>(config.n);
    std::uint64_t exceed = 0;
    for (double d : result.dmax_samples) {
      if (std::fabs(d / config.rho - v1) > s) ++exceed;
    }
    row.p_hat = static_cast<double>(exceed) / static_cast<double>(config.trials);
    row.ci_half_width = binomial_ci_half_width(row.p_hat, config.trials);
    if (row.s_prime > 0) {
      const UnionBound b = union_bound(config.weights, config.n, kappa, row.s_prime, config.convention);
      row.bound = b.value;
      row.vacuous = b.vacuous;
    } else {
      row.bound = 1.0;
      row.vacuous = true;
    }
    result.rows.push_back(row);
  }
  return result;
}

}  // namespace cpm
