#pragma once

#include "cpm/weights.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace cpm {

/// Which saddle equation fixes u in the degree-concentration threshold.
///  - moment_order: u H~'(u) = 2/kappa.  The bound is a Markov estimate on
///    the moment of order 2k = 2 ln n at intensity kappa ln n, i.e. at
///    x / order = kappa / 2.
///  - printed: u H~'(u) = 1/kappa, as the threshold is usually quoted.
enum class ThresholdConvention { moment_order, printed };

/// Draws i.i.d. weights whose law matches a WeightModel: unit (W = 1),
/// gaussian (normal(0, V2)), gamma(m, theta), bernoulli (+-1),
/// exponential(1), and hat transforms of those (draw minus V_1).
class WeightSampler {
 public:
  explicit WeightSampler(const WeightModel& model);
  double operator()(std::mt19937_64& rng);

 private:
  WeightKind kind_;
  double shift_ = 0.0;
  std::normal_distribution<double> normal_;
  std::gamma_distribution<double> gamma_;
  std::exponential_distribution<double> exponential_;
  std::bernoulli_distribution coin_;
};

struct GraphSimConfig {
  std::uint64_t n = 0;
  /// Edge intensity: each pair i < j is an edge with probability rho / n.
  double rho = 0.0;
  WeightModel weights = WeightModel::exponential();
  /// Deviation thresholds s, all evaluated on the same D_max draws.
  std::vector<double> s;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  ThresholdConvention convention = ThresholdConvention::moment_order;

  /// rho = kappa ln n.
  static GraphSimConfig with_kappa(std::uint64_t n, double kappa, WeightModel weights, std::vector<double> s,
                                   std::uint64_t trials, std::uint64_t seed);
  /// rho / ln n.
  double kappa() const;
  /// Throws DomainError unless 0 <= rho/n <= 1, n >= 2, trials >= 1 and the
  /// weights can be sampled.
  void validate() const;
};

/// Weighted degrees D_1..D_n of one graph for trial `trial_index`.
std::vector<double> sample_degrees(const GraphSimConfig& config, std::uint64_t trial_index);

/// One draw of D_max = max_i sum_{j != i} a_ij w_ij for trial `trial_index`.
/// The random stream depends only on (seed, trial_index).
double sample_dmax(const GraphSimConfig& config, std::uint64_t trial_index);

/// All trials, one after another.  Reference for the parallel kernel.
std::vector<double> sample_dmax_serial(const GraphSimConfig& config);
/// All trials, distributed over OpenMP threads; identical output to the
/// serial version for any thread count.
std::vector<double> sample_dmax_parallel(const GraphSimConfig& config);

struct UnionBound {
  double exponent = 0.0;  // ln of the raw bound
  double value = 0.0;     // min(exp(exponent), 1)
  bool vacuous = false;   // raw bound >= 1
};

/// H~'(u) exp{(H~(u)-1)/(u H~'(u)) - 1/2} with H~(u) = H(u) - u V_1.
double theorem41_threshold(const WeightModel& model, double kappa,
                           ThresholdConvention convention = ThresholdConvention::moment_order);

/// exp{2 ln n (1/2 - ln s' + ln H~'(u) + (H~(u)-1)/(u H~'(u)) - 1)}.
UnionBound union_bound(const WeightModel& model, std::uint64_t n, double kappa, double s_prime,
                       ThresholdConvention convention = ThresholdConvention::moment_order);

struct DeviationRow {
  double s = 0.0;
  /// s - V_1 / n
  double s_prime = 0.0;
  /// Fraction of trials with |D_max / rho - V_1| > s.
  double p_hat = 0.0;
  double ci_half_width = 0.0;
  double bound = 0.0;
  bool vacuous = false;
};

struct GraphTrialResult {
  std::vector<double> dmax_samples;
  double threshold_s = 0.0;
  std::vector<DeviationRow> rows;  // one per configured s, in order
};

/// 95% normal-approximation half width; p_hat in {0, 1} is pulled in by
/// half a trial so the interval never collapses to zero width.
double binomial_ci_half_width(double p_hat, std::uint64_t trials);

GraphTrialResult deviation_experiment(const GraphSimConfig& config, bool parallel = true);

}  // namespace cpm
