#pragma once

#include "cpm/rational.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cpm {

enum class WeightKind {
  unit,
  gaussian_centered,
  gamma,
  bernoulli_centered,
  exponential,
  log_factorial,
  custom,
  hat,
  tilde,
};

/// A weight law W described by its raw moments V_l = E W^l and the
/// exponential generating function H(u) = sum_l V_l u^l / l! on [0, u0).
///
/// Values are immutable and cheap to copy; transformed models share their
/// base model.  Built-in models evaluate H, H' and H'' in closed form.
/// Custom models carry a finite moment prefix and evaluate H by the
/// truncated series; asking them for a moment past the prefix throws.
class WeightModel {
 public:
  static WeightModel unit();
  static WeightModel gaussian_centered(const Rational& v2);
  static WeightModel gamma(const Rational& shape, const Rational& scale);
  static WeightModel bernoulli_centered();
  static WeightModel exponential();
  static WeightModel log_factorial();
  /// moments[0] must be 1; the horizon is moments.size() - 1.
  static WeightModel custom(std::vector<Rational> moments);

  const std::string& name() const { return state_->name; }
  WeightKind kind() const { return state_->kind; }

  /// Exact V_l.  Throws DomainError past a custom model's horizon.
  Rational moment(unsigned l) const;
  /// ln |V_l| in double precision, -inf when V_l = 0.
  double log_moment(unsigned l) const;
  /// -1, 0 or +1.
  int moment_sign(unsigned l) const;

  double egf(double u) const;
  double egf_d1(double u) const;
  double egf_d2(double u) const;

  /// Supremum u0 of the convergence interval; +inf when entire.
  double radius() const { return state_->radius; }
  bool parity_even_only() const { return state_->parity_even_only; }
  /// False for tilde models, which are not laws of any random variable.
  bool is_distribution() const { return state_->kind != WeightKind::tilde; }
  /// Finite prefix length for custom models (and transforms of them).
  std::optional<unsigned> horizon() const { return state_->horizon; }
  bool has_full_series() const { return !state_->horizon.has_value(); }

  /// Underlying model of a hat/tilde transform, nullptr otherwise.
  const WeightModel* base() const { return state_->base.get(); }

  /// Shape/scale for gamma, variance for gaussian; empty otherwise.
  const std::vector<Rational>& parameters() const { return state_->params; }

  /// Model of W - E W: egf e^{-u V_1} H(u); moments are central moments.
  friend WeightModel hat_transform(const WeightModel& model);
  /// Pseudo-model with egf H(u) - u V_1: V_1 zeroed, other moments kept.
  friend WeightModel tilde_transform(const WeightModel& model);

 private:
  struct State {
    WeightKind kind{};
    std::string name;
    std::vector<Rational> params;
    std::vector<double> params_d;
    std::vector<Rational> custom_moments;
    std::shared_ptr<const WeightModel> base;
    double radius = 0.0;
    bool parity_even_only = false;
    std::optional<unsigned> horizon;
    Rational base_mean;  // V_1 of the base model for transforms
    double base_mean_d = 0.0;
  };

  explicit WeightModel(std::shared_ptr<const State> state) : state_(std::move(state)) {}

  std::shared_ptr<const State> state_;
};

WeightModel hat_transform(const WeightModel& model);
WeightModel tilde_transform(const WeightModel& model);

/// Parses the command-line model syntax:
///   unit | gaussian:V2 | gamma:m,theta | bernoulli | exponential | logfact
///   | custom:path.json | hat:<model> | tilde:<model>
/// Custom JSON is {"moments": [1, v1, v2, ...]}; entries may be numbers or
/// strings such as "1/3".
WeightModel parse_weight_model(std::string_view text);

/// Reads {"moments": [...]} from a JSON document.
WeightModel custom_model_from_json(std::string_view json_text);

}  // namespace cpm
