#include "cpm/weights.hpp"

#include "cpm/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace cpm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Rational pow_q(const Rational& base, unsigned e) {
  Rational r = 1;
  for (unsigned i = 0; i < e; ++i) r *= base;
  return r;
}

// (2j-1)!! for j >= 0
BigInt double_factorial_odd(unsigned j) {
  BigInt r = 1;
  for (unsigned i = 1; i < 2 * j; i += 2) r *= i;
  return r;
}

std::string param_string(const Rational& q) { return to_ratio_string(q); }

}  // namespace

WeightModel WeightModel::unit() {
  auto s = std::make_shared<State>();
  s->kind = WeightKind::unit;
  s->name = "unit";
  s->radius = kInf;
  return WeightModel(std::move(s));
}

WeightModel WeightModel::gaussian_centered(const Rational& v2) {
  if (v2 <= 0) throw DomainError("weights: gaussian variance must be positive");
  auto s = std::make_shared<State>();
  s->kind = WeightKind::gaussian_centered;
  s->name = "gaussian:" + param_string(v2);
  s->params = {v2};
  s->params_d = {to_double(v2)};
  s->radius = kInf;
  s->parity_even_only = true;
  return WeightModel(std::move(s));
}

WeightModel WeightModel::gamma(const Rational& shape, const Rational& scale) {
  if (shape <= 0 || scale <= 0) throw DomainError("weights: gamma shape and scale must be positive");
  auto s = std::make_shared<State>();
  s->kind = WeightKind::gamma;
  s->name = "gamma:" + param_string(shape) + "," + param_string(scale);
  s->params = {shape, scale};
  s->params_d = {to_double(shape), to_double(scale)};
  s->radius = 1.0 / s->params_d[1];
  return WeightModel(std::move(s));
}

WeightModel WeightModel::bernoulli_centered() {
  auto s = std::make_shared<State>();
  s->kind = WeightKind::bernoulli_centered;
  s->name = "bernoulli";
  s->radius = kInf;
  s->parity_even_only = true;
  return WeightModel(std::move(s));
}

WeightModel WeightModel::exponential() {
  auto s = std::make_shared<State>();
  s->kind = WeightKind::exponential;
  s->name = "exponential";
  s->radius = 1.0;
  return WeightModel(std::move(s));
}

WeightModel WeightModel::log_factorial() {
  auto s = std::make_shared<State>();
  s->kind = WeightKind::log_factorial;
  s->name = "logfact";
  s->radius = 1.0;
  return WeightModel(std::move(s));
}

WeightModel WeightModel::custom(std::vector<Rational> moments) {
  if (moments.empty() || moments[0] != 1) throw DomainError("weights: custom moments must start with V_0 = 1");
  auto s = std::make_shared<State>();
  s->kind = WeightKind::custom;
  s->name = "custom[" + std::to_string(moments.size() - 1) + "]";
  s->radius = kInf;
  s->horizon = static_cast<unsigned>(moments.size() - 1);
  bool even_only = true;
  for (std::size_t l = 1; l < moments.size(); l += 2) even_only = even_only && moments[l] == 0;
  s->parity_even_only = even_only && moments.size() > 2;
  s->custom_moments = std::move(moments);
  return WeightModel(std::move(s));
}

Rational WeightModel::moment(unsigned l) const {
  const State& s = *state_;
  if (l == 0) return 1;
  switch (s.kind) {
    case WeightKind::unit:
      return 1;
    case WeightKind::gaussian_centered:
      if (l % 2 == 1) return 0;
      return pow_q(s.params[0], l / 2) * Rational(double_factorial_odd(l / 2));
    case WeightKind::gamma: {
      Rational r = pow_q(s.params[1], l);
      for (unsigned i = 0; i < l; ++i) r *= s.params[0] + i;
      return r;
    }
    case WeightKind::bernoulli_centered:
      return l % 2 == 0 ? 1 : 0;
    case WeightKind::exponential:
      return Rational(factorial(l));
    case WeightKind::log_factorial:
      return Rational(factorial(l - 1));
    case WeightKind::custom:
      if (l > *s.horizon) {
        throw DomainError("weights: moment " + std::to_string(l) + " requested past custom horizon " +
                          std::to_string(*s.horizon));
      }
      return s.custom_moments[l];
    case WeightKind::hat: {
      // central moment: sum_i C(l,i) V_i (-mu)^{l-i}
      const Rational minus_mu = -s.base_mean;
      Rational acc = 0;
      Rational power = 1;  // (-mu)^{l-i}, built from i = l downward
      for (unsigned i = l + 1; i-- > 0;) {
        acc += Rational(binomial(l, i)) * s.base->moment(i) * power;
        power *= minus_mu;
      }
      return acc;
    }
    case WeightKind::tilde:
      return l == 1 ? Rational(0) : s.base->moment(l);
  }
  return 0;
}

int WeightModel::moment_sign(unsigned l) const {
  const State& s = *state_;
  if (l == 0) return 1;
  switch (s.kind) {
    case WeightKind::unit:
    case WeightKind::gamma:
    case WeightKind::exponential:
    case WeightKind::log_factorial:
      return 1;
    case WeightKind::gaussian_centered:
    case WeightKind::bernoulli_centered:
      return l % 2 == 0 ? 1 : 0;
    case WeightKind::tilde:
      return l == 1 ? 0 : s.base->moment_sign(l);
    case WeightKind::custom:
    case WeightKind::hat: {
      const Rational v = moment(l);
      return v > 0 ? 1 : (v < 0 ? -1 : 0);
    }
  }
  return 0;
}

double WeightModel::log_moment(unsigned l) const {
  const State& s = *state_;
  if (l == 0) return 0.0;
  const double dl = l;
  switch (s.kind) {
    case WeightKind::unit:
      return 0.0;
    case WeightKind::gaussian_centered: {
      if (l % 2 == 1) return -kInf;
      const double j = l / 2;
      // j ln V2 + ln (2j-1)!!
      return j * std::log(s.params_d[0]) + std::lgamma(2 * j + 1) - j * std::log(2.0) - std::lgamma(j + 1);
    }
    case WeightKind::gamma:
      return dl * std::log(s.params_d[1]) + std::lgamma(s.params_d[0] + dl) - std::lgamma(s.params_d[0]);
    case WeightKind::bernoulli_centered:
      return l % 2 == 0 ? 0.0 : -kInf;
    case WeightKind::exponential:
      return std::lgamma(dl + 1);
    case WeightKind::log_factorial:
      return std::lgamma(dl);
    case WeightKind::tilde:
      return l == 1 ? -kInf : s.base->log_moment(l);
    case WeightKind::custom:
    case WeightKind::hat:
      return log_abs(moment(l));
  }
  return -kInf;
}

double WeightModel::egf(double u) const {
  const State& s = *state_;
  switch (s.kind) {
    case WeightKind::unit:
      return std::exp(u);
    case WeightKind::gaussian_centered:
      return std::exp(s.params_d[0] * u * u / 2);
    case WeightKind::gamma: {
      const double t = 1 - s.params_d[1] * u;
      return t <= 0 ? kInf : std::pow(t, -s.params_d[0]);
    }
    case WeightKind::bernoulli_centered:
      return std::cosh(u);
    case WeightKind::exponential:
      return u >= 1 ? kInf : 1 / (1 - u);
    case WeightKind::log_factorial:
      return u >= 1 ? kInf : 1 - std::log1p(-u);
    case WeightKind::custom: {
      double acc = 0, term = 1;  // term = u^l / l!
      for (unsigned l = 0; l <= *s.horizon; ++l) {
        if (l > 0) term *= u / l;
        acc += to_double(s.custom_moments[l]) * term;
      }
      return acc;
    }
    case WeightKind::hat:
      return std::exp(-u * s.base_mean_d) * s.base->egf(u);
    case WeightKind::tilde:
      return s.base->egf(u) - u * s.base_mean_d;
  }
  return kInf;
}

double WeightModel::egf_d1(double u) const {
  const State& s = *state_;
  switch (s.kind) {
    case WeightKind::unit:
      return std::exp(u);
    case WeightKind::gaussian_centered: {
      const double v2 = s.params_d[0];
      return v2 * u * std::exp(v2 * u * u / 2);
    }
    case WeightKind::gamma: {
      const double m = s.params_d[0], th = s.params_d[1];
      const double t = 1 - th * u;
      return t <= 0 ? kInf : m * th * std::pow(t, -m - 1);
    }
    case WeightKind::bernoulli_centered:
      return std::sinh(u);
    case WeightKind::exponential:
      return u >= 1 ? kInf : 1 / ((1 - u) * (1 - u));
    case WeightKind::log_factorial:
      return u >= 1 ? kInf : 1 / (1 - u);
    case WeightKind::custom: {
      double acc = 0, term = 1;  // term = u^{l-1} / (l-1)!
      for (unsigned l = 1; l <= *s.horizon; ++l) {
        if (l > 1) term *= u / (l - 1);
        acc += to_double(s.custom_moments[l]) * term;
      }
      return acc;
    }
    case WeightKind::hat: {
      const double mu = s.base_mean_d;
      return std::exp(-u * mu) * (s.base->egf_d1(u) - mu * s.base->egf(u));
    }
    case WeightKind::tilde:
      return s.base->egf_d1(u) - s.base_mean_d;
  }
  return kInf;
}

double WeightModel::egf_d2(double u) const {
  const State& s = *state_;
  switch (s.kind) {
    case WeightKind::unit:
      return std::exp(u);
    case WeightKind::gaussian_centered: {
      const double v2 = s.params_d[0];
      return v2 * (1 + v2 * u * u) * std::exp(v2 * u * u / 2);
    }
    case WeightKind::gamma: {
      const double m = s.params_d[0], th = s.params_d[1];
      const double t = 1 - th * u;
      return t <= 0 ? kInf : m * (m + 1) * th * th * std::pow(t, -m - 2);
    }
    case WeightKind::bernoulli_centered:
      return std::cosh(u);
    case WeightKind::exponential:
      return u >= 1 ? kInf : 2 / ((1 - u) * (1 - u) * (1 - u));
    case WeightKind::log_factorial:
      return u >= 1 ? kInf : 1 / ((1 - u) * (1 - u));
    case WeightKind::custom: {
      double acc = 0, term = 1;  // term = u^{l-2} / (l-2)!
      for (unsigned l = 2; l <= *s.horizon; ++l) {
        if (l > 2) term *= u / (l - 2);
        acc += to_double(s.custom_moments[l]) * term;
      }
      return acc;
    }
    case WeightKind::hat: {
      const double mu = s.base_mean_d;
      const WeightModel& b = *s.base;
      return std::exp(-u * mu) * (b.egf_d2(u) - 2 * mu * b.egf_d1(u) + mu * mu * b.egf(u));
    }
    case WeightKind::tilde:
      return s.base->egf_d2(u);
  }
  return kInf;
}

WeightModel hat_transform(const WeightModel& model) {
  const Rational mean = model.moment(1);
  if (mean == 0) return model;
  auto s = std::make_shared<WeightModel::State>();
  s->kind = WeightKind::hat;
  s->name = "hat(" + model.name() + ")";
  s->base = std::make_shared<const WeightModel>(model);
  s->radius = model.radius();
  s->horizon = model.horizon();
  s->base_mean = mean;
  s->base_mean_d = to_double(mean);
  return WeightModel(std::move(s));
}

WeightModel tilde_transform(const WeightModel& model) {
  const Rational mean = model.moment(1);
  if (mean == 0) return model;
  auto s = std::make_shared<WeightModel::State>();
  s->kind = WeightKind::tilde;
  s->name = "tilde(" + model.name() + ")";
  s->base = std::make_shared<const WeightModel>(model);
  s->radius = model.radius();
  s->horizon = model.horizon();
  s->base_mean = mean;
  s->base_mean_d = to_double(mean);
  return WeightModel(std::move(s));
}

WeightModel custom_model_from_json(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("weights: custom model JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("moments") || !doc["moments"].is_array()) {
    throw UsageError("weights: custom model JSON must be {\"moments\": [...]}");
  }
  std::vector<Rational> moments;
  for (const auto& entry : doc["moments"]) {
    if (entry.is_string()) {
      moments.push_back(parse_rational(entry.get<std::string>()));
    } else if (entry.is_number_integer()) {
      moments.emplace_back(entry.get<long long>());
    } else if (entry.is_number()) {
      // the JSON text is decimal, so round-trip through its shortest form
      moments.push_back(parse_rational(entry.dump()));
    } else {
      throw UsageError("weights: custom moments must be numbers or rational strings");
    }
  }
  try {
    return WeightModel::custom(std::move(moments));
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

WeightModel parse_weight_model(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  auto require_no_args = [&](std::string_view what) {
    if (colon != std::string_view::npos) throw UsageError("weights: '" + std::string(what) + "' takes no parameters");
  };
  try {
    if (head == "unit") {
      require_no_args(head);
      return WeightModel::unit();
    }
    if (head == "bernoulli") {
      require_no_args(head);
      return WeightModel::bernoulli_centered();
    }
    if (head == "exponential") {
      require_no_args(head);
      return WeightModel::exponential();
    }
    if (head == "logfact") {
      require_no_args(head);
      return WeightModel::log_factorial();
    }
    if (head == "gaussian") {
      if (rest.empty()) throw UsageError("weights: gaussian needs a variance, e.g. gaussian:1");
      return WeightModel::gaussian_centered(parse_rational(rest));
    }
    if (head == "gamma") {
      const auto comma = rest.find(',');
      if (comma == std::string_view::npos) throw UsageError("weights: gamma needs shape,scale, e.g. gamma:2,1/2");
      return WeightModel::gamma(parse_rational(rest.substr(0, comma)), parse_rational(rest.substr(comma + 1)));
    }
    if (head == "custom") {
      std::ifstream in{std::string(rest)};
      if (!in) throw IoError("weights: cannot open custom model file '" + std::string(rest) + "'");
      std::ostringstream buf;
      buf << in.rdbuf();
      return custom_model_from_json(buf.str());
    }
    if (head == "hat") return hat_transform(parse_weight_model(rest));
    if (head == "tilde") return tilde_transform(parse_weight_model(rest));
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  throw UsageError("weights: unknown model '" + std::string(text) + "'");
}

}  // namespace cpm
