#include "cpm/moments.hpp"

#include "cpm/error.hpp"
#include "cpm/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cpm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<Rational> moment_prefix(const WeightModel& model, unsigned k_max) {
  if (const auto h = model.horizon(); h && *h < k_max) {
    throw DomainError("moments: order " + std::to_string(k_max) + " needs V_" + std::to_string(k_max) +
                      " but model " + model.name() + " stops at V_" + std::to_string(*h));
  }
  std::vector<Rational> v;
  v.reserve(k_max + 1);
  for (unsigned j = 0; j <= k_max; ++j) v.push_back(model.moment(j));
  return v;
}

MomentValue make_value(unsigned k, const Rational& x, Rational value, MomentMethod method) {
  MomentValue out;
  out.k = k;
  out.x = to_double(x);
  out.x_exact = x;
  if (value > 0) out.value_log = log_abs(value);
  out.value_approx = to_double(value);
  out.value_exact = std::move(value);
  out.method = method;
  return out;
}

}  // namespace

std::string to_string(MomentMethod method) {
  switch (method) {
    case MomentMethod::recurrence:
      return "recurrence";
    case MomentMethod::partition_oracle:
      return "partition_oracle";
    case MomentMethod::finite_n:
      return "finite_n";
    case MomentMethod::centered_tilde:
      return "centered_tilde";
  }
  return "unknown";
}

std::vector<Rational> moment_sequence(const WeightModel& model, unsigned k_max, const Rational& x) {
  const std::vector<Rational> v = moment_prefix(model, k_max);
  std::vector<Rational> m(k_max + 1);
  m[0] = 1;
  std::vector<BigInt> row{1};  // C(k-1, .) for the current k
  for (unsigned k = 1; k <= k_max; ++k) {
    if (k > 1) {
      std::vector<BigInt> next(k);
      next[0] = 1;
      next[k - 1] = 1;
      for (unsigned i = 1; i + 1 < k; ++i) next[i] = row[i - 1] + row[i];
      row = std::move(next);
    }
    Rational acc = 0;
    for (unsigned j = 1; j <= k; ++j) {
      if (v[j] == 0 || m[k - j] == 0) continue;
      acc += Rational(row[j - 1]) * v[j] * m[k - j];
    }
    m[k] = x * acc;
  }
  return m;
}

MomentValue moment_recurrence(const WeightModel& model, unsigned k, const Rational& x) {
  auto seq = moment_sequence(model, k, x);
  return make_value(k, x, std::move(seq[k]), MomentMethod::recurrence);
}

MomentValue moment_partition_oracle(const WeightModel& model, unsigned k, const Rational& x) {
  if (k > kMaxEnumerationOrder) {
    throw DomainError("moments: partition oracle is capped at k = " + std::to_string(kMaxEnumerationOrder));
  }
  const std::vector<Rational> v = moment_prefix(model, k);
  std::vector<Rational> xv(k + 1);
  for (unsigned i = 1; i <= k; ++i) xv[i] = x * v[i];
  Rational total = 0;
  for_each_profile(k, [&](const PartitionProfile& p) {
    Rational term{p.weight_count};
    for (unsigned i = 1; i <= k && term != 0; ++i) {
      for (unsigned r = 0; r < p.l[i - 1]; ++r) term *= xv[i];
    }
    total += term;
  });
  return make_value(k, x, std::move(total), MomentMethod::partition_oracle);
}

MomentValue bell_polynomial(unsigned k, const Rational& x) {
  return moment_recurrence(WeightModel::unit(), k, x);
}

BigInt bell_number(unsigned k) {
  return numerator(*bell_polynomial(k, Rational(1)).value_exact);
}

BigInt even_partition_number(unsigned two_k) {
  if (two_k % 2 != 0) throw DomainError("moments: even_partition_number needs an even order, got " + std::to_string(two_k));
  const unsigned half = two_k / 2;
  std::vector<BigInt> b(half + 1);  // b[j] = value at 2j
  b[0] = 1;
  if (half >= 1) b[1] = 1;
  for (unsigned k = 1; k + 1 <= half; ++k) {
    BigInt acc = 1 + b[k];
    for (unsigned l = 1; l <= k; ++l) acc += binomial(2 * k, 2 * l - 1) * b[k + 1 - l];
    b[k + 1] = acc;
  }
  return b[half];
}

BigInt even_block_partition_count(unsigned two_k) {
  if (two_k % 2 != 0) throw DomainError("moments: even_block_partition_count needs an even order");
  const auto seq = moment_sequence(WeightModel::bernoulli_centered(), two_k, Rational(1));
  return numerator(seq[two_k]);
}

MomentValue finite_n_moment(const WeightModel& model, unsigned k, std::uint64_t n, const Rational& lam) {
  if (n == 0) throw DomainError("moments: finite_n_moment needs n >= 1");
  if (k > kMaxEnumerationOrder) {
    throw DomainError("moments: finite_n_moment is capped at k = " + std::to_string(kMaxEnumerationOrder));
  }
  const std::vector<Rational> v = moment_prefix(model, k);
  const Rational p = lam / Rational(BigInt(n));
  std::vector<Rational> pv(k + 1);
  for (unsigned i = 1; i <= k; ++i) pv[i] = p * v[i];
  // falling[c] = n (n-1) ... (n-c+1)
  std::vector<BigInt> falling(k + 1);
  falling[0] = 1;
  for (unsigned c = 1; c <= k; ++c) {
    const BigInt factor = n >= c ? BigInt(n - (c - 1)) : BigInt(0);
    falling[c] = falling[c - 1] * factor;
  }
  Rational total = 0;
  for_each_profile(k, [&](const PartitionProfile& prof) {
    Rational term{prof.weight_count * falling[prof.block_count()]};
    for (unsigned i = 1; i <= k && term != 0; ++i) {
      for (unsigned r = 0; r < prof.l[i - 1]; ++r) term *= pv[i];
    }
    total += term;
  });
  return make_value(k, lam, std::move(total), MomentMethod::finite_n);
}

MomentValue centered_moment_tilde(const WeightModel& model, unsigned k, const Rational& lam) {
  const auto m = moment_sequence(model, k, lam);
  const Rational shift = -lam * model.moment(1);
  Rational acc = 0;
  Rational power = 1;  // shift^{k-r}, from r = k downward
  for (unsigned r = k + 1; r-- > 0;) {
    acc += Rational(binomial(k, r)) * m[r] * power;
    power *= shift;
  }
  return make_value(k, lam, std::move(acc), MomentMethod::centered_tilde);
}

MomentValue centered_moment_tilde_fp(const WeightModel& model, unsigned k, double lam) {
  const std::vector<Rational> vq = moment_prefix(model, k);
  std::vector<double> v(k + 1);
  for (unsigned j = 0; j <= k; ++j) v[j] = to_double(vq[j]);

  std::vector<double> m(k + 1, 0.0);
  m[0] = 1;
  for (unsigned kk = 1; kk <= k; ++kk) {
    double acc = 0, c = 1;  // c = C(kk-1, j-1)
    for (unsigned j = 1; j <= kk; ++j) {
      acc += c * v[j] * m[kk - j];
      c = c * (kk - j) / j;
    }
    m[kk] = lam * acc;
  }
  const double shift = -lam * v[1];
  double acc = 0, largest = 0, c = 1;  // c = C(k, r)
  for (unsigned r = 0; r <= k; ++r) {
    const double term = c * m[r] * std::pow(shift, static_cast<int>(k - r));
    acc += term;
    largest = std::max(largest, std::fabs(term));
    c = c * (k - r) / (r + 1);
  }
  const bool lost_digits = largest > 0 && (acc == 0 || largest / std::fabs(acc) > 1e8);
  if (lost_digits || !std::isfinite(acc)) {
    return centered_moment_tilde(model, k, rational_from_double(lam));
  }
  MomentValue out;
  out.k = k;
  out.x = lam;
  if (acc > 0) out.value_log = std::log(acc);
  out.value_approx = acc;
  out.method = MomentMethod::centered_tilde;
  return out;
}

std::vector<double> log_moment_sequence(const WeightModel& model, unsigned k_max, double x) {
  if (!(x > 0)) throw DomainError("moments: log-space moments need x > 0");
  if (const auto h = model.horizon(); h && *h < k_max) {
    throw DomainError("moments: order " + std::to_string(k_max) + " past custom horizon of " + model.name());
  }
  // lw[j] = ln(j V_j / j!) for V_j > 0
  std::vector<double> lw(k_max + 1, kNegInf);
  for (unsigned j = 1; j <= k_max; ++j) {
    const int sign = model.moment_sign(j);
    if (sign < 0) {
      throw DomainError("moments: log-space recurrence met negative V_" + std::to_string(j) + " in " + model.name() +
                        "; use the exact path");
    }
    if (sign > 0) lw[j] = std::log(static_cast<double>(j)) + model.log_moment(j) - std::lgamma(j + 1.0);
  }
  // r[k] = ln(M_k / k!)
  std::vector<double> r(k_max + 1, kNegInf);
  r[0] = 0;
  const double lx = std::log(x);
  std::vector<double> terms;
  terms.reserve(k_max);
  for (unsigned k = 1; k <= k_max; ++k) {
    terms.clear();
    double top = kNegInf;
    for (unsigned j = 1; j <= k; ++j) {
      if (lw[j] == kNegInf || r[k - j] == kNegInf) continue;
      const double t = lw[j] + r[k - j];
      terms.push_back(t);
      top = std::max(top, t);
    }
    if (terms.empty()) continue;
    double sum = 0;
    for (double t : terms) sum += std::exp(t - top);
    r[k] = lx - std::log(static_cast<double>(k)) + top + std::log(sum);
  }
  for (unsigned k = 0; k <= k_max; ++k) {
    if (r[k] != kNegInf) r[k] += std::lgamma(k + 1.0);
  }
  return r;
}

double log_moment(const WeightModel& model, unsigned k, double x) {
  return log_moment_sequence(model, k, x)[k];
}

Rational exp_identity_S(unsigned k, const Rational& x) {
  if (k == 0) throw DomainError("moments: S_k needs k >= 1");
  Rational acc = 0;
  Rational xp = 1;
  for (unsigned p = 1; p <= k; ++p) {
    xp *= x;
    acc += xp / Rational(factorial(p)) * Rational(binomial(k - 1, p - 1));
  }
  return acc;
}

Rational factorial_identity_T(unsigned k, const Rational& x) {
  if (k == 0) throw DomainError("moments: T_k needs k >= 1");
  Rational acc = 1;
  for (unsigned i = 0; i < k; ++i) acc *= x + i;
  return acc / Rational(factorial(k));
}

BigInt composition_profile_sum(unsigned k, unsigned p) {
  BigInt total = 0;
  const BigInt p_fact = factorial(p);
  for_each_profile(k, [&](const PartitionProfile& prof) {
    if (prof.block_count() != p) return;
    BigInt denom = 1;
    for (unsigned li : prof.l) denom *= factorial(li);
    total += p_fact / denom;
  });
  return total;
}

}  // namespace cpm
