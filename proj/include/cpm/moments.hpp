#pragma once

#include "cpm/rational.hpp"
#include "cpm/weights.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cpm {

enum class MomentMethod { recurrence, partition_oracle, finite_n, centered_tilde };

std::string to_string(MomentMethod method);

/// A compound Poisson moment M_k(x), exact and/or in log space.
struct MomentValue {
  unsigned k = 0;
  double x = 0.0;
  std::optional<Rational> x_exact;
  std::optional<Rational> value_exact;
  /// Signed double approximation (inf when out of range).
  double value_approx = 0.0;
  /// ln of the value; set when the value is positive.
  std::optional<double> value_log;
  MomentMethod method = MomentMethod::recurrence;
};

/// M_0(x), ..., M_kmax(x) by M_k = x sum_{j=1}^{k} C(k-1, j-1) V_j M_{k-j}.
std::vector<Rational> moment_sequence(const WeightModel& model, unsigned k_max, const Rational& x);

MomentValue moment_recurrence(const WeightModel& model, unsigned k, const Rational& x);

/// Direct sum over block-size profiles of k (k <= 25).
MomentValue moment_partition_oracle(const WeightModel& model, unsigned k, const Rational& x);

/// Bell polynomial B_k(x): unit weights.
MomentValue bell_polynomial(unsigned k, const Rational& x);
BigInt bell_number(unsigned k);

/// Sequence generated by the modified-Bell recurrence
///   b(2k+2) = 1 + b(2k) + sum_{l=1}^{k} C(2k, 2l-1) b(2k+2-2l),  b(0) = b(2) = 1.
/// Throws DomainError for odd input.
BigInt even_partition_number(unsigned two_k);

/// Number of partitions of a 2k-set into blocks of even size, i.e. the even
/// moment M_2k(1) of centered Bernoulli weights.
BigInt even_block_partition_count(unsigned two_k);

/// Exact pre-limit moment E(sum_{j<=n} a_j W_j)^k with P(a_j = 1) = lam / n.
MomentValue finite_n_moment(const WeightModel& model, unsigned k, std::uint64_t n, const Rational& lam);

/// k-th moment of (compound Poisson - lam V_1) by binomial expansion, exact.
MomentValue centered_moment_tilde(const WeightModel& model, unsigned k, const Rational& lam);

/// Same, evaluated in double precision.  When the alternating sum loses more
/// than 8 decimal digits the value is recomputed exactly (lam converted to
/// its exact dyadic rational); the returned value then carries value_exact.
MomentValue centered_moment_tilde_fp(const WeightModel& model, unsigned k, double lam);

/// ln M_0(x), ..., ln M_kmax(x) by the recurrence in log-sum-exp form.
/// Requires x > 0 and V_j >= 0 for all j <= k_max; throws DomainError on a
/// negative moment.  Entries are -inf where M_k = 0 (odd k, even-only laws).
std::vector<double> log_moment_sequence(const WeightModel& model, unsigned k_max, double x);
double log_moment(const WeightModel& model, unsigned k, double x);

/// S_k(x) = sum_{p=1}^{k} x^p / p! C(k-1, p-1); k! S_k(x) is the
/// exponential-weight moment.
Rational exp_identity_S(unsigned k, const Rational& x);

/// T_k(x) = x (x+1) ... (x+k-1) / k!; k! T_k(x) is the log_factorial-weight moment.
Rational factorial_identity_T(unsigned k, const Rational& x);

/// sum over profiles of k with exactly p blocks of p! / prod_i l_i!, which
/// counts compositions of k into p positive parts.
BigInt composition_profile_sum(unsigned k, unsigned p);

}  // namespace cpm
