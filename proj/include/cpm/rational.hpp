#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <string>
#include <string_view>

namespace cpm {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

/// Parses "7", "-3/4", "0.125", "2.5e-3" into an exact rational.
Rational parse_rational(std::string_view text);

/// Exact value of a finite double.
Rational rational_from_double(double value);

double to_double(const Rational& q);

/// Natural log of |q| without overflow for huge numerators/denominators.
/// q must be non-zero.
double log_abs(const Rational& q);
double log_abs(const BigInt& z);

/// Decimal with `digits` significant digits (scientific when large/small).
std::string to_decimal(const Rational& q, int digits = 30);
std::string to_ratio_string(const Rational& q);

BigInt factorial(unsigned n);
BigInt binomial(unsigned n, unsigned k);

}  // namespace cpm
