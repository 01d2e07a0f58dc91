#include "cpm/rational.hpp"

#include "cpm/error.hpp"

#include <boost/multiprecision/gmp.hpp>

#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

namespace cpm {

namespace {

BigInt pow10(unsigned e) {
  BigInt r = 1;
  for (unsigned i = 0; i < e; ++i) r *= 10;
  return r;
}

Rational parse_decimal(std::string_view text) {
  std::size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    negative = text[pos] == '-';
    ++pos;
  }
  std::string digits;
  int frac_digits = 0;
  bool seen_point = false;
  bool seen_digit = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      seen_digit = true;
      if (seen_point) ++frac_digits;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw UsageError("not a number: '" + std::string(text) + "'");
  long exponent = 0;
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    std::string exp_text(text.substr(pos));
    std::size_t used = 0;
    try {
      exponent = std::stol(exp_text, &used);
    } catch (const std::exception&) {
      throw UsageError("bad exponent in '" + std::string(text) + "'");
    }
    pos += used;
  }
  if (pos != text.size()) throw UsageError("trailing characters in '" + std::string(text) + "'");
  if (std::labs(exponent) > 4000) throw UsageError("exponent out of range in '" + std::string(text) + "'");

  Rational value{BigInt(digits)};
  const long scale = exponent - frac_digits;
  if (scale >= 0) {
    value *= Rational(pow10(static_cast<unsigned>(scale)));
  } else {
    value /= Rational(pow10(static_cast<unsigned>(-scale)));
  }
  return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw UsageError("empty number");
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  const Rational num = parse_decimal(text.substr(0, slash));
  const Rational den = parse_decimal(text.substr(slash + 1));
  if (den == 0) throw UsageError("zero denominator in '" + std::string(text) + "'");
  return num / den;
}

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) throw DomainError("cannot convert non-finite double to rational");
  int exp = 0;
  const double mant = std::frexp(value, &exp);
  // 53-bit mantissa scaled to an integer.
  const auto scaled = static_cast<long long>(std::ldexp(mant, 53));
  Rational r{BigInt(scaled)};
  const int shift = exp - 53;
  BigInt two_pow = 1;
  two_pow <<= static_cast<unsigned>(std::abs(shift));
  if (shift >= 0) {
    r *= Rational(two_pow);
  } else {
    r /= Rational(two_pow);
  }
  return r;
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

double log_abs(const BigInt& z) {
  if (z == 0) return -std::numeric_limits<double>::infinity();
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, z.backend().data());
  return std::log(std::fabs(mant)) + static_cast<double>(exp) * std::log(2.0);
}

double log_abs(const Rational& q) {
  if (q == 0) return -std::numeric_limits<double>::infinity();
  return log_abs(BigInt(numerator(q))) - log_abs(BigInt(denominator(q)));
}

std::string to_decimal(const Rational& q, int digits) {
  if (q == 0) return "0";
  using Float = boost::multiprecision::mpf_float_100;
  const Float f(q);
  std::ostringstream os;
  os << std::setprecision(digits) << f;
  return os.str();
}

std::string to_ratio_string(const Rational& q) {
  std::ostringstream os;
  os << numerator(q);
  if (denominator(q) != 1) os << '/' << denominator(q);
  return os.str();
}

BigInt factorial(unsigned n) {
  BigInt r = 1;
  for (unsigned i = 2; i <= n; ++i) r *= i;
  return r;
}

BigInt binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (unsigned i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

}  // namespace cpm
