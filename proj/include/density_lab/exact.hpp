#pragma once

#include <gmpxx.h>

#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dlab {

using Rational = mpq_class;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Parses "p/q" or an integer "p". Decimal notation is rejected so that no
/// rounding can sneak into exact parameters.
Rational parse_rational(std::string_view text);

/// "p/q" (or "p" when the denominator is 1).
std::string format_rational(const Rational& q);

bool is_perfect_square(const Rational& q);

/// Exact square root of a rational that is a perfect square.
Rational exact_sqrt(const Rational& q);

/// Rational enclosure [lo, hi] of sqrt(q) with relative width about 2^-bits.
std::pair<Rational, Rational> sqrt_bounds(const Rational& q, long bits = 128);

Rational pow(const Rational& base, unsigned exponent);

/// num/den in canonical form (gmpxx's two-argument constructor does not reduce).
inline Rational frac(long num, long den) {
  Rational q{mpz_class(num), mpz_class(den)};
  q.canonicalize();
  return q;
}

/// A real number of the form  sum_k c_k * pi^{p_k} * sqrt(s_k)  with rational
/// c_k, integer p_k and positive rational s_k.
///
/// Radicands within one pi power are kept pairwise "independent": two
/// radicands whose ratio is a rational square are merged.  With that
/// invariant the value is zero iff there are no terms, and sign() always
/// terminates.  Signs with at most two radicals and no pi are decided by the
/// squaring identities; everything else by rigorous MPFR interval refinement.
class ExactReal {
 public:
  struct Term {
    int pi_power = 0;
    Rational radicand = 1;
    Rational coeff = 0;
  };

  ExactReal() = default;
  ExactReal(const Rational& q);  // NOLINT(google-explicit-constructor)
  ExactReal(long v);             // NOLINT(google-explicit-constructor)
  ExactReal(int v) : ExactReal(static_cast<long>(v)) {}  // NOLINT

  static ExactReal sqrt(const Rational& s);
  static ExactReal pi_power(int k);
  static ExactReal term(const Rational& coeff, int pi_power, const Rational& radicand);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Value when it is rational (no pi, no surviving radical).
  std::optional<Rational> as_rational() const;

  /// For a non-negative value c*sqrt(s) (or a rational), the exact square.
  std::optional<Rational> exact_square() const;

  int sign() const;

  ExactReal operator-() const;
  ExactReal& operator+=(const ExactReal& other);
  ExactReal& operator-=(const ExactReal& other);
  ExactReal& operator*=(const ExactReal& other);
  ExactReal& operator*=(const Rational& q);
  ExactReal& operator/=(const Rational& q);

  friend ExactReal operator+(ExactReal a, const ExactReal& b) { return a += b; }
  friend ExactReal operator-(ExactReal a, const ExactReal& b) { return a -= b; }
  friend ExactReal operator*(ExactReal a, const ExactReal& b) { return a *= b; }
  friend ExactReal operator*(ExactReal a, const Rational& q) { return a *= q; }
  friend ExactReal operator*(const Rational& q, ExactReal a) { return a *= q; }
  friend ExactReal operator/(ExactReal a, const Rational& q) { return a /= q; }

  ExactReal pow(unsigned n) const;

  /// Multiplicative inverse; only defined for single-term values.
  ExactReal inverse() const;

  /// Rigorous rational enclosure [lo, hi] computed at `bits` of precision.
  std::pair<Rational, Rational> bracket(long bits = 128) const;

  double to_double() const;
  std::string to_string() const;

  friend std::strong_ordering operator<=>(const ExactReal& a, const ExactReal& b);
  friend bool operator==(const ExactReal& a, const ExactReal& b) { return (a - b).is_zero(); }

 private:
  void add_term(int pi_power, Rational radicand, Rational coeff);
  int refine_sign() const;

  std::vector<Term> terms_;
};

ExactReal min(const ExactReal& a, const ExactReal& b);
ExactReal max(const ExactReal& a, const ExactReal& b);

}  // namespace dlab
