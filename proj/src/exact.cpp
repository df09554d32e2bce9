#include "density_lab/exact.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cctype>
#include <sstream>

namespace dlab {

namespace {

// Minimal RAII holder for an mpfr_t.
class Mpfr {
 public:
  explicit Mpfr(long bits) { mpfr_init2(v_, bits); }
  ~Mpfr() { mpfr_clear(v_); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

 private:
  mpfr_t v_;
};

Rational to_rational(const Mpfr& x) {
  Rational q;
  mpfr_get_q(q.get_mpq_t(), x.get());
  return q;
}

bool is_perfect_square(const mpz_class& z) {
  return sgn(z) >= 0 && mpz_perfect_square_p(z.get_mpz_t()) != 0;
}

// sign(p + q*sqrt(s)) for s > 0 not a perfect square.
int sign_one_radical(const Rational& p, const Rational& q, const Rational& s) {
  const int sp = sgn(p);
  const int sq = sgn(q);
  if (sq == 0) return sp;
  if (sp == 0 || sp == sq) return sq;
  const int c = cmp(Rational(p * p), Rational(q * q * s));
  return c > 0 ? sp : sq;
}

// Positive magnitude bounds of pi^k * sqrt(s).
void magnitude_bounds(int k, const Rational& s, Mpfr& lo, Mpfr& hi, long bits) {
  Mpfr t(bits);
  if (k >= 0) {
    mpfr_const_pi(lo.get(), MPFR_RNDD);
    mpfr_pow_ui(lo.get(), lo.get(), static_cast<unsigned long>(k), MPFR_RNDD);
    mpfr_const_pi(hi.get(), MPFR_RNDU);
    mpfr_pow_ui(hi.get(), hi.get(), static_cast<unsigned long>(k), MPFR_RNDU);
  } else {
    mpfr_const_pi(t.get(), MPFR_RNDU);
    mpfr_pow_ui(t.get(), t.get(), static_cast<unsigned long>(-k), MPFR_RNDU);
    mpfr_ui_div(lo.get(), 1, t.get(), MPFR_RNDD);
    mpfr_const_pi(t.get(), MPFR_RNDD);
    mpfr_pow_ui(t.get(), t.get(), static_cast<unsigned long>(-k), MPFR_RNDD);
    mpfr_ui_div(hi.get(), 1, t.get(), MPFR_RNDU);
  }
  if (s != 1) {
    mpfr_set_q(t.get(), s.get_mpq_t(), MPFR_RNDD);
    mpfr_sqrt(t.get(), t.get(), MPFR_RNDD);
    mpfr_mul(lo.get(), lo.get(), t.get(), MPFR_RNDD);
    mpfr_set_q(t.get(), s.get_mpq_t(), MPFR_RNDU);
    mpfr_sqrt(t.get(), t.get(), MPFR_RNDU);
    mpfr_mul(hi.get(), hi.get(), t.get(), MPFR_RNDU);
  }
}

void bracket_mpfr(const std::vector<ExactReal::Term>& terms, Mpfr& lo, Mpfr& hi, long bits) {
  mpfr_set_zero(lo.get(), 1);
  mpfr_set_zero(hi.get(), 1);
  Mpfr ml(bits), mu(bits), cl(bits), cu(bits), t(bits);
  for (const auto& term : terms) {
    magnitude_bounds(term.pi_power, term.radicand, ml, mu, bits);
    mpfr_set_q(cl.get(), term.coeff.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(cu.get(), term.coeff.get_mpq_t(), MPFR_RNDU);
    if (sgn(term.coeff) > 0) {
      mpfr_mul(t.get(), cl.get(), ml.get(), MPFR_RNDD);
      mpfr_add(lo.get(), lo.get(), t.get(), MPFR_RNDD);
      mpfr_mul(t.get(), cu.get(), mu.get(), MPFR_RNDU);
      mpfr_add(hi.get(), hi.get(), t.get(), MPFR_RNDU);
    } else {
      mpfr_mul(t.get(), cl.get(), mu.get(), MPFR_RNDD);
      mpfr_add(lo.get(), lo.get(), t.get(), MPFR_RNDD);
      mpfr_mul(t.get(), cu.get(), ml.get(), MPFR_RNDU);
      mpfr_add(hi.get(), hi.get(), t.get(), MPFR_RNDU);
    }
  }
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  if (s.empty()) throw InvalidArgument("empty rational");
  const auto slash = s.find('/');
  auto valid_int = [](const std::string& part) {
    if (part.empty()) return false;
    std::size_t start = (part[0] == '-' || part[0] == '+') ? 1 : 0;
    if (start == part.size()) return false;
    return std::all_of(part.begin() + static_cast<long>(start), part.end(),
                       [](unsigned char c) { return std::isdigit(c) != 0; });
  };
  std::string num = s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!valid_int(num) || !valid_int(den)) {
    throw InvalidArgument("not an exact rational (expected p/q): '" + std::string(text) + "'");
  }
  if (num[0] == '+') num.erase(0, 1);
  if (den[0] == '+') den.erase(0, 1);
  Rational q{mpz_class(num), mpz_class(den)};
  if (q.get_den() == 0) throw InvalidArgument("zero denominator in '" + std::string(text) + "'");
  q.canonicalize();
  return q;
}

std::string format_rational(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

bool is_perfect_square(const Rational& q) {
  return is_perfect_square(q.get_num()) && is_perfect_square(q.get_den());
}

Rational exact_sqrt(const Rational& q) {
  if (!is_perfect_square(q)) throw InvalidArgument("not a perfect square: " + format_rational(q));
  return Rational(sqrt(q.get_num()), sqrt(q.get_den()));
}

std::pair<Rational, Rational> sqrt_bounds(const Rational& q, long bits) {
  if (sgn(q) < 0) throw InvalidArgument("sqrt of negative rational");
  if (is_perfect_square(q)) {
    Rational r = exact_sqrt(q);
    return {r, r};
  }
  Mpfr lo(bits), hi(bits);
  mpfr_set_q(lo.get(), q.get_mpq_t(), MPFR_RNDD);
  mpfr_sqrt(lo.get(), lo.get(), MPFR_RNDD);
  mpfr_set_q(hi.get(), q.get_mpq_t(), MPFR_RNDU);
  mpfr_sqrt(hi.get(), hi.get(), MPFR_RNDU);
  return {to_rational(lo), to_rational(hi)};
}

Rational pow(const Rational& base, unsigned exponent) {
  Rational result = 1;
  Rational b = base;
  while (exponent != 0) {
    if ((exponent & 1U) != 0) result *= b;
    exponent >>= 1U;
    if (exponent != 0) b *= b;
  }
  return result;
}

ExactReal::ExactReal(const Rational& q) { add_term(0, 1, q); }

ExactReal::ExactReal(long v) { add_term(0, 1, Rational(v)); }

ExactReal ExactReal::sqrt(const Rational& s) {
  if (sgn(s) < 0) throw InvalidArgument("sqrt of negative rational");
  ExactReal r;
  r.add_term(0, s, 1);
  return r;
}

ExactReal ExactReal::pi_power(int k) {
  ExactReal r;
  r.add_term(k, 1, 1);
  return r;
}

ExactReal ExactReal::term(const Rational& coeff, int pi_power, const Rational& radicand) {
  if (sgn(radicand) < 0) throw InvalidArgument("negative radicand");
  ExactReal r;
  r.add_term(pi_power, radicand, coeff);
  return r;
}

void ExactReal::add_term(int pi_power, Rational radicand, Rational coeff) {
  if (sgn(coeff) == 0 || sgn(radicand) == 0) return;
  if (radicand != 1 && is_perfect_square(radicand)) {
    coeff *= exact_sqrt(radicand);
    radicand = 1;
  }
  for (auto it = terms_.begin(); it != terms_.end(); ++it) {
    if (it->pi_power != pi_power) continue;
    if (it->radicand == radicand) {
      it->coeff += coeff;
    } else {
      Rational ratio = radicand / it->radicand;
      if (!is_perfect_square(ratio)) continue;
      it->coeff += coeff * exact_sqrt(ratio);
    }
    if (sgn(it->coeff) == 0) terms_.erase(it);
    return;
  }
  terms_.push_back(Term{pi_power, std::move(radicand), std::move(coeff)});
}

std::optional<Rational> ExactReal::as_rational() const {
  if (terms_.empty()) return Rational(0);
  if (terms_.size() == 1 && terms_[0].pi_power == 0 && terms_[0].radicand == 1) return terms_[0].coeff;
  return std::nullopt;
}

std::optional<Rational> ExactReal::exact_square() const {
  if (terms_.empty()) return Rational(0);
  if (terms_.size() != 1 || terms_[0].pi_power != 0) return std::nullopt;
  const auto& t = terms_[0];
  return Rational(t.coeff * t.coeff * t.radicand);
}

int ExactReal::sign() const {
  if (terms_.empty()) return 0;
  const int first = sgn(terms_[0].coeff);
  if (std::all_of(terms_.begin(), terms_.end(), [&](const Term& t) { return sgn(t.coeff) == first; })) {
    return first;
  }
  const bool pi_free = std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.pi_power == 0; });
  if (pi_free && terms_.size() <= 3) {
    Rational rational = 0;
    std::vector<const Term*> radicals;
    for (const auto& t : terms_) {
      if (t.radicand == 1) {
        rational = t.coeff;
      } else {
        radicals.push_back(&t);
      }
    }
    if (radicals.size() == 1) {
      return sign_one_radical(rational, radicals[0]->coeff, radicals[0]->radicand);
    }
    if (radicals.size() == 2) {
      // alpha + X with X = b*sqrt(u) + g*sqrt(v); X^2 = b^2 u + g^2 v + 2 b g sqrt(uv).
      const Term& a = *radicals[0];
      const Term& b = *radicals[1];
      int sx = sgn(a.coeff);
      if (sgn(b.coeff) != sx) {
        const Rational lhs = a.coeff * a.coeff * a.radicand;
        const Rational rhs = b.coeff * b.coeff * b.radicand;
        if (cmp(lhs, rhs) < 0) sx = sgn(b.coeff);
      }
      const int sa = sgn(rational);
      if (sa == 0 || sa == sx) return sx;
      ExactReal diff = ExactReal(Rational(a.coeff * a.coeff * a.radicand + b.coeff * b.coeff * b.radicand -
                                          rational * rational)) +
                       ExactReal::term(2 * a.coeff * b.coeff, 0, a.radicand * b.radicand);
      return diff.sign() > 0 ? sx : sa;
    }
  }
  return refine_sign();
}

int ExactReal::refine_sign() const {
  for (long bits = 128; bits <= (1L << 20); bits *= 2) {
    Mpfr lo(bits), hi(bits);
    bracket_mpfr(terms_, lo, hi, bits);
    if (mpfr_sgn(lo.get()) > 0) return 1;
    if (mpfr_sgn(hi.get()) < 0) return -1;
  }
  throw Error("sign refinement did not terminate for " + to_string());
}

ExactReal ExactReal::operator-() const {
  ExactReal r = *this;
  for (auto& t : r.terms_) t.coeff = -t.coeff;
  return r;
}

ExactReal& ExactReal::operator+=(const ExactReal& other) {
  for (const auto& t : other.terms_) add_term(t.pi_power, t.radicand, t.coeff);
  return *this;
}

ExactReal& ExactReal::operator-=(const ExactReal& other) {
  for (const auto& t : other.terms_) add_term(t.pi_power, t.radicand, -t.coeff);
  return *this;
}

ExactReal& ExactReal::operator*=(const ExactReal& other) {
  ExactReal product;
  for (const auto& a : terms_) {
    for (const auto& b : other.terms_) {
      if (a.radicand == b.radicand) {
        product.add_term(a.pi_power + b.pi_power, 1, a.coeff * b.coeff * a.radicand);
      } else {
        product.add_term(a.pi_power + b.pi_power, a.radicand * b.radicand, a.coeff * b.coeff);
      }
    }
  }
  *this = std::move(product);
  return *this;
}

ExactReal& ExactReal::operator*=(const Rational& q) {
  if (sgn(q) == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.coeff *= q;
  return *this;
}

ExactReal& ExactReal::operator/=(const Rational& q) {
  if (sgn(q) == 0) throw InvalidArgument("division by zero");
  for (auto& t : terms_) t.coeff /= q;
  return *this;
}

ExactReal ExactReal::pow(unsigned n) const {
  ExactReal result = 1;
  ExactReal base = *this;
  while (n != 0) {
    if ((n & 1U) != 0) result *= base;
    n >>= 1U;
    if (n != 0) base *= base;
  }
  return result;
}

ExactReal ExactReal::inverse() const {
  if (terms_.size() != 1) throw InvalidArgument("inverse is only defined for single-term values");
  const auto& t = terms_[0];
  // 1 / (c pi^k sqrt(s)) = sqrt(s) / (c s) * pi^-k
  return ExactReal::term(Rational(1) / (t.coeff * t.radicand), -t.pi_power, t.radicand);
}

std::pair<Rational, Rational> ExactReal::bracket(long bits) const {
  if (auto q = as_rational()) return {*q, *q};
  Mpfr lo(bits), hi(bits);
  bracket_mpfr(terms_, lo, hi, bits);
  return {to_rational(lo), to_rational(hi)};
}

double ExactReal::to_double() const {
  if (auto q = as_rational()) {
    Mpfr x(64);
    mpfr_set_q(x.get(), q->get_mpq_t(), MPFR_RNDN);
    return mpfr_get_d(x.get(), MPFR_RNDN);
  }
  const long bits = 192;
  Mpfr lo(bits), hi(bits);
  bracket_mpfr(terms_, lo, hi, bits);
  mpfr_add(lo.get(), lo.get(), hi.get(), MPFR_RNDN);
  mpfr_div_2ui(lo.get(), lo.get(), 1, MPFR_RNDN);
  return mpfr_get_d(lo.get(), MPFR_RNDN);
}

std::string ExactReal::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& t : terms_) {
    if (!first) out << " + ";
    first = false;
    out << format_rational(t.coeff);
    if (t.pi_power != 0) out << "*pi^" << t.pi_power;
    if (t.radicand != 1) out << "*sqrt(" << format_rational(t.radicand) << ")";
  }
  return out.str();
}

std::strong_ordering operator<=>(const ExactReal& a, const ExactReal& b) {
  const int s = (a - b).sign();
  if (s < 0) return std::strong_ordering::less;
  if (s > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

ExactReal min(const ExactReal& a, const ExactReal& b) { return a <= b ? a : b; }
ExactReal max(const ExactReal& a, const ExactReal& b) { return a >= b ? a : b; }

}  // namespace dlab
