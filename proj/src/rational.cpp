#include "batchswap/rational.hpp"

#include <algorithm>
#include <cctype>

namespace batchswap {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

mpz_class parse_integer(std::string_view s, std::string_view whole) {
  std::string_view digits = s;
  if (!digits.empty() && (digits.front() == '-' || digits.front() == '+')) digits.remove_prefix(1);
  if (!all_digits(digits)) {
    throw std::invalid_argument("not a rational number: \"" + std::string(whole) + "\"");
  }
  return mpz_class(std::string(s.front() == '+' ? s.substr(1) : s));
}

// Smallest k >= 0 with 2^-k <= eps.
unsigned long bits_for(const Rational& eps) {
  if (eps >= Rational(1)) return 0;
  // 1/eps = den/num; start from a size-based estimate and walk up.
  const long den_bits = static_cast<long>(mpz_sizeinbase(eps.denominator().get_mpz_t(), 2));
  const long num_bits = static_cast<long>(mpz_sizeinbase(eps.numerator().get_mpz_t(), 2));
  long k = std::max(0L, den_bits - num_bits - 1);
  while (Rational::pow2(-k) > eps) ++k;
  return static_cast<unsigned long>(k);
}

// floor(sqrt(q * 4^k)) for q >= 0.
mpz_class scaled_isqrt(const Rational& q, unsigned long k) {
  mpz_class scaled = q.numerator();
  mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), 2 * k);
  mpz_fdiv_q(scaled.get_mpz_t(), scaled.get_mpz_t(), q.denominator().get_mpz_t());
  mpz_class root;
  mpz_sqrt(root.get_mpz_t(), scaled.get_mpz_t());
  return root;
}

bool exact_sqrt(const Rational& q, Rational& out) {
  const mpz_class num = q.numerator();
  const mpz_class den = q.denominator();
  if (mpz_perfect_square_p(num.get_mpz_t()) == 0 || mpz_perfect_square_p(den.get_mpz_t()) == 0) return false;
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
  out = Rational(mpq_class(rn, rd));
  return true;
}

void check_sqrt_args(const Rational& q, const Rational& eps) {
  if (q.sign() < 0) throw DomainError("square root of negative rational " + q.str());
  if (eps.sign() <= 0) throw DomainError("square root tolerance must be positive, got " + eps.str());
}

}  // namespace

Rational::Rational(long num, long den) {
  if (den == 0) throw DomainError("zero denominator");
  value_ = mpq_class(num, den);
  value_.canonicalize();
}

Rational Rational::parse(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) throw std::invalid_argument("empty rational literal");

  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    const mpz_class num = parse_integer(s.substr(0, slash), text);
    const std::string_view den_text = s.substr(slash + 1);
    if (!all_digits(den_text)) throw std::invalid_argument("bad denominator in \"" + std::string(text) + "\"");
    const mpz_class den(std::string{den_text});
    if (den == 0) throw std::invalid_argument("zero denominator in \"" + std::string(text) + "\"");
    return Rational(mpq_class(num, den));
  }

  if (const auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = s.substr(0, dot);
    const std::string_view frac_part = s.substr(dot + 1);
    bool negative = false;
    if (!int_part.empty() && (int_part.front() == '-' || int_part.front() == '+')) {
      negative = int_part.front() == '-';
      int_part.remove_prefix(1);
    }
    if ((!int_part.empty() && !all_digits(int_part)) || !all_digits(frac_part)) {
      throw std::invalid_argument("not a rational number: \"" + std::string(text) + "\"");
    }
    mpz_class den = 1;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_part.size());
    const mpz_class whole = int_part.empty() ? mpz_class(0) : mpz_class(std::string{int_part});
    mpz_class num = whole * den + mpz_class(std::string{frac_part});
    if (negative) num = -num;
    return Rational(mpq_class(num, den));
  }

  return Rational(mpq_class(parse_integer(s, text)));
}

Rational Rational::pow2(long exponent) {
  mpz_class p = 1;
  mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(exponent < 0 ? -exponent : exponent));
  return exponent < 0 ? Rational(mpq_class(mpz_class(1), p)) : Rational(mpq_class(p));
}

Rational Rational::reciprocal() const {
  if (is_zero()) throw DomainError("reciprocal of zero");
  return Rational(mpq_class(value_.get_den(), value_.get_num()));
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw DomainError("division by zero");
  value_ /= o.value_;
  return *this;
}

std::string Rational::decimal(int digits) const {
  mpz_class scale = 1;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  mpz_class scaled = value_.get_num() * scale;
  mpz_tdiv_q(scaled.get_mpz_t(), scaled.get_mpz_t(), value_.get_den().get_mpz_t());
  const bool negative = sgn(scaled) < 0 || (sgn(scaled) == 0 && sign() < 0);
  std::string body = mpz_class(::abs(scaled)).get_str();
  if (digits == 0) return (negative ? "-" : "") + body;
  if (body.size() <= static_cast<std::size_t>(digits)) {
    body.insert(0, static_cast<std::size_t>(digits) + 1 - body.size(), '0');
  }
  body.insert(body.size() - static_cast<std::size_t>(digits), ".");
  return (negative ? "-" : "") + body;
}

Rational default_sqrt_eps() { return Rational::pow2(-64); }

Rational sqrt_lower(const Rational& q, const Rational& eps) {
  check_sqrt_args(q, eps);
  if (q.is_zero()) return Rational(0);
  Rational exact;
  if (exact_sqrt(q, exact)) return exact;
  const unsigned long k = bits_for(eps);
  return Rational(mpq_class(scaled_isqrt(q, k))) * Rational::pow2(-static_cast<long>(k));
}

Rational sqrt_upper(const Rational& q, const Rational& eps) {
  check_sqrt_args(q, eps);
  if (q.is_zero()) return Rational(0);
  Rational exact;
  if (exact_sqrt(q, exact)) return exact;
  // Not a rational square, so floor(sqrt(q 4^k)) + 1 strictly exceeds the scaled root.
  const unsigned long k = bits_for(eps);
  return Rational(mpq_class(scaled_isqrt(q, k) + 1)) * Rational::pow2(-static_cast<long>(k));
}

}  // namespace batchswap
