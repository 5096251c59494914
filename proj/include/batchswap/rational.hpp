#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace batchswap {

/// Raised for arguments outside an operation's mathematical domain
/// (negative square roots, zero denominators, drained pools).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Exact arbitrary-precision rational. Always canonical: positive denominator,
/// lowest terms. Thin value wrapper over GMP's mpq_class.
class Rational {
 public:
  Rational() = default;
  Rational(long v) : value_(v) {}  // NOLINT(google-explicit-constructor)
  Rational(int v) : value_(v) {}   // NOLINT(google-explicit-constructor)
  Rational(long num, long den);
  explicit Rational(mpq_class v) : value_(std::move(v)) { value_.canonicalize(); }

  /// Accepts "p", "-p", "p/q" and finite decimals such as "12.375" or "-0.5".
  static Rational parse(std::string_view text);

  /// Exact power of two, 2^exponent (exponent may be negative).
  static Rational pow2(long exponent);

  const mpq_class& raw() const { return value_; }
  mpz_class numerator() const { return value_.get_num(); }
  mpz_class denominator() const { return value_.get_den(); }

  int sign() const { return sgn(value_); }
  bool is_zero() const { return sgn(value_) == 0; }
  bool is_integer() const { return value_.get_den() == 1; }

  Rational abs() const { return Rational(::abs(value_)); }
  Rational reciprocal() const;

  /// "p" for integers, "p/q" otherwise.
  std::string str() const { return value_.get_str(); }
  /// Display-only decimal rendering truncated toward zero to `digits` places.
  std::string decimal(int digits = 12) const;
  double to_double() const { return value_.get_d(); }

  Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
  Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
  Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.value_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.value_, b.value_) == 0; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  mpq_class value_;
};

inline const Rational& min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline const Rational& max(const Rational& a, const Rational& b) { return a < b ? b : a; }

/// 2^-64, the default square-root tolerance.
Rational default_sqrt_eps();

/// Largest-ish rational s with s <= sqrt(q) and sqrt(q) - s <= eps.
/// Exact whenever q is the square of a rational.
Rational sqrt_lower(const Rational& q, const Rational& eps);

/// Rational s with s >= sqrt(q) and s - sqrt(q) <= eps. Exact on perfect squares.
Rational sqrt_upper(const Rational& q, const Rational& eps);

}  // namespace batchswap

template <>
struct std::hash<batchswap::Rational> {
  std::size_t operator()(const batchswap::Rational& r) const noexcept {
    return std::hash<std::string>{}(r.str());
  }
};
