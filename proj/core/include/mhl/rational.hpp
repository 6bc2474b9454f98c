#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mhl {

/// Exact rational arithmetic on 64-bit numerator / positive denominator.
/// Every value is kept in lowest terms, every operation is exact, and an
/// operation whose result does not fit in 64 bits throws std::overflow_error.
/// Equality and ordering are therefore exact tests, never epsilon compares.
class Rational {
 public:
  constexpr Rational() = default;

  Rational(std::int64_t numerator, std::int64_t denominator = 1) {
    if (denominator == 0) throw std::invalid_argument("Rational: zero denominator");
    if (denominator < 0) {
      numerator = checked_negate(numerator);
      denominator = checked_negate(denominator);
    }
    const std::int64_t g = std::gcd(numerator, denominator);
    num_ = g ? numerator / g : 0;
    den_ = g ? denominator / g : 1;
  }

  /// Parses "a", "a/b", or a finite decimal such as "1.25" (which is exactly
  /// representable as a fraction). Anything else is rejected.
  static Rational parse(const std::string& text);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }

  Rational reciprocal() const {
    if (num_ == 0) throw std::domain_error("Rational: reciprocal of zero");
    return Rational(den_, num_);
  }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  std::string str() const {
    return den_ == 1 ? std::to_string(num_)
                     : std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return from_i128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                     i128(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return from_i128(i128(a.num_) * b.den_ - i128(b.num_) * a.den_,
                     i128(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_i128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
    return from_i128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }
  Rational operator-() const { return Rational(checked_negate(num_), den_); }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

 private:
  using i128 = __int128;

  static std::int64_t checked_negate(std::int64_t v) {
    if (v == INT64_MIN) throw std::overflow_error("Rational: negate overflow");
    return -v;
  }

  static Rational from_i128(i128 num, i128 den) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    if (den < 0) { num = -num; den = -den; }
    const i128 g = gcd_i128(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
    if (num > INT64_MAX || num < INT64_MIN || den > INT64_MAX)
      throw std::overflow_error("Rational: 64-bit overflow");
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
  }

  static i128 gcd_i128(i128 a, i128 b) {
    while (b != 0) { const i128 t = a % b; a = b; b = t; }
    return a < 0 ? -a : a;
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace mhl
