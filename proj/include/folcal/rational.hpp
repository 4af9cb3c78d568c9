#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>

namespace folcal {

/// Exact rational number with 64-bit numerator and denominator.
///
/// Always reduced, denominator positive, zero stored as 0/1. Intermediate
/// products use 128-bit integers; a result that does not fit back into 64 bits
/// throws std::overflow_error rather than wrapping.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);  // NOLINT(google-explicit-constructor)

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  int sign() const { return (num_ > 0) - (num_ < 0); }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// "p/q", or "p" when q == 1.
  std::string to_string() const;

  Rational operator-() const;
  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

  /// Exact square root when both parts are perfect squares.
  friend bool exact_sqrt(const Rational& r, Rational& out);

 private:
  static Rational from_wide(__int128 num, __int128 den);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace folcal

template <>
struct std::hash<folcal::Rational> {
  std::size_t operator()(const folcal::Rational& r) const noexcept {
    return std::hash<std::int64_t>{}(r.num()) * 31u + std::hash<std::int64_t>{}(r.den());
  }
};
