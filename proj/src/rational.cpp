#include "folcal/rational.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace folcal {

namespace {

using wide = __int128;

wide wide_abs(wide v) { return v < 0 ? -v : v; }

wide wide_gcd(wide a, wide b) {
  a = wide_abs(a);
  b = wide_abs(b);
  while (b != 0) {
    wide t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool fits(wide v) {
  return v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max();
}

bool isqrt_exact(std::int64_t v, std::int64_t& out) {
  if (v < 0) return false;
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<long double>(v)));
  for (std::int64_t c = (r > 2 ? r - 2 : 0); c <= r + 2; ++c) {
    if (static_cast<wide>(c) * c == v) {
      out = c;
      return true;
    }
  }
  return false;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::domain_error("Rational: zero denominator");
  *this = from_wide(num, den);
}

Rational Rational::from_wide(wide num, wide den) {
  if (den == 0) throw std::domain_error("Rational: zero denominator");
  if (num == 0) return Rational{};
  if (den < 0) {
    num = -num;
    den = -den;
  }
  wide g = wide_gcd(num, den);
  num /= g;
  den /= g;
  if (!fits(num) || !fits(den)) throw std::overflow_error("Rational: 64-bit overflow");
  Rational r;
  r.num_ = static_cast<std::int64_t>(num);
  r.den_ = static_cast<std::int64_t>(den);
  return r;
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::operator-() const { return from_wide(-static_cast<wide>(num_), den_); }

Rational& Rational::operator+=(const Rational& o) {
  if (o.num_ == 0) return *this;
  if (num_ == 0) return *this = o;
  if (den_ == o.den_) return *this = from_wide(static_cast<wide>(num_) + o.num_, den_);
  *this = from_wide(static_cast<wide>(num_) * o.den_ + static_cast<wide>(o.num_) * den_,
                    static_cast<wide>(den_) * o.den_);
  return *this;
}

Rational& Rational::operator-=(const Rational& o) { return *this += -o; }

Rational& Rational::operator*=(const Rational& o) {
  if (num_ == 0 || o.num_ == 0) return *this = Rational{};
  *this = from_wide(static_cast<wide>(num_) * o.num_, static_cast<wide>(den_) * o.den_);
  return *this;
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.num_ == 0) throw std::domain_error("Rational: division by zero");
  *this = from_wide(static_cast<wide>(num_) * o.den_, static_cast<wide>(den_) * o.num_);
  return *this;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  wide lhs = static_cast<wide>(a.num_) * b.den_;
  wide rhs = static_cast<wide>(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

bool exact_sqrt(const Rational& r, Rational& out) {
  std::int64_t n = 0;
  std::int64_t d = 0;
  if (!isqrt_exact(r.num_, n) || !isqrt_exact(r.den_, d)) return false;
  out = Rational(n, d);
  return true;
}

}  // namespace folcal
