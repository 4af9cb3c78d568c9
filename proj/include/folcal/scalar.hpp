#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "folcal/rational.hpp"

namespace folcal {

/// A single-grade exact scalar: coef * pi^pi_exp.
struct ScalarPi {
  Rational coef;
  int pi_exp = 0;

  ScalarPi() = default;
  ScalarPi(Rational c, int e = 0) : coef(c), pi_exp(c.is_zero() ? 0 : e) {}  // NOLINT

  bool is_zero() const { return coef.is_zero(); }
  double to_double() const;
  std::string to_string() const;

  friend ScalarPi operator*(const ScalarPi& a, const ScalarPi& b) {
    return {a.coef * b.coef, a.pi_exp + b.pi_exp};
  }
  friend bool operator==(const ScalarPi&, const ScalarPi&) = default;
};

/// A formal sum of rational multiples of distinct powers of pi.
///
/// Grades are kept sorted by exponent with no zero entries, so equality is
/// structural: 3/(2 pi^2) compares equal only to exactly that grade.
class PiScalar {
 public:
  using Grade = std::pair<int, Rational>;

  PiScalar() = default;
  PiScalar(const ScalarPi& s);  // NOLINT(google-explicit-constructor)
  PiScalar(Rational r) : PiScalar(ScalarPi{r, 0}) {}  // NOLINT(google-explicit-constructor)

  const std::vector<Grade>& grades() const { return grades_; }
  bool is_zero() const { return grades_.empty(); }
  /// The value as a ScalarPi when at most one grade is present.
  std::optional<ScalarPi> single() const;
  Rational grade(int pi_exp) const;

  double to_double() const;
  std::string to_string() const;

  PiScalar operator-() const;
  PiScalar& operator+=(const PiScalar& o);
  PiScalar& operator-=(const PiScalar& o) { return *this += -o; }
  friend PiScalar operator+(PiScalar a, const PiScalar& b) { return a += b; }
  friend PiScalar operator-(PiScalar a, const PiScalar& b) { return a -= b; }
  friend PiScalar operator*(const PiScalar& a, const PiScalar& b);
  friend bool operator==(const PiScalar&, const PiScalar&) = default;

 private:
  std::vector<Grade> grades_;
};

}  // namespace folcal
