#include "folcal/scalar.hpp"

#include <cmath>
#include <numbers>

namespace folcal {

double ScalarPi::to_double() const { return coef.to_double() * std::pow(std::numbers::pi, pi_exp); }

std::string ScalarPi::to_string() const {
  if (coef.is_zero() || pi_exp == 0) return coef.to_string();
  return coef.to_string() + " * pi^" + std::to_string(pi_exp);
}

PiScalar::PiScalar(const ScalarPi& s) {
  if (!s.is_zero()) grades_.emplace_back(s.pi_exp, s.coef);
}

std::optional<ScalarPi> PiScalar::single() const {
  if (grades_.empty()) return ScalarPi{};
  if (grades_.size() == 1) return ScalarPi{grades_.front().second, grades_.front().first};
  return std::nullopt;
}

Rational PiScalar::grade(int pi_exp) const {
  for (const auto& [e, r] : grades_)
    if (e == pi_exp) return r;
  return Rational{};
}

double PiScalar::to_double() const {
  double s = 0.0;
  for (const auto& [e, r] : grades_) s += r.to_double() * std::pow(std::numbers::pi, e);
  return s;
}

std::string PiScalar::to_string() const {
  if (grades_.empty()) return "0";
  if (grades_.size() == 1) return ScalarPi{grades_.front().second, grades_.front().first}.to_string();
  std::string out = "(";
  for (std::size_t g = 0; g < grades_.size(); ++g) {
    if (g) out += " + ";
    out += ScalarPi{grades_[g].second, grades_[g].first}.to_string();
  }
  return out + ")";
}

PiScalar PiScalar::operator-() const {
  PiScalar r = *this;
  for (auto& g : r.grades_) g.second = -g.second;
  return r;
}

PiScalar& PiScalar::operator+=(const PiScalar& o) {
  std::vector<Grade> merged;
  merged.reserve(grades_.size() + o.grades_.size());
  std::size_t a = 0;
  std::size_t b = 0;
  while (a < grades_.size() || b < o.grades_.size()) {
    if (b == o.grades_.size() || (a < grades_.size() && grades_[a].first < o.grades_[b].first)) {
      merged.push_back(grades_[a++]);
    } else if (a == grades_.size() || o.grades_[b].first < grades_[a].first) {
      merged.push_back(o.grades_[b++]);
    } else {
      Rational s = grades_[a].second + o.grades_[b].second;
      if (!s.is_zero()) merged.emplace_back(grades_[a].first, s);
      ++a;
      ++b;
    }
  }
  grades_ = std::move(merged);
  return *this;
}

PiScalar operator*(const PiScalar& a, const PiScalar& b) {
  PiScalar out;
  for (const auto& [ea, ra] : a.grades_)
    for (const auto& [eb, rb] : b.grades_) out += PiScalar(ScalarPi{ra * rb, ea + eb});
  return out;
}

}  // namespace folcal
