#pragma once

// Sparse exact exterior algebra over the coframe {mu_ij : 1 <= i < j <= n} of
// so(n), with the Chevalley-Eilenberg differential and evaluation against the
// dual basis {E_ij}.
//
// Structure equation (the single place the sign convention lives):
//
//     d mu_ij = - sum_k mu_ik ^ mu_kj,       mu_ji = -mu_ij.
//
// With it, d mu_12 on so(4) is mu_13^mu_23 + mu_14^mu_24, and the curvature
// blocks Omega_ij = sum_m mu_im ^ mu_jm come out with a plus sign.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <string>
#include <utility>
#include <vector>

#include "folcal/scalar.hpp"

namespace folcal::exalg {

/// Largest supported ambient rank: n(n-1)/2 generators must fit in 128 bits.
inline constexpr int kMaxRank = 16;

/// Canonical generator mu_ij, i < j, of so(n).
struct GenIndex {
  int i = 1;
  int j = 2;
  int n = 2;

  /// Position in the lexicographic order on (i, j).
  int position() const;
  static GenIndex from_position(int n, int pos);
  friend bool operator==(const GenIndex&, const GenIndex&) = default;
};

/// Canonicalize the ordered pair (a, b): returns (sign, index) with sign = -1
/// when a > b and sign = 0 when a == b (index unspecified in that case).
std::pair<int, GenIndex> make_gen(int n, int a, int b);

int generator_count(int n);

/// A set of generators (a canonical exterior monomial) as a 128-bit mask.
class Monomial {
 public:
  constexpr Monomial() = default;
  constexpr Monomial(std::uint64_t lo, std::uint64_t hi) : lo_(lo), hi_(hi) {}
  static Monomial single(int pos);

  bool test(int pos) const { return pos < 64 ? (lo_ >> pos) & 1u : (hi_ >> (pos - 64)) & 1u; }
  int degree() const { return std::popcount(lo_) + std::popcount(hi_); }
  bool empty() const { return (lo_ | hi_) == 0; }
  bool disjoint(Monomial o) const { return ((lo_ & o.lo_) | (hi_ & o.hi_)) == 0; }
  /// Number of set positions strictly greater than pos.
  int count_above(int pos) const;
  std::vector<int> positions() const;
  std::vector<GenIndex> generators(int n) const;

  std::uint64_t lo() const { return lo_; }
  std::uint64_t hi() const { return hi_; }

  Monomial operator|(Monomial o) const { return {lo_ | o.lo_, hi_ | o.hi_}; }
  Monomial operator&(Monomial o) const { return {lo_ & o.lo_, hi_ & o.hi_}; }
  Monomial operator^(Monomial o) const { return {lo_ ^ o.lo_, hi_ ^ o.hi_}; }
  friend bool operator==(const Monomial&, const Monomial&) = default;

  template <class F>
  void for_each(F&& f) const {
    for (std::uint64_t w = lo_; w; w &= w - 1) f(std::countr_zero(w));
    for (std::uint64_t w = hi_; w; w &= w - 1) f(64 + std::countr_zero(w));
  }

 private:
  std::uint64_t lo_ = 0;
  std::uint64_t hi_ = 0;
};

/// Degree first, then lexicographic on the increasing generator lists.
struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept {
    std::uint64_t h = m.lo() * 0x9E3779B97F4A7C15ull ^ (m.hi() + 0x632BE59BD9B4E019ull + (m.lo() << 6));
    h ^= h >> 31;
    h *= 0xBF58476D1CE4E5B9ull;
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

/// Sign of a ^ b relative to the canonical order of a | b; 0 if they overlap.
int wedge_sign(Monomial a, Monomial b);

/// Canonicalize a wedge word of raw (i, j) pairs. Returns (sign, monomial),
/// sign = 0 iff a generator repeats or some pair has i == j.
/// Throws std::out_of_range for indices outside 1..n.
std::pair<int, Monomial> normalize_monomial(int n, std::span<const std::pair<int, int>> word);

struct WedgeStats {
  std::size_t pairs = 0;         ///< monomial pairs considered
  std::size_t raw_products = 0;  ///< pairs with disjoint support
  std::size_t terms_after = 0;   ///< canonical terms in the result
};

/// Sparse exterior polynomial with exact multi-grade coefficients.
///
/// Stored grade-major: for every power of pi a sorted list of
/// (monomial, rational) pairs with no zero entries. Immutable in practice;
/// all operations return new values.
class FormExpr {
 public:
  using Terms = std::vector<std::pair<Monomial, Rational>>;

  explicit FormExpr(int rank);

  static FormExpr generator(int rank, int a, int b);
  static FormExpr constant(int rank, const ScalarPi& c);
  static FormExpr from_word(int rank, std::span<const std::pair<int, int>> word, const ScalarPi& c = {Rational(1)});
  static FormExpr from_terms(int rank, int pi_exp, Terms terms);

  int rank() const { return rank_; }
  bool is_zero() const { return grades_.empty(); }
  /// Common degree of all terms; nullopt for the zero form or mixed degrees.
  std::optional<int> degree() const;
  /// Number of distinct monomials with a nonzero coefficient.
  std::size_t term_count() const;
  std::map<Monomial, PiScalar, MonomialLess> terms() const;
  PiScalar coefficient(Monomial m) const;
  const std::map<int, Terms>& grades() const { return grades_; }

  FormExpr operator-() const;
  FormExpr& operator+=(const FormExpr& o);
  FormExpr& operator-=(const FormExpr& o);
  friend FormExpr operator+(FormExpr a, const FormExpr& b) { return a += b; }
  friend FormExpr operator-(FormExpr a, const FormExpr& b) { return a -= b; }
  friend FormExpr operator*(const ScalarPi& s, const FormExpr& f);
  friend bool operator==(const FormExpr&, const FormExpr&) = default;

  /// One term per line: `coef * mu[i,j]^mu[k,l]...`, coef as `p/q * pi^e`.
  std::string to_string() const;

 private:
  int rank_;
  std::map<int, Terms> grades_;
};

FormExpr wedge(const FormExpr& a, const FormExpr& b, WedgeStats* stats = nullptr);
FormExpr ce_differential(const FormExpr& a);
bool is_zero(const FormExpr& a);

/// Relabel indices: mu_ij -> mu_{perm[i] perm[j]} (perm is 1-based, perm[0] unused).
FormExpr permute_indices(const FormExpr& a, std::span<const int> perm);

/// Infinitesimal rotation in the (a, b) coordinate plane acting on all
/// indices as a derivation; zero iff the form is invariant under that
/// one-parameter subgroup of the adjoint action.
FormExpr rotation_derivation(const FormExpr& f, int a, int b);

/// Linear combination of dual basis vectors E_ij.
class DualVector {
 public:
  explicit DualVector(int rank) : rank_(rank) {}
  /// E_ab with sign transport (E_ba = -E_ab).
  static DualVector basis(int rank, int a, int b);

  int rank() const { return rank_; }
  void add(int a, int b, const Rational& c);
  Rational component(int pos) const;
  const std::map<int, Rational>& components() const { return comp_; }

 private:
  int rank_;
  std::map<int, Rational> comp_;
};

/// Alternating pairing <a, (v_1..v_p)> = sum over monomials of coef * det[<mu_r, v_s>].
/// Throws std::invalid_argument on arity mismatch or a non-homogeneous form.
PiScalar evaluate(const FormExpr& a, std::span<const DualVector> vectors);

/// Accumulate monomial products into canonical sorted terms.
class TermAccumulator {
 public:
  void reserve(std::size_t n) { map_.reserve(n); }
  void add(Monomial m, const Rational& c);
  std::size_t size() const { return map_.size(); }
  FormExpr::Terms finish();

 private:
  std::unordered_map<Monomial, Rational, MonomialHash> map_;
};

}  // namespace folcal::exalg
