#pragma once

// Invariant forms on so(n) split as u(k) + v(n-k): curvature blocks, Euler
// (Pfaffian) forms, first Pontryagin forms, the Chern-Simons transgression of
// the U-block Euler form and the calibration candidate Te ^ e(Omega*).
//
// U-block indices are 1..k, V-block indices k+1..n. Everything is evaluated
// at the base point, so forms are polynomials in the Maurer-Cartan coframe.

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "folcal/exalg.hpp"

namespace folcal::charforms {

using exalg::FormExpr;

struct Split {
  int k = 1;  ///< rank of the U-block
  int n = 2;  ///< ambient rank

  Split() = default;
  /// Throws std::invalid_argument unless 1 <= k < n <= 16.
  Split(int k, int n);

  int v_rank() const { return n - k; }
  std::string label() const { return "(" + std::to_string(k) + "," + std::to_string(n) + ")"; }
  friend bool operator==(const Split&, const Split&) = default;
};

enum class Block { U, V };

/// PaperLiteral: 1/(2 pi) on rank-2 blocks and 1/(2 pi^2) on rank-4 blocks;
/// higher ranks fall back to the Pfaffian constant. Pfaffian: Pf(Omega / 2 pi).
enum class Normalization { PaperLiteral, Pfaffian };

std::string to_string(Block b);
std::string to_string(Normalization n);

/// Omega_ij = sum_{m in V} mu_im ^ mu_jm for i, j in the U-block, i != j.
FormExpr curvature_u(const Split& s, int i, int j);
/// Omega*_pq = sum_{i in U} mu_ip ^ mu_iq for p, q in the V-block, p != q.
FormExpr curvature_v(const Split& s, int p, int q);

/// Perfect matchings of `idx` with their Pfaffian signs, in expansion order
/// (first element paired with each later one, recursively).
void for_each_matching(const std::vector<int>& idx,
                       const std::function<void(int, const std::vector<std::pair<int, int>>&)>& f);

/// Numeric Pfaffian of an antisymmetric matrix via the matching expansion.
double pfaffian(const Eigen::MatrixXd& a);

/// sum_matchings sign * Omega_{a1 b1} ^ ... ^ Omega_{am bm}, no constant.
FormExpr pfaffian_sum(const Split& s, Block b);
/// Scalar multiplying pfaffian_sum in euler_form.
ScalarPi euler_constant(int block_rank, Normalization norm);
/// Throws std::invalid_argument for odd block rank.
FormExpr euler_form(const Split& s, Block b, Normalization norm = Normalization::PaperLiteral);

/// p1 = -(1/8 pi^2) tr(Omega ^ Omega), expanded literally as
/// -(1/8 pi^2) sum_{a != b} Omega_ab ^ Omega_ba over the block.
FormExpr pontryagin1(const Split& s, Block b);

/// Chern-Simons transgression of the U-block Euler form at the base point,
/// fixed by d(Te) = euler_form(U, PaperLiteral). U-rank 2: (1/2 pi) mu_12.
/// U-rank 4, with B = sum_k [mu12^mu3k^mu4k - mu13^mu2k^mu4k + mu14^mu2k^mu3k]:
///   (1/2 pi^2)(2 mu12^mu13^mu14 + B).
/// Throws std::domain_error for any other U-rank.
FormExpr transgression(const Split& s);

/// The rank-4 expansion exactly as printed, (1/2 pi^2)(mu12^mu13^mu14 + B).
/// Its cubic vertical term is half of what d(Te) = e(Omega) requires; kept
/// so the discrepancy stays auditable. Same rank support as transgression().
FormExpr transgression_printed(const Split& s);

struct Calibration {
  FormExpr form;                    ///< Te ^ e(Omega*) with C = 1
  std::optional<double> constant;   ///< comass constant C when known
};

Calibration calibration_phi(const Split& s, std::optional<double> comass_constant = std::nullopt);

enum class OrthogonalityMethod { Direct, SymmetryReduced };

struct OrthogonalityCheck {
  Split split;
  OrthogonalityMethod method = OrthogonalityMethod::Direct;
  bool exact = false;               ///< e(Omega) ^ e(Omega*) == 0 exactly
  std::size_t u_terms = 0;
  std::size_t v_terms = 0;
  std::size_t term_count_before = 0;  ///< monomial pairs formed
  std::size_t disjoint_products = 0;  ///< pairs without a repeated generator
  std::size_t term_count_after = 0;   ///< surviving canonical terms
  std::size_t orbit_representatives = 0;
};

/// e(Omega) ^ e(Omega*) for a split with both blocks of even rank.
/// Direct forms the whole product. SymmetryReduced uses that both factors are
/// invariant up to sign under index permutations within each block: every
/// product monomial lies in the orbit of one containing a fixed representative
/// of an orbit of U-factor monomials, and each such candidate's coefficient is
/// recomputed from all of its factorizations.
OrthogonalityCheck euler_orthogonality(const Split& s, OrthogonalityMethod method);

namespace detail {

using CoefMap = std::unordered_map<exalg::Monomial, Rational, exalg::MonomialHash>;

CoefMap coefficient_map(const FormExpr& f);

/// One monomial per orbit of a U-transversal form's support under
/// S_U x S_V (classified by sorted fiber sizes of the underlying map U -> V).
/// Throws std::logic_error if some monomial is not the graph of a map U -> V.
std::vector<exalg::Monomial> orbit_representatives(const FormExpr& u_form, const Split& s);

/// Coefficient of `product` in A ^ B where A is U-transversal and B is
/// V-transversal, summing over all factorizations.
Rational transversal_coefficient(exalg::Monomial product, const Split& s, const CoefMap& a, const CoefMap& b);

/// True iff every adjacent transposition inside each block maps f to +-f.
bool block_permutation_covariant(const FormExpr& f, const Split& s);

}  // namespace detail

}  // namespace folcal::charforms
