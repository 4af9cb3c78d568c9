#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "folcal/charforms.hpp"

using namespace folcal;
using namespace folcal::exalg;
using namespace folcal::charforms;

namespace {
using Word = std::vector<std::pair<int, int>>;
const ScalarPi kOne{Rational(1)};
}  // namespace

TEST_CASE("split validation") {
  CHECK_THROWS_AS(Split(0, 4), std::invalid_argument);
  CHECK_THROWS_AS(Split(4, 4), std::invalid_argument);
  CHECK_THROWS_AS(Split(2, 17), std::invalid_argument);
  CHECK(Split(4, 8).v_rank() == 4);
  CHECK(Split(4, 8).label() == "(4,8)");
}

TEST_CASE("curvature blocks") {
  Split s(4, 8);
  auto o12 = curvature_u(s, 1, 2);
  CHECK(o12.term_count() == 4);
  FormExpr expect(8);
  for (int m = 5; m <= 8; ++m) expect += FormExpr::from_word(8, Word{{1, m}, {2, m}});
  CHECK(o12 == expect);
  CHECK(is_zero(curvature_u(s, 1, 2) + curvature_u(s, 2, 1)));
  CHECK(curvature_v(s, 6, 5) == -curvature_v(s, 5, 6));
  CHECK(curvature_v(s, 5, 6).term_count() == 4);
  CHECK_THROWS_AS(curvature_u(s, 1, 5), std::out_of_range);
  CHECK_THROWS_AS(curvature_v(s, 1, 5), std::out_of_range);
  CHECK_THROWS_AS(curvature_u(s, 2, 2), std::invalid_argument);

  Split t(2, 4);
  FormExpr v34 = FormExpr::from_word(4, Word{{1, 3}, {1, 4}}) + FormExpr::from_word(4, Word{{2, 3}, {2, 4}});
  CHECK(curvature_v(t, 3, 4) == v34);
  Split u(2, 6);
  FormExpr u12(6);
  for (int m = 3; m <= 6; ++m) u12 += FormExpr::from_word(6, Word{{1, m}, {2, m}});
  CHECK(curvature_u(u, 1, 2) == u12);
}

TEST_CASE("Euler forms match the printed expansions") {
  Split s2(2, 6);
  CHECK(euler_form(s2, Block::U) == ScalarPi{Rational(1, 2), -1} * curvature_u(s2, 1, 2));
  Split s(4, 8);
  auto V = [&](int p, int q) { return curvature_v(s, p, q); };
  FormExpr printed = wedge(V(5, 6), V(7, 8)) - wedge(V(5, 7), V(6, 8)) + wedge(V(5, 8), V(6, 7));
  CHECK(euler_form(s, Block::V) == ScalarPi{Rational(1, 2), -2} * printed);
  CHECK(euler_form(s, Block::V, Normalization::Pfaffian) == ScalarPi{Rational(1, 4), -2} * printed);
  CHECK_THROWS_AS(euler_form(Split(3, 8), Block::U), std::invalid_argument);
}

TEST_CASE("normalizations differ by a positive scalar") {
  for (auto s : {Split(2, 4), Split(4, 8), Split(2, 8), Split(6, 10)}) {
    for (auto b : {Block::U, Block::V}) {
      const int r = b == Block::U ? s.k : s.v_rank();
      if (r % 2) continue;
      auto lit = euler_form(s, b, Normalization::PaperLiteral);
      auto pf = euler_form(s, b, Normalization::Pfaffian);
      auto cl = euler_constant(r, Normalization::PaperLiteral);
      auto cp = euler_constant(r, Normalization::Pfaffian);
      CHECK(cl.coef.sign() > 0);
      CHECK(cp.coef.sign() > 0);
      CHECK(ScalarPi{cp.coef / cl.coef, cp.pi_exp - cl.pi_exp} * lit == pf);
    }
  }
}

TEST_CASE("Pfaffian squared equals determinant") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 2 * (1 + trial % 4);
    Eigen::MatrixXd a(dim, dim);
    for (int i = 0; i < dim; ++i) {
      a(i, i) = 0;
      for (int j = i + 1; j < dim; ++j) {
        a(i, j) = g(rng);
        a(j, i) = -a(i, j);
      }
    }
    const double pf = pfaffian(a);
    const double det = a.determinant();
    CHECK(std::abs(pf * pf - det) <= 1e-9 * std::max(1.0, std::abs(det)));
  }
  Eigen::MatrixXd odd = Eigen::MatrixXd::Zero(3, 3);
  CHECK(pfaffian(odd) == 0.0);
}

TEST_CASE("matching count") {
  for (int m = 1; m <= 5; ++m) {
    std::vector<int> idx(2 * m);
    for (int i = 0; i < 2 * m; ++i) idx[i] = i;
    int count = 0;
    for_each_matching(idx, [&](int, const auto&) { ++count; });
    int expect = 1;
    for (int q = 2 * m - 1; q > 0; q -= 2) expect *= q;
    CHECK(count == expect);
  }
}

TEST_CASE("Euler orthogonality on the default splits") {
  for (auto s : {Split(2, 4), Split(2, 6), Split(2, 8), Split(4, 8), Split(4, 12)}) {
    CAPTURE(s.label());
    auto r = euler_orthogonality(s, OrthogonalityMethod::Direct);
    CHECK(r.exact);
    CHECK(r.term_count_after == 0);
    CHECK(r.term_count_before > 0);
  }
}

TEST_CASE("symmetry-reduced orthogonality agrees with the direct product") {
  for (auto s : {Split(2, 4), Split(2, 6), Split(4, 8), Split(4, 12)}) {
    CAPTURE(s.label());
    auto r = euler_orthogonality(s, OrthogonalityMethod::SymmetryReduced);
    CHECK(r.exact);
    CHECK(r.orbit_representatives > 0);
  }
}

TEST_CASE("transversal coefficient reproduces the direct wedge") {
  // With |B| in place of B the product no longer cancels, so this exercises
  // nonzero coefficients.
  Split s(4, 8);
  auto a = pfaffian_sum(s, Block::U);
  auto b = pfaffian_sum(s, Block::V);
  FormExpr::Terms abs_terms;
  for (const auto& [e, terms] : b.grades())
    for (auto [m, c] : terms) abs_terms.emplace_back(m, c.sign() < 0 ? -c : c);
  auto b_abs = FormExpr::from_terms(8, 0, abs_terms);
  auto direct = wedge(a, b_abs);
  CHECK(!is_zero(direct));
  auto amap = detail::coefficient_map(a);
  auto bmap = detail::coefficient_map(b_abs);
  for (const auto& [m, c] : direct.terms()) CHECK(PiScalar(detail::transversal_coefficient(m, s, amap, bmap)) == c);
}

TEST_CASE("pfaffian factors are block-permutation covariant") {
  Split s(4, 8);
  CHECK(detail::block_permutation_covariant(pfaffian_sum(s, Block::U), s));
  CHECK(detail::block_permutation_covariant(pfaffian_sum(s, Block::V), s));
  CHECK(!detail::block_permutation_covariant(FormExpr::generator(8, 1, 5), s));
}

TEST_CASE("closedness of the Euler forms") {
  for (auto s : {Split(2, 4), Split(2, 6), Split(2, 8), Split(4, 8)}) {
    CAPTURE(s.label());
    CHECK(is_zero(ce_differential(euler_form(s, Block::U))));
    CHECK(is_zero(ce_differential(euler_form(s, Block::V))));
  }
}

TEST_CASE("transgression identity") {
  for (auto s : {Split(2, 4), Split(2, 6), Split(4, 8)}) {
    CAPTURE(s.label());
    CHECK(ce_differential(transgression(s)) == euler_form(s, Block::U));
  }
  CHECK(transgression(Split(2, 4)) == ScalarPi{Rational(1, 2), -1} * FormExpr::generator(4, 1, 2));
  CHECK(ce_differential(transgression(Split(4, 12))) == euler_form(Split(4, 12), Block::U));
  CHECK_THROWS_AS(transgression(Split(8, 16)), std::domain_error);
  CHECK_THROWS_AS(transgression(Split(3, 6)), std::domain_error);
}

TEST_CASE("printed rank-4 expansion misses half of the cubic term") {
  Split s(4, 8);
  auto printed = transgression_printed(s);
  auto cubic = FormExpr::from_word(8, Word{{1, 2}, {1, 3}, {1, 4}});
  CHECK(transgression(s) - printed == ScalarPi{Rational(1, 2), -2} * cubic);
  auto defect = ce_differential(printed) - euler_form(s, Block::U);
  CHECK(defect == ScalarPi{Rational(-1, 2), -2} * ce_differential(cubic));
  CHECK(defect.term_count() == 12);
  CHECK(transgression_printed(Split(2, 4)) == transgression(Split(2, 4)));
}

TEST_CASE("transgression is isotropy invariant") {
  Split s(4, 8);
  auto te = transgression(s);
  for (auto [a, b] : {std::pair{2, 3}, {2, 4}, {3, 4}, {5, 6}, {6, 8}}) CHECK(is_zero(rotation_derivation(te, a, b)));
  CHECK(!is_zero(rotation_derivation(te, 1, 2)));
}

TEST_CASE("calibration candidate is closed") {
  for (auto s : {Split(2, 4), Split(4, 8)}) {
    CAPTURE(s.label());
    auto phi = calibration_phi(s);
    CHECK(!is_zero(phi.form));
    CHECK(is_zero(ce_differential(phi.form)));
    CHECK(!phi.constant);
  }
  CHECK_THROWS_AS(calibration_phi(Split(4, 8), -1.0), std::invalid_argument);
}

TEST_CASE("first Pontryagin forms") {
  Split s(4, 8);
  auto p = pontryagin1(s, Block::U);
  CHECK(p.degree() == 4);
  CHECK(p.term_count() == 36);
  // trace convention: -(1/8 pi^2) sum_{a != b} O_ab O_ba = (1/4 pi^2) sum_{a<b} O_ab^2
  FormExpr sq(8);
  for (int a = 1; a <= 4; ++a)
    for (int b = a + 1; b <= 4; ++b) sq += wedge(curvature_u(s, a, b), curvature_u(s, a, b));
  CHECK(p == ScalarPi{Rational(1, 4), -2} * sq);
  CHECK(is_zero(pontryagin1(Split(1, 4), Block::U)));
  CHECK(is_zero(ce_differential(p)));
}
