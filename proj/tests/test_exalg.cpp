#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <vector>

#include "folcal/charforms.hpp"
#include "folcal/exalg.hpp"

using namespace folcal;
using namespace folcal::exalg;

namespace {

using Word = std::vector<std::pair<int, int>>;

Monomial mono(int n, Word w) {
  auto [s, m] = normalize_monomial(n, w);
  REQUIRE(s == 1);
  return m;
}

FormExpr random_form(std::mt19937_64& rng, int n, int degree, int terms) {
  std::uniform_int_distribution<int> idx(1, n);
  std::uniform_int_distribution<int> coef(-5, 5);
  FormExpr f(n);
  for (int t = 0; t < terms; ++t) {
    Word w;
    for (int d = 0; d < degree; ++d) {
      int a = idx(rng), b = idx(rng);
      while (b == a) b = idx(rng);
      w.emplace_back(a, b);
    }
    f += FormExpr::from_word(n, w, ScalarPi{Rational(coef(rng))});
  }
  return f;
}

}  // namespace

TEST_CASE("normalize_monomial examples") {
  {
    Word w{{2, 1}};
    auto [s, m] = normalize_monomial(4, w);
    CHECK(s == -1);
    CHECK(m == Monomial::single(GenIndex{1, 2, 4}.position()));
  }
  {
    Word w{{1, 2}, {1, 2}};
    CHECK(normalize_monomial(4, w).first == 0);
  }
  {
    Word w{{3, 4}, {1, 2}};
    auto [s, m] = normalize_monomial(4, w);
    CHECK(s == -1);
    CHECK(m == mono(4, {{1, 2}, {3, 4}}));
  }
  {
    Word w{{1, 1}};
    CHECK(normalize_monomial(4, w).first == 0);
  }
  Word bad{{1, 5}};
  CHECK_THROWS_AS(normalize_monomial(4, bad), std::out_of_range);
}

TEST_CASE("generator positions round trip") {
  for (int n = 2; n <= kMaxRank; ++n) {
    int pos = 0;
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j) {
        GenIndex g{i, j, n};
        CHECK(g.position() == pos);
        CHECK(GenIndex::from_position(n, pos) == g);
        ++pos;
      }
    CHECK(generator_count(n) == pos);
  }
}

TEST_CASE("wedge basics") {
  const int n = 4;
  auto m12 = FormExpr::generator(n, 1, 2);
  auto m13 = FormExpr::generator(n, 1, 3);
  CHECK(is_zero(wedge(m12, m12)));
  auto p = wedge(m12, m13);
  CHECK(p.term_count() == 1);
  CHECK(p.coefficient(mono(n, {{1, 2}, {1, 3}})) == PiScalar(Rational(1)));
  CHECK(wedge(m13, m12) == -p);
  CHECK(is_zero(m12 - m12));
  CHECK(is_zero(FormExpr(n)));
  CHECK_THROWS(wedge(m12, FormExpr::generator(5, 1, 2)));
}

TEST_CASE("canonicality under random association and order") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 4 + trial % 5;
    std::uniform_int_distribution<int> idx(1, n);
    std::uniform_int_distribution<int> len(1, 5);
    Word w;
    const int L = len(rng);
    for (int d = 0; d < L; ++d) {
      int a = idx(rng), b = idx(rng);
      while (b == a) b = idx(rng);
      w.emplace_back(a, b);
    }
    // left fold in given order
    FormExpr left = FormExpr::constant(n, ScalarPi{Rational(1)});
    for (auto [a, b] : w) left = wedge(left, FormExpr::generator(n, a, b));
    // right fold
    FormExpr right = FormExpr::constant(n, ScalarPi{Rational(1)});
    for (auto it = w.rbegin(); it != w.rend(); ++it) right = wedge(FormExpr::generator(n, it->first, it->second), right);
    CHECK(left == right);
    CHECK(left == FormExpr::from_word(n, w));
    // a random permutation of the word changes the result by the permutation sign
    std::vector<int> perm(L);
    for (int i = 0; i < L; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    Word shuffled;
    int inversions = 0;
    for (int i = 0; i < L; ++i) {
      shuffled.push_back(w[perm[i]]);
      for (int j = i + 1; j < L; ++j) inversions += perm[i] > perm[j];
    }
    FormExpr s = FormExpr::from_word(n, shuffled);
    CHECK(s == (inversions % 2 ? -left : left));
  }
}

TEST_CASE("graded anticommutativity") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 4 + trial % 5;
    const int p = 1 + trial % 3, q = 1 + (trial / 3) % 3;
    auto a = random_form(rng, n, p, 6);
    auto b = random_form(rng, n, q, 6);
    auto ab = wedge(a, b);
    auto ba = wedge(b, a);
    CHECK(ab == ((p * q) % 2 ? -ba : ba));
  }
}

TEST_CASE("associativity") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 5 + trial % 4;
    auto a = random_form(rng, n, 1, 4);
    auto b = random_form(rng, n, 2, 4);
    auto c = random_form(rng, n, 1, 4);
    CHECK(wedge(wedge(a, b), c) == wedge(a, wedge(b, c)));
  }
}

TEST_CASE("CE differential of mu12 on rank 4") {
  auto d = ce_differential(FormExpr::generator(4, 1, 2));
  FormExpr expect(4);
  expect += FormExpr::from_word(4, Word{{1, 3}, {2, 3}});
  expect += FormExpr::from_word(4, Word{{1, 4}, {2, 4}});
  CHECK(d == expect);
  CHECK(d.degree() == 2);
}

TEST_CASE("d squared vanishes on generators, ranks 4..8") {
  for (int n = 4; n <= 8; ++n)
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j) CHECK(is_zero(ce_differential(ce_differential(FormExpr::generator(n, i, j)))));
}

TEST_CASE("d squared vanishes on random forms") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 4 + trial % 5;
    auto f = random_form(rng, n, 1 + trial % 3, 5);
    CHECK(is_zero(ce_differential(ce_differential(f))));
  }
}

TEST_CASE("Leibniz rule") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 4 + trial % 4;
    const int p = 1 + trial % 2;
    auto a = random_form(rng, n, p, 4);
    auto b = random_form(rng, n, 2, 4);
    auto lhs = ce_differential(wedge(a, b));
    auto rhs = wedge(ce_differential(a), b) + ScalarPi{Rational(p % 2 ? -1 : 1)} * wedge(a, ce_differential(b));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("constants have zero differential") {
  CHECK(is_zero(ce_differential(FormExpr::constant(4, ScalarPi{Rational(3), -1}))));
}

TEST_CASE("evaluation table entries on the (4,8) V-block Euler form") {
  charforms::Split s(4, 8);
  auto ev = charforms::euler_form(s, charforms::Block::V);
  auto E = [](int a, int b) { return DualVector::basis(8, a, b); };
  std::vector<DualVector> v1{E(1, 5), E(1, 6), E(1, 7), E(1, 8)};
  std::vector<DualVector> v2{E(1, 5), E(1, 6), E(2, 7), E(2, 8)};
  std::vector<DualVector> v3{E(1, 5), E(2, 6), E(3, 7), E(4, 8)};
  std::vector<DualVector> v4{E(1, 6), E(1, 5), E(2, 7), E(2, 8)};
  CHECK(evaluate(ev, v1) == PiScalar(ScalarPi{Rational(3, 2), -2}));
  CHECK(evaluate(ev, v2) == PiScalar(ScalarPi{Rational(1, 2), -2}));
  CHECK(evaluate(ev, v3).is_zero());
  CHECK(evaluate(ev, v4) == PiScalar(ScalarPi{Rational(-1, 2), -2}));
  std::vector<DualVector> short_list{E(1, 5)};
  CHECK_THROWS_AS(evaluate(ev, short_list), std::invalid_argument);
}

TEST_CASE("evaluate is alternating") {
  std::mt19937_64 rng(9);
  const int n = 6;
  std::uniform_int_distribution<int> idx(1, n);
  std::uniform_int_distribution<int> c(-3, 3);
  for (int trial = 0; trial < 50; ++trial) {
    auto f = random_form(rng, n, 3, 10);
    std::vector<DualVector> vs;
    for (int r = 0; r < 3; ++r) {
      DualVector v(n);
      for (int t = 0; t < 4; ++t) {
        int a = idx(rng), b = idx(rng);
        if (a != b) v.add(a, b, Rational(c(rng)));
      }
      vs.push_back(v);
    }
    auto base = evaluate(f, vs);
    std::swap(vs[0], vs[2]);
    CHECK(evaluate(f, vs) == -base);
  }
}

TEST_CASE("mixed grade forms are rejected by evaluate") {
  FormExpr f = FormExpr::generator(4, 1, 2) + FormExpr::from_word(4, Word{{1, 3}, {2, 4}});
  std::vector<DualVector> vs{DualVector::basis(4, 1, 2)};
  CHECK_THROWS_AS(evaluate(f, vs), std::invalid_argument);
}

TEST_CASE("text serialization") {
  FormExpr f = ScalarPi{Rational(1, 2), -1} * FormExpr::generator(4, 1, 2);
  CHECK(f.to_string() == "1/2 * pi^-1 * mu[1,2]\n");
  CHECK(FormExpr(4).to_string() == "0\n");
}

TEST_CASE("rotation derivation detects invariance") {
  charforms::Split s(2, 4);
  auto e = charforms::curvature_u(s, 1, 2);
  CHECK(is_zero(rotation_derivation(e, 3, 4)));
  CHECK(!is_zero(rotation_derivation(FormExpr::generator(4, 1, 3), 3, 4)));
}
