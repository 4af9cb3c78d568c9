#include "folcal/charforms.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <unordered_set>

namespace folcal::charforms {

using exalg::GenIndex;
using exalg::Monomial;

Split::Split(int k_, int n_) : k(k_), n(n_) {
  if (k < 1 || k >= n || n > exalg::kMaxRank)
    throw std::invalid_argument("split (" + std::to_string(k) + "," + std::to_string(n) +
                                ") needs 1 <= k < n <= " + std::to_string(exalg::kMaxRank));
}

std::string to_string(Block b) { return b == Block::U ? "U" : "V"; }

std::string to_string(Normalization n) { return n == Normalization::PaperLiteral ? "literal" : "pfaffian"; }

namespace {

std::vector<int> block_indices(const Split& s, Block b) {
  std::vector<int> idx;
  if (b == Block::U)
    for (int i = 1; i <= s.k; ++i) idx.push_back(i);
  else
    for (int i = s.k + 1; i <= s.n; ++i) idx.push_back(i);
  return idx;
}

FormExpr curvature(const Split& s, Block b, int x, int y) {
  return b == Block::U ? curvature_u(s, x, y) : curvature_v(s, x, y);
}

void matchings_rec(std::vector<int>& rest, std::vector<std::pair<int, int>>& acc, int sign,
                   const std::function<void(int, const std::vector<std::pair<int, int>>&)>& f) {
  if (rest.empty()) {
    f(sign, acc);
    return;
  }
  const int first = rest.front();
  for (std::size_t j = 1; j < rest.size(); ++j) {
    const int partner = rest[j];
    std::vector<int> next;
    next.reserve(rest.size() - 2);
    for (std::size_t q = 1; q < rest.size(); ++q)
      if (q != j) next.push_back(rest[q]);
    acc.emplace_back(first, partner);
    matchings_rec(next, acc, (j % 2 == 1) ? sign : -sign, f);
    acc.pop_back();
  }
}

}  // namespace

FormExpr curvature_u(const Split& s, int i, int j) {
  if (i < 1 || i > s.k || j < 1 || j > s.k) throw std::out_of_range("curvature_u: index outside the U-block");
  if (i == j) throw std::invalid_argument("curvature_u: i == j");
  FormExpr out(s.n);
  for (int m = s.k + 1; m <= s.n; ++m) {
    const std::pair<int, int> w[] = {{i, m}, {j, m}};
    out += FormExpr::from_word(s.n, w);
  }
  return out;
}

FormExpr curvature_v(const Split& s, int p, int q) {
  if (p <= s.k || p > s.n || q <= s.k || q > s.n) throw std::out_of_range("curvature_v: index outside the V-block");
  if (p == q) throw std::invalid_argument("curvature_v: p == q");
  FormExpr out(s.n);
  for (int i = 1; i <= s.k; ++i) {
    const std::pair<int, int> w[] = {{i, p}, {i, q}};
    out += FormExpr::from_word(s.n, w);
  }
  return out;
}

void for_each_matching(const std::vector<int>& idx,
                       const std::function<void(int, const std::vector<std::pair<int, int>>&)>& f) {
  if (idx.size() % 2) return;
  std::vector<int> rest = idx;
  std::vector<std::pair<int, int>> acc;
  matchings_rec(rest, acc, 1, f);
}

double pfaffian(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("pfaffian: matrix must be square");
  if (a.rows() % 2) return 0.0;
  std::vector<int> idx(a.rows());
  for (int i = 0; i < a.rows(); ++i) idx[i] = i;
  double sum = 0.0;
  for_each_matching(idx, [&](int sign, const auto& pairs) {
    double prod = sign;
    for (auto [x, y] : pairs) prod *= a(x, y);
    sum += prod;
  });
  return sum;
}

FormExpr pfaffian_sum(const Split& s, Block b) {
  const auto idx = block_indices(s, b);
  if (idx.size() % 2) throw std::invalid_argument("euler form needs an even block rank, got " + std::to_string(idx.size()));
  std::map<std::pair<int, int>, FormExpr> cache;
  auto omega = [&](int x, int y) -> const FormExpr& {
    auto it = cache.find({x, y});
    if (it == cache.end()) it = cache.emplace(std::make_pair(x, y), curvature(s, b, x, y)).first;
    return it->second;
  };
  FormExpr out(s.n);
  for_each_matching(idx, [&](int sign, const auto& pairs) {
    FormExpr prod = FormExpr::constant(s.n, ScalarPi{Rational(sign)});
    for (auto [x, y] : pairs) prod = exalg::wedge(prod, omega(x, y));
    out += prod;
  });
  return out;
}

ScalarPi euler_constant(int block_rank, Normalization norm) {
  if (block_rank % 2 || block_rank <= 0) throw std::invalid_argument("euler constant needs an even positive rank");
  const int m = block_rank / 2;
  if (norm == Normalization::PaperLiteral) {
    if (m == 1) return {Rational(1, 2), -1};
    if (m == 2) return {Rational(1, 2), -2};
  }
  return {Rational(1, std::int64_t{1} << m), -m};
}

FormExpr euler_form(const Split& s, Block b, Normalization norm) {
  const int r = b == Block::U ? s.k : s.v_rank();
  if (r % 2) throw std::invalid_argument("euler form needs an even block rank, got " + std::to_string(r));
  return euler_constant(r, norm) * pfaffian_sum(s, b);
}

FormExpr pontryagin1(const Split& s, Block b) {
  const auto idx = block_indices(s, b);
  FormExpr trace(s.n);
  for (int x : idx)
    for (int y : idx) {
      if (x == y) continue;
      trace += exalg::wedge(curvature(s, b, x, y), curvature(s, b, y, x));
    }
  return ScalarPi{Rational(-1, 8), -2} * trace;
}

namespace {

FormExpr transgression_with(const Split& s, int cubic) {
  const int n = s.n;
  if (s.k == 2) return ScalarPi{Rational(1, 2), -1} * FormExpr::generator(n, 1, 2);
  if (s.k != 4)
    throw std::domain_error("transgression: no explicit formula for U-rank " + std::to_string(s.k) +
                            " (supported: 2, 4)");
  using W = std::pair<int, int>;
  FormExpr body(n);
  {
    const W w[] = {{1, 2}, {1, 3}, {1, 4}};
    body += FormExpr::from_word(n, w, ScalarPi{Rational(cubic)});
  }
  for (int k = 5; k <= n; ++k) {
    const W a[] = {{1, 2}, {3, k}, {4, k}};
    const W b[] = {{1, 3}, {2, k}, {4, k}};
    const W c[] = {{1, 4}, {2, k}, {3, k}};
    body += FormExpr::from_word(n, a);
    body -= FormExpr::from_word(n, b);
    body += FormExpr::from_word(n, c);
  }
  return ScalarPi{Rational(1, 2), -2} * body;
}

}  // namespace

FormExpr transgression(const Split& s) { return transgression_with(s, 2); }

FormExpr transgression_printed(const Split& s) { return transgression_with(s, 1); }

Calibration calibration_phi(const Split& s, std::optional<double> comass_constant) {
  if (comass_constant && !(*comass_constant > 0.0))
    throw std::invalid_argument("calibration_phi: comass constant must be positive");
  FormExpr te = transgression(s);
  FormExpr ev = euler_form(s, Block::V, Normalization::PaperLiteral);
  return {exalg::wedge(te, ev), comass_constant};
}

// ---------------------------------------------------------------- orthogonality

namespace detail {

CoefMap coefficient_map(const FormExpr& f) {
  CoefMap out;
  if (f.grades().size() > 1) throw std::logic_error("coefficient_map: expected a single pi-grade");
  for (const auto& [e, terms] : f.grades())
    for (const auto& [m, c] : terms) out.emplace(m, c);
  return out;
}

std::vector<Monomial> orbit_representatives(const FormExpr& u_form, const Split& s) {
  std::map<std::vector<int>, Monomial> reps;
  for (const auto& [e, terms] : u_form.grades())
    for (const auto& [m, c] : terms) {
      std::vector<int> image(s.k + 1, 0);
      int seen = 0;
      m.for_each([&](int pos) {
        GenIndex g = GenIndex::from_position(s.n, pos);
        if (g.i > s.k || g.j <= s.k || image[g.i] != 0)
          throw std::logic_error("orbit_representatives: monomial is not the graph of a map U -> V");
        image[g.i] = g.j;
        ++seen;
      });
      if (seen != s.k) throw std::logic_error("orbit_representatives: monomial does not cover the U-block");
      std::map<int, int> fibers;
      for (int u = 1; u <= s.k; ++u) ++fibers[image[u]];
      std::vector<int> sig;
      for (auto [v, sz] : fibers) sig.push_back(sz);
      std::sort(sig.rbegin(), sig.rend());
      reps.try_emplace(sig, m);
    }
  std::vector<Monomial> out;
  for (auto& [sig, m] : reps) out.push_back(m);
  return out;
}

Rational transversal_coefficient(Monomial product, const Split& s, const CoefMap& a, const CoefMap& b) {
  std::vector<std::vector<int>> edges(s.k);
  product.for_each([&](int pos) {
    GenIndex g = GenIndex::from_position(s.n, pos);
    if (g.i <= s.k && g.j > s.k) edges[g.i - 1].push_back(pos);
  });
  for (const auto& e : edges)
    if (e.empty()) return Rational{};
  Rational sum;
  std::vector<std::size_t> choice(s.k, 0);
  while (true) {
    Monomial part;
    for (int u = 0; u < s.k; ++u) part = part | Monomial::single(edges[u][choice[u]]);
    if (auto ia = a.find(part); ia != a.end()) {
      Monomial rest = product ^ part;
      if (auto ib = b.find(rest); ib != b.end()) {
        Rational t = ia->second * ib->second;
        sum += exalg::wedge_sign(part, rest) > 0 ? t : -t;
      }
    }
    int u = 0;
    while (u < s.k && ++choice[u] == edges[u].size()) choice[u++] = 0;
    if (u == s.k) break;
  }
  return sum;
}

bool block_permutation_covariant(const FormExpr& f, const Split& s) {
  auto check = [&](int x) {
    std::vector<int> perm(s.n + 1);
    for (int i = 0; i <= s.n; ++i) perm[i] = i;
    std::swap(perm[x], perm[x + 1]);
    FormExpr g = exalg::permute_indices(f, perm);
    return g == f || g == -f;
  };
  for (int x = 1; x < s.k; ++x)
    if (!check(x)) return false;
  for (int x = s.k + 1; x < s.n; ++x)
    if (!check(x)) return false;
  return true;
}

}  // namespace detail

OrthogonalityCheck euler_orthogonality(const Split& s, OrthogonalityMethod method) {
  OrthogonalityCheck out;
  out.split = s;
  out.method = method;
  FormExpr a = pfaffian_sum(s, Block::U);
  FormExpr b = pfaffian_sum(s, Block::V);
  out.u_terms = a.term_count();
  out.v_terms = b.term_count();
  if (method == OrthogonalityMethod::Direct) {
    exalg::WedgeStats st;
    FormExpr prod = exalg::wedge(a, b, &st);
    out.exact = prod.is_zero();
    out.term_count_before = st.pairs;
    out.disjoint_products = st.raw_products;
    out.term_count_after = st.terms_after;
    return out;
  }
  if (!detail::block_permutation_covariant(a, s) || !detail::block_permutation_covariant(b, s))
    throw std::logic_error("euler_orthogonality: factors are not block-permutation covariant");
  const auto reps = detail::orbit_representatives(a, s);
  out.orbit_representatives = reps.size();
  const auto amap = detail::coefficient_map(a);
  const auto bmap = detail::coefficient_map(b);
  std::unordered_set<Monomial, exalg::MonomialHash> candidates;
  for (Monomial r : reps)
    for (const auto& [e, terms] : b.grades())
      for (const auto& [m, c] : terms) {
        ++out.term_count_before;
        if (!r.disjoint(m)) continue;
        ++out.disjoint_products;
        candidates.insert(r | m);
      }
  std::size_t nonzero = 0;
  for (Monomial cand : candidates)
    if (!detail::transversal_coefficient(cand, s, amap, bmap).is_zero()) ++nonzero;
  out.term_count_after = nonzero;
  out.exact = nonzero == 0;
  return out;
}

}  // namespace folcal::charforms
