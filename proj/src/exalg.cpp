#include "folcal/exalg.hpp"

#include <algorithm>
#include <array>
#include <mutex>
#include <stdexcept>

namespace folcal::exalg {

namespace {

void check_rank(int n) {
  if (n < 1 || n > kMaxRank) throw std::invalid_argument("rank must be in 1.." + std::to_string(kMaxRank));
}

void check_same_rank(const FormExpr& a, const FormExpr& b) {
  if (a.rank() != b.rank())
    throw std::invalid_argument("rank mismatch: " + std::to_string(a.rank()) + " vs " + std::to_string(b.rank()));
}

int pos_of(int n, int i, int j) { return (i - 1) * n - (i - 1) * i / 2 + (j - i - 1); }

struct DiffTerm {
  Monomial pair;
  int sign;
};

// d(mu_g) for every generator g of so(n), built once per rank.
const std::vector<std::vector<DiffTerm>>& diff_table(int n) {
  static std::array<std::vector<std::vector<DiffTerm>>, kMaxRank + 1> tables;
  static std::array<std::once_flag, kMaxRank + 1> flags;
  std::call_once(flags[n], [n] {
    auto& t = tables[n];
    t.resize(generator_count(n));
    for (int pos = 0; pos < generator_count(n); ++pos) {
      const GenIndex g = GenIndex::from_position(n, pos);
      for (int k = 1; k <= n; ++k) {
        if (k == g.i || k == g.j) continue;
        auto [s1, a] = make_gen(n, g.i, k);
        auto [s2, b] = make_gen(n, k, g.j);
        Monomial ma = Monomial::single(a.position());
        Monomial mb = Monomial::single(b.position());
        t[pos].push_back({ma | mb, -s1 * s2 * wedge_sign(ma, mb)});
      }
    }
  });
  return tables[n];
}

Rational rational_det(std::vector<std::vector<Rational>> m) {
  const std::size_t p = m.size();
  Rational det(1);
  for (std::size_t c = 0; c < p; ++c) {
    std::size_t piv = c;
    while (piv < p && m[piv][c].is_zero()) ++piv;
    if (piv == p) return Rational{};
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t r = c + 1; r < p; ++r) {
      if (m[r][c].is_zero()) continue;
      Rational f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < p; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

// Replace generator at `pos` inside m by each term of `repl`, with the sign
// of moving the replacement into canonical position.
template <class F>
void substitute(Monomial m, int pos, const std::vector<DiffTerm>& repl, F&& emit) {
  Monomial without = m ^ Monomial::single(pos);
  Monomial prefix;
  without.for_each([&](int q) {
    if (q < pos) prefix = prefix | Monomial::single(q);
  });
  Monomial suffix = without ^ prefix;
  for (const auto& r : repl) {
    if (!without.disjoint(r.pair)) continue;
    int s = wedge_sign(prefix, r.pair) * wedge_sign(prefix | r.pair, suffix);
    emit(without | r.pair, r.sign * s);
  }
}

}  // namespace

int generator_count(int n) { return n * (n - 1) / 2; }

int GenIndex::position() const { return pos_of(n, i, j); }

GenIndex GenIndex::from_position(int n, int pos) {
  check_rank(n);
  if (pos < 0 || pos >= generator_count(n)) throw std::out_of_range("generator position out of range");
  int i = 1;
  while (pos >= n - i) {
    pos -= n - i;
    ++i;
  }
  return GenIndex{i, i + 1 + pos, n};
}

std::pair<int, GenIndex> make_gen(int n, int a, int b) {
  check_rank(n);
  if (a < 1 || a > n || b < 1 || b > n)
    throw std::out_of_range("generator index (" + std::to_string(a) + "," + std::to_string(b) + ") outside 1.." +
                            std::to_string(n));
  if (a == b) return {0, GenIndex{1, 2, n}};
  if (a < b) return {1, GenIndex{a, b, n}};
  return {-1, GenIndex{b, a, n}};
}

Monomial Monomial::single(int pos) {
  if (pos < 64) return {std::uint64_t{1} << pos, 0};
  return {0, std::uint64_t{1} << (pos - 64)};
}

int Monomial::count_above(int pos) const {
  if (pos >= 64) {
    int s = pos - 63;
    return s >= 64 ? 0 : std::popcount(hi_ >> s);
  }
  int s = pos + 1;
  return std::popcount(hi_) + (s >= 64 ? 0 : std::popcount(lo_ >> s));
}

std::vector<int> Monomial::positions() const {
  std::vector<int> out;
  out.reserve(degree());
  for_each([&](int p) { out.push_back(p); });
  return out;
}

std::vector<GenIndex> Monomial::generators(int n) const {
  std::vector<GenIndex> out;
  for_each([&](int p) { out.push_back(GenIndex::from_position(n, p)); });
  return out;
}

bool MonomialLess::operator()(const Monomial& a, const Monomial& b) const {
  int da = a.degree();
  int db = b.degree();
  if (da != db) return da < db;
  Monomial x = a ^ b;
  if (x.empty()) return false;
  int low = x.lo() ? std::countr_zero(x.lo()) : 64 + std::countr_zero(x.hi());
  return a.test(low);
}

int wedge_sign(Monomial a, Monomial b) {
  if (!a.disjoint(b)) return 0;
  int inversions = 0;
  b.for_each([&](int y) { inversions += a.count_above(y); });
  return (inversions & 1) ? -1 : 1;
}

std::pair<int, Monomial> normalize_monomial(int n, std::span<const std::pair<int, int>> word) {
  int sign = 1;
  std::vector<int> pos;
  pos.reserve(word.size());
  for (auto [a, b] : word) {
    auto [s, g] = make_gen(n, a, b);
    if (s == 0) sign = 0;
    sign *= s == 0 ? 1 : s;
    pos.push_back(g.position());
  }
  if (sign == 0) return {0, Monomial{}};
  Monomial m;
  for (std::size_t r = 0; r < pos.size(); ++r) {
    for (std::size_t q = r + 1; q < pos.size(); ++q) {
      if (pos[r] == pos[q]) return {0, Monomial{}};
      if (pos[r] > pos[q]) sign = -sign;
    }
    m = m | Monomial::single(pos[r]);
  }
  return {sign, m};
}

// ---------------------------------------------------------------- accumulator

void TermAccumulator::add(Monomial m, const Rational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = map_.try_emplace(m, c);
  if (!inserted) it->second += c;
}

FormExpr::Terms TermAccumulator::finish() {
  FormExpr::Terms out;
  out.reserve(map_.size());
  for (auto& [m, c] : map_)
    if (!c.is_zero()) out.emplace_back(m, c);
  map_.clear();
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return MonomialLess{}(x.first, y.first); });
  return out;
}

// ------------------------------------------------------------------- FormExpr

FormExpr::FormExpr(int rank) : rank_(rank) { check_rank(rank); }

FormExpr FormExpr::generator(int rank, int a, int b) {
  auto [s, g] = make_gen(rank, a, b);
  FormExpr f(rank);
  if (s != 0) f.grades_[0].emplace_back(Monomial::single(g.position()), Rational(s));
  return f;
}

FormExpr FormExpr::constant(int rank, const ScalarPi& c) {
  FormExpr f(rank);
  if (!c.is_zero()) f.grades_[c.pi_exp].emplace_back(Monomial{}, c.coef);
  return f;
}

FormExpr FormExpr::from_word(int rank, std::span<const std::pair<int, int>> word, const ScalarPi& c) {
  auto [s, m] = normalize_monomial(rank, word);
  FormExpr f(rank);
  if (s != 0 && !c.is_zero()) f.grades_[c.pi_exp].emplace_back(m, c.coef * Rational(s));
  return f;
}

FormExpr FormExpr::from_terms(int rank, int pi_exp, Terms terms) {
  FormExpr f(rank);
  TermAccumulator acc;
  for (auto& [m, c] : terms) {
    if (m.lo() || m.hi()) {
      int top = -1;
      m.for_each([&](int p) { top = p; });
      if (top >= generator_count(rank)) throw std::out_of_range("monomial uses a generator outside the rank");
    }
    acc.add(m, c);
  }
  Terms t = acc.finish();
  if (!t.empty()) f.grades_[pi_exp] = std::move(t);
  return f;
}

std::optional<int> FormExpr::degree() const {
  std::optional<int> d;
  for (const auto& [e, terms] : grades_)
    for (const auto& [m, c] : terms) {
      if (!d) d = m.degree();
      else if (*d != m.degree()) return std::nullopt;
    }
  return d;
}

std::size_t FormExpr::term_count() const {
  if (grades_.size() == 1) return grades_.begin()->second.size();
  return terms().size();
}

std::map<Monomial, PiScalar, MonomialLess> FormExpr::terms() const {
  std::map<Monomial, PiScalar, MonomialLess> out;
  for (const auto& [e, terms] : grades_)
    for (const auto& [m, c] : terms) out[m] += PiScalar(ScalarPi{c, e});
  return out;
}

PiScalar FormExpr::coefficient(Monomial m) const {
  PiScalar out;
  for (const auto& [e, terms] : grades_) {
    auto it = std::lower_bound(terms.begin(), terms.end(), m,
                               [](const auto& t, const Monomial& key) { return MonomialLess{}(t.first, key); });
    if (it != terms.end() && it->first == m) out += PiScalar(ScalarPi{it->second, e});
  }
  return out;
}

FormExpr FormExpr::operator-() const {
  FormExpr f = *this;
  for (auto& [e, terms] : f.grades_)
    for (auto& t : terms) t.second = -t.second;
  return f;
}

FormExpr& FormExpr::operator+=(const FormExpr& o) {
  check_same_rank(*this, o);
  for (const auto& [e, rhs] : o.grades_) {
    auto& lhs = grades_[e];
    Terms merged;
    merged.reserve(lhs.size() + rhs.size());
    std::size_t a = 0;
    std::size_t b = 0;
    MonomialLess less;
    while (a < lhs.size() || b < rhs.size()) {
      if (b == rhs.size() || (a < lhs.size() && less(lhs[a].first, rhs[b].first))) {
        merged.push_back(lhs[a++]);
      } else if (a == lhs.size() || less(rhs[b].first, lhs[a].first)) {
        merged.push_back(rhs[b++]);
      } else {
        Rational s = lhs[a].second + rhs[b].second;
        if (!s.is_zero()) merged.emplace_back(lhs[a].first, s);
        ++a;
        ++b;
      }
    }
    if (merged.empty()) grades_.erase(e);
    else lhs = std::move(merged);
  }
  return *this;
}

FormExpr& FormExpr::operator-=(const FormExpr& o) { return *this += -o; }

FormExpr operator*(const ScalarPi& s, const FormExpr& f) {
  FormExpr out(f.rank());
  if (s.is_zero()) return out;
  for (const auto& [e, terms] : f.grades_) {
    FormExpr::Terms scaled = terms;
    for (auto& t : scaled) t.second *= s.coef;
    out.grades_[e + s.pi_exp] = std::move(scaled);
  }
  return out;
}

std::string FormExpr::to_string() const {
  if (is_zero()) return "0\n";
  std::string out;
  for (const auto& [m, c] : terms()) {
    out += c.to_string();
    out += " * ";
    if (m.empty()) {
      out += "1";
    } else {
      bool first = true;
      for (const auto& g : m.generators(rank_)) {
        if (!first) out += "^";
        first = false;
        out += "mu[" + std::to_string(g.i) + "," + std::to_string(g.j) + "]";
      }
    }
    out += "\n";
  }
  return out;
}

// ----------------------------------------------------------------- operations

FormExpr wedge(const FormExpr& a, const FormExpr& b, WedgeStats* stats) {
  check_same_rank(a, b);
  std::map<int, TermAccumulator> acc;
  WedgeStats local;
  for (const auto& [ea, ta] : a.grades())
    for (const auto& [eb, tb] : b.grades()) {
      auto& out = acc[ea + eb];
      out.reserve(out.size() + std::min<std::size_t>(ta.size() * tb.size(), 1u << 22));
      for (const auto& [ma, ca] : ta)
        for (const auto& [mb, cb] : tb) {
          ++local.pairs;
          int s = wedge_sign(ma, mb);
          if (s == 0) continue;
          ++local.raw_products;
          out.add(ma | mb, s > 0 ? ca * cb : -(ca * cb));
        }
    }
  FormExpr result(a.rank());
  for (auto& [e, ac] : acc) {
    FormExpr::Terms t = ac.finish();
    if (!t.empty()) result += FormExpr::from_terms(a.rank(), e, std::move(t));
  }
  local.terms_after = result.term_count();
  if (stats) *stats = local;
  return result;
}

FormExpr ce_differential(const FormExpr& a) {
  const auto& table = diff_table(a.rank());
  FormExpr result(a.rank());
  for (const auto& [e, terms] : a.grades()) {
    TermAccumulator acc;
    for (const auto& [m, c] : terms) {
      int r = 0;
      m.for_each([&](int pos) {
        const int leibniz = (r++ & 1) ? -1 : 1;
        substitute(m, pos, table[pos], [&](Monomial nm, int s) { acc.add(nm, s * leibniz > 0 ? c : -c); });
      });
    }
    FormExpr::Terms t = acc.finish();
    if (!t.empty()) result += FormExpr::from_terms(a.rank(), e, std::move(t));
  }
  return result;
}

bool is_zero(const FormExpr& a) { return a.is_zero(); }

FormExpr permute_indices(const FormExpr& a, std::span<const int> perm) {
  const int n = a.rank();
  if (static_cast<int>(perm.size()) != n + 1) throw std::invalid_argument("permutation must have rank+1 entries");
  FormExpr result(n);
  for (const auto& [e, terms] : a.grades()) {
    TermAccumulator acc;
    for (const auto& [m, c] : terms) {
      std::vector<std::pair<int, int>> word;
      for (const auto& g : m.generators(n)) word.emplace_back(perm[g.i], perm[g.j]);
      auto [s, nm] = normalize_monomial(n, word);
      if (s != 0) acc.add(nm, s > 0 ? c : -c);
    }
    FormExpr::Terms t = acc.finish();
    if (!t.empty()) result += FormExpr::from_terms(n, e, std::move(t));
  }
  return result;
}

FormExpr rotation_derivation(const FormExpr& f, int a, int b) {
  const int n = f.rank();
  if (a < 1 || a > n || b < 1 || b > n || a == b) throw std::out_of_range("rotation plane outside 1..n");
  // R e_a = e_b, R e_b = -e_a; R mu_ij = mu_{Ri,j} + mu_{i,Rj}.
  auto image = [&](int idx) -> std::pair<int, int> {
    if (idx == a) return {1, b};
    if (idx == b) return {-1, a};
    return {0, 0};
  };
  std::vector<std::vector<DiffTerm>> repl(generator_count(n));
  for (int pos = 0; pos < generator_count(n); ++pos) {
    GenIndex g = GenIndex::from_position(n, pos);
    TermAccumulator acc;
    if (auto [s, ri] = image(g.i); s != 0) {
      auto [t, h] = make_gen(n, ri, g.j);
      if (t != 0) acc.add(Monomial::single(h.position()), Rational(s * t));
    }
    if (auto [s, rj] = image(g.j); s != 0) {
      auto [t, h] = make_gen(n, g.i, rj);
      if (t != 0) acc.add(Monomial::single(h.position()), Rational(s * t));
    }
    for (auto& [m, c] : acc.finish()) repl[pos].push_back({m, static_cast<int>(c.num())});
  }
  FormExpr result(n);
  for (const auto& [e, terms] : f.grades()) {
    TermAccumulator acc;
    for (const auto& [m, c] : terms)
      m.for_each([&](int pos) {
        substitute(m, pos, repl[pos], [&](Monomial nm, int s) { acc.add(nm, s > 0 ? c : -c); });
      });
    FormExpr::Terms t = acc.finish();
    if (!t.empty()) result += FormExpr::from_terms(n, e, std::move(t));
  }
  return result;
}

// ----------------------------------------------------------------- evaluation

DualVector DualVector::basis(int rank, int a, int b) {
  DualVector v(rank);
  v.add(a, b, Rational(1));
  return v;
}

void DualVector::add(int a, int b, const Rational& c) {
  auto [s, g] = make_gen(rank_, a, b);
  if (s == 0) throw std::invalid_argument("E_aa is not a basis vector");
  Rational& slot = comp_[g.position()];
  slot += s > 0 ? c : -c;
  if (slot.is_zero()) comp_.erase(g.position());
}

Rational DualVector::component(int pos) const {
  auto it = comp_.find(pos);
  return it == comp_.end() ? Rational{} : it->second;
}

PiScalar evaluate(const FormExpr& a, std::span<const DualVector> vectors) {
  for (const auto& v : vectors)
    if (v.rank() != a.rank()) throw std::invalid_argument("vector rank does not match form rank");
  if (a.is_zero()) return PiScalar{};
  auto deg = a.degree();
  if (!deg) throw std::invalid_argument("evaluate: form is not homogeneous");
  if (static_cast<std::size_t>(*deg) != vectors.size())
    throw std::invalid_argument("evaluate: arity mismatch (degree " + std::to_string(*deg) + ", " +
                                std::to_string(vectors.size()) + " vectors)");
  const std::size_t p = vectors.size();
  PiScalar out;
  for (const auto& [e, terms] : a.grades()) {
    Rational sum;
    for (const auto& [m, c] : terms) {
      std::vector<std::vector<Rational>> mat(p, std::vector<Rational>(p));
      std::size_t r = 0;
      bool zero_row = false;
      m.for_each([&](int pos) {
        bool any = false;
        for (std::size_t s = 0; s < p; ++s) {
          mat[r][s] = vectors[s].component(pos);
          any = any || !mat[r][s].is_zero();
        }
        zero_row = zero_row || !any;
        ++r;
      });
      if (zero_row) continue;
      sum += c * rational_det(std::move(mat));
    }
    out += PiScalar(ScalarPi{sum, e});
  }
  return out;
}

}  // namespace folcal::exalg
