#include "folcal/grassmann.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "folcal/rng.hpp"

namespace folcal::grassmann {

using exalg::GenIndex;

TangentSpace TangentSpace::grassmann(const Split& s) {
  TangentSpace t{s, {}};
  for (int i = 1; i <= s.k; ++i)
    for (int m = s.k + 1; m <= s.n; ++m) t.positions.push_back(GenIndex{i, m, s.n}.position());
  return t;
}

TangentSpace TangentSpace::flag(const Split& s) {
  TangentSpace t{s, {}};
  for (int j = 2; j <= s.k; ++j) t.positions.push_back(GenIndex{1, j, s.n}.position());
  const auto g = grassmann(s);
  t.positions.insert(t.positions.end(), g.positions.begin(), g.positions.end());
  return t;
}

int TangentSpace::index_of(int pos) const {
  auto it = std::find(positions.begin(), positions.end(), pos);
  return it == positions.end() ? -1 : static_cast<int>(it - positions.begin());
}

int TangentSpace::index_of(int a, int b) const {
  if (a < 1 || b > split.n || a >= b) return -1;
  return index_of(GenIndex{a, b, split.n}.position());
}

namespace {

bool near_identity(const Eigen::MatrixXd& v, double tol) {
  const Eigen::MatrixXd g = v.transpose() * v;
  return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() <= tol;
}

Rational rational_det(std::vector<std::vector<Rational>> a) {
  const std::size_t n = a.size();
  Rational det(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a[piv][c].is_zero()) ++piv;
    if (piv == n) return Rational{};
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (a[r][c].is_zero()) continue;
      const Rational f = a[r][c] / a[c][c];
      for (std::size_t q = c; q < n; ++q) a[r][q] -= f * a[c][q];
    }
  }
  return det;
}

// Sign of E_S ^ E_T relative to E_{S|T}, for disjoint masks.
int merge_sign(std::uint64_t s, std::uint64_t t) {
  int inv = 0;
  for (std::uint64_t w = t; w; w &= w - 1) {
    const int b = std::countr_zero(w);
    inv += std::popcount(b == 63 ? 0 : s >> (b + 1));
  }
  return inv % 2 ? -1 : 1;
}

}  // namespace

bool Frame::orthonormal(double tol) const { return near_identity(vectors, tol); }

bool TangentPlane::orthonormal(double tol) const {
  return basis.rows() == space.dim() && near_identity(basis, tol);
}

bool orthonormalize(Eigen::MatrixXd& m, double tol) {
  for (int c = 0; c < m.cols(); ++c) {
    const double scale = m.col(c).norm();
    for (int pass = 0; pass < 2; ++pass)
      for (int q = 0; q < c; ++q) m.col(c) -= m.col(q).dot(m.col(c)) * m.col(q);
    const double len = m.col(c).norm();
    if (!(len > tol * std::max(scale, 1.0))) return false;
    m.col(c) /= len;
  }
  return true;
}

void for_each_subset(int count, int size, const std::function<void(std::span<const int>)>& f) {
  if (size < 0 || size > count) return;
  std::vector<int> idx(size);
  for (int i = 0; i < size; ++i) idx[i] = i;
  while (true) {
    f(idx);
    int i = size - 1;
    while (i >= 0 && idx[i] == count - size + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// ---------------------------------------------------------------- exact planes

Rational ExactPlane::gram_determinant() const {
  const std::size_t p = vectors.size();
  std::vector<std::vector<Rational>> g(p, std::vector<Rational>(p));
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < p; ++b) {
      Rational s;
      for (std::size_t r = 0; r < vectors[a].size(); ++r) s += vectors[a][r] * vectors[b][r];
      g[a][b] = s;
    }
  return rational_det(std::move(g));
}

std::vector<exalg::DualVector> ExactPlane::dual_vectors() const {
  std::vector<exalg::DualVector> out;
  for (const auto& v : vectors) {
    exalg::DualVector d(space.split.n);
    for (int r = 0; r < space.dim(); ++r) {
      if (v[r].is_zero()) continue;
      const GenIndex g = space.generator(r);
      d.add(g.i, g.j, v[r]);
    }
    out.push_back(std::move(d));
  }
  return out;
}

TangentPlane ExactPlane::to_numeric() const {
  Eigen::MatrixXd m(space.dim(), degree());
  for (int c = 0; c < degree(); ++c)
    for (int r = 0; r < space.dim(); ++r) m(r, c) = vectors[c][r].to_double();
  if (!orthonormalize(m)) throw std::invalid_argument("exact plane vectors are linearly dependent");
  return {space, m};
}

ExactPlane coordinate_plane(const TangentSpace& space, std::span<const std::pair<int, int>> gens) {
  ExactPlane p{space, {}};
  for (auto [a, b] : gens) {
    int sign = 1;
    if (a > b) {
      std::swap(a, b);
      sign = -1;
    }
    const int idx = space.index_of(a, b);
    if (idx < 0) throw std::invalid_argument("E_" + std::to_string(a) + "," + std::to_string(b) + " is not in the tangent space");
    std::vector<Rational> v(space.dim());
    v[idx] = Rational(sign);
    p.vectors.push_back(std::move(v));
  }
  return p;
}

int quaternion_unit_product(int a, int b, int& sign) {
  // rows: left factor, cols: right factor; entries +-(c+1)
  static constexpr int table[4][4] = {
      {1, 2, 3, 4},
      {2, -1, 4, -3},
      {3, -4, -1, 2},
      {4, 3, -2, -1},
  };
  const int e = table[a][b];
  sign = e > 0 ? 1 : -1;
  return std::abs(e) - 1;
}

namespace {

ExactPlane quaternionic(const Split& s, bool right) {
  if (s.k != 4 || s.n != 8) throw std::invalid_argument("quaternionic tangent plane needs split (4,8)");
  const auto space = TangentSpace::grassmann(s);
  ExactPlane p{space, {}};
  for (int q = 0; q < 4; ++q) {
    std::vector<Rational> v(space.dim());
    for (int a = 0; a < 4; ++a) {
      int sign = 1;
      const int c = right ? quaternion_unit_product(a, q, sign) : quaternion_unit_product(q, a, sign);
      v[space.index_of(a + 1, s.k + 1 + c)] = Rational(sign, 2);
    }
    p.vectors.push_back(std::move(v));
  }
  return p;
}

}  // namespace

ExactPlane quaternionic_tangent_plane(const Split& s) { return quaternionic(s, true); }

ExactPlane quaternionic_tangent_plane_left(const Split& s) { return quaternionic(s, false); }

ExactPlane complex_tangent_plane(const Split& s) {
  if (s.k != 2 || s.n < 4) throw std::invalid_argument("complex tangent plane needs split (2,n), n >= 4");
  const auto space = TangentSpace::grassmann(s);
  std::vector<Rational> a(space.dim()), b(space.dim());
  a[space.index_of(1, 3)] = Rational(1);
  a[space.index_of(2, 4)] = Rational(1);
  b[space.index_of(1, 4)] = Rational(1);
  b[space.index_of(2, 3)] = Rational(-1);
  return {space, {a, b}};
}

ExactPlane axis_sphere_family_plane(const Split& s) {
  if (s.k != 2 && s.k != 4 && s.k != 8)
    throw std::invalid_argument("axis sphere family plane needs U-rank 2, 4 or 8");
  std::vector<std::pair<int, int>> gens;
  for (int m = s.k + 1; m <= s.n; ++m) gens.emplace_back(1, m);
  return coordinate_plane(TangentSpace::grassmann(s), gens);
}

// ---------------------------------------------------------------- Plucker

PluckerCoords::PluckerCoords(TangentSpace space, int degree, std::vector<std::pair<std::uint64_t, double>> entries)
    : space_(std::move(space)), degree_(degree), entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end());
}

double PluckerCoords::at(std::uint64_t mask) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), mask,
                             [](const auto& e, std::uint64_t m) { return e.first < m; });
  return it != entries_.end() && it->first == mask ? it->second : 0.0;
}

double PluckerCoords::norm() const {
  double s = 0.0;
  for (const auto& [m, v] : entries_) s += v * v;
  return std::sqrt(s);
}

double PluckerCoords::coordinate(std::span<const int> rows, std::span<const int> cols) const {
  if (rows.size() != cols.size() || static_cast<int>(rows.size()) != degree_)
    throw std::invalid_argument("plucker coordinate needs " + std::to_string(degree_) + " (row, column) pairs");
  std::vector<int> idx;
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const int i = space_.index_of(rows[t], cols[t]);
    if (i < 0) return 0.0;
    idx.push_back(i);
  }
  int inv = 0;
  std::uint64_t mask = 0;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      if (idx[a] == idx[b]) return 0.0;
      inv += idx[a] > idx[b];
    }
    mask |= std::uint64_t{1} << idx[a];
  }
  const double v = at(mask);
  return inv % 2 ? -v : v;
}

double PluckerCoords::shorthand(std::span<const int> rows) const {
  std::vector<int> cols(rows.size());
  for (std::size_t t = 0; t < rows.size(); ++t) cols[t] = space_.split.k + 1 + static_cast<int>(t);
  return coordinate(rows, cols);
}

double PluckerCoords::diagonal_sum() const {
  double s = 0.0;
  std::vector<int> rows(degree_);
  for (int i = 1; i <= space_.split.k; ++i) {
    std::fill(rows.begin(), rows.end(), i);
    s += shorthand(rows);
  }
  return s;
}

PluckerCoords PluckerCoords::operator-() const {
  auto e = entries_;
  for (auto& x : e) x.second = -x.second;
  return {space_, degree_, std::move(e)};
}

PluckerCoords plucker_coords(const TangentPlane& plane, bool reorthonormalize, std::size_t max_entries) {
  Eigen::MatrixXd b = plane.basis;
  const int d = plane.space.dim();
  const int p = plane.degree();
  if (b.rows() != d) throw std::invalid_argument("plane basis does not match its tangent space");
  if (d > 64) throw std::length_error("plucker coordinates need a tangent space of dimension <= 64");
  if (!plane.orthonormal(1e-12)) {
    if (!reorthonormalize) throw std::invalid_argument("plucker_coords: plane basis is not orthonormal");
    if (!orthonormalize(b)) throw std::invalid_argument("plucker_coords: plane basis is degenerate");
  }
  double count = 1.0;
  for (int i = 0; i < p; ++i) count = count * (d - i) / (i + 1);
  if (count > static_cast<double>(max_entries)) throw std::length_error("plucker_coords: too many minors");
  std::vector<std::pair<std::uint64_t, double>> entries;
  entries.reserve(static_cast<std::size_t>(count));
  Eigen::MatrixXd sub(p, p);
  for_each_subset(d, p, [&](std::span<const int> rows) {
    std::uint64_t mask = 0;
    for (int r = 0; r < p; ++r) {
      sub.row(r) = b.row(rows[r]);
      mask |= std::uint64_t{1} << rows[r];
    }
    const double v = p == 0 ? 1.0 : sub.determinant();
    if (v != 0.0) entries.emplace_back(mask, v);
  });
  return {plane.space, p, std::move(entries)};
}

double plucker_residual(const PluckerCoords& coords) {
  const int p = coords.degree();
  const int d = coords.space().dim();
  if (p % 2 || 2 * p > d || p == 0) return 0.0;
  const auto& e = coords.entries();
  const double pairwise = 0.5 * static_cast<double>(e.size()) * static_cast<double>(e.size());
  double by_union = 1.0;
  for (int i = 0; i < 2 * p; ++i) by_union = by_union * (d - i) / (i + 1);
  double half = 1.0;
  for (int i = 0; i < p; ++i) half = half * (2 * p - i) / (i + 1);
  by_union *= half / 2;

  double sq = 0.0;
  if (pairwise <= by_union) {
    std::unordered_map<std::uint64_t, double> acc;
    for (std::size_t a = 0; a < e.size(); ++a)
      for (std::size_t b = a + 1; b < e.size(); ++b) {
        if (e[a].first & e[b].first) continue;
        // even degree: xi_S xi_T and xi_T xi_S contribute with the same sign
        acc[e[a].first | e[b].first] += 2.0 * merge_sign(e[a].first, e[b].first) * e[a].second * e[b].second;
      }
    for (const auto& [m, v] : acc) sq += v * v;
    return std::sqrt(sq);
  }
  std::unordered_map<std::uint64_t, double> lookup(e.begin(), e.end());
  auto value = [&](std::uint64_t m) {
    auto it = lookup.find(m);
    return it == lookup.end() ? 0.0 : it->second;
  };
  for_each_subset(d, 2 * p, [&](std::span<const int> u) {
    std::uint64_t all = 0;
    for (int x : u) all |= std::uint64_t{1} << x;
    double v = 0.0;
    // split u into S (containing u[0]) and T
    for_each_subset(2 * p - 1, p - 1, [&](std::span<const int> rest) {
      std::uint64_t s = std::uint64_t{1} << u[0];
      for (int r : rest) s |= std::uint64_t{1} << u[r + 1];
      const std::uint64_t t = all ^ s;
      const double xs = value(s);
      if (xs == 0.0) return;
      v += 2.0 * merge_sign(s, t) * xs * value(t);
    });
    sq += v * v;
  });
  return std::sqrt(sq);
}

// ---------------------------------------------------------------- sampling

TangentPlane random_tangent_plane(const TangentSpace& space, int degree, std::uint64_t seed) {
  if (degree < 0 || degree > space.dim())
    throw std::invalid_argument("random_tangent_plane: degree exceeds the tangent space dimension");
  std::mt19937_64 rng(derive_seed(seed, 0));
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(space.dim(), degree);
  for (int attempt = 0; attempt < 16; ++attempt) {
    for (int c = 0; c < degree; ++c)
      for (int r = 0; r < space.dim(); ++r) m(r, c) = g(rng);
    if (orthonormalize(m)) return {space, m};
  }
  throw std::runtime_error("random_tangent_plane: repeated degenerate samples");
}

TangentPlane random_tangent_plane(const Split& s, int degree, std::uint64_t seed) {
  return random_tangent_plane(TangentSpace::grassmann(s), degree, seed);
}

}  // namespace folcal::grassmann
