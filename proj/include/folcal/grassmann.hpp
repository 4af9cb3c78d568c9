#pragma once

// Tangent planes to G(k,n) at W0 = span{e_1..e_k}, their Plucker coordinates,
// and the special planes singled out by the calibration argument.
//
// T(G(k,n), W0) is modelled by span{E_im : i <= k < m} with the E_im
// orthonormal. The flag variant adds the vertical directions E_1j, 2 <= j <= k,
// of F(1,k,n) -> G(k,n) at x0 = (e_1, W0).

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "folcal/charforms.hpp"
#include "folcal/exalg.hpp"

namespace folcal::grassmann {

using charforms::Split;

/// Ordered list of coframe generators spanning a tangent space.
struct TangentSpace {
  Split split;
  std::vector<int> positions;  ///< generator positions, basis order

  static TangentSpace grassmann(const Split& s);
  static TangentSpace flag(const Split& s);

  int dim() const { return static_cast<int>(positions.size()); }
  /// Basis index of generator position `pos`, or -1 if not in the space.
  int index_of(int pos) const;
  /// Basis index of E_ab (a < b required), or -1.
  int index_of(int a, int b) const;
  exalg::GenIndex generator(int idx) const { return exalg::GenIndex::from_position(split.n, positions[idx]); }
  friend bool operator==(const TangentSpace&, const TangentSpace&) = default;
};

/// k orthonormal vectors in R^n, stored as columns.
struct Frame {
  Eigen::MatrixXd vectors;

  int ambient() const { return static_cast<int>(vectors.rows()); }
  int rank() const { return static_cast<int>(vectors.cols()); }
  bool orthonormal(double tol = 1e-12) const;
};

/// Modified Gram-Schmidt on the columns. Returns false if some column is
/// (numerically) dependent on the previous ones.
bool orthonormalize(Eigen::MatrixXd& m, double tol = 1e-10);

/// A decomposable tangent k'-plane, given by an orthonormal basis (columns)
/// in the coordinates of `space`.
struct TangentPlane {
  TangentSpace space;
  Eigen::MatrixXd basis;

  int degree() const { return static_cast<int>(basis.cols()); }
  bool orthonormal(double tol = 1e-12) const;
};

/// Hand-constructed plane with exact rational spanning vectors. The vectors
/// need not be unit or orthogonal; evaluations divide by sqrt(Gram det).
struct ExactPlane {
  TangentSpace space;
  std::vector<std::vector<Rational>> vectors;

  int degree() const { return static_cast<int>(vectors.size()); }
  Rational gram_determinant() const;
  std::vector<exalg::DualVector> dual_vectors() const;
  TangentPlane to_numeric() const;
};

/// Coefficients of b_1 ^ ... ^ b_k' in the basis of increasing
/// E-index subsets. Keys are bit masks over basis indices.
class PluckerCoords {
 public:
  PluckerCoords() = default;
  PluckerCoords(TangentSpace space, int degree, std::vector<std::pair<std::uint64_t, double>> entries);

  const TangentSpace& space() const { return space_; }
  int degree() const { return degree_; }
  const std::vector<std::pair<std::uint64_t, double>>& entries() const { return entries_; }
  double at(std::uint64_t mask) const;
  double norm() const;

  /// Coefficient of E_{rows[0] cols[0]} ^ ... in this order, i.e. the full
  /// multi-index xi_{i1..ik', m1..mk'}; sign-adjusted, 0 on repeats.
  double coordinate(std::span<const int> rows, std::span<const int> cols) const;
  /// xi_{i1..ik'} with columns k+1..k+k' implied.
  double shorthand(std::span<const int> rows) const;
  /// sum_i xi_{i,i,..,i} over the U-block (the achiever condition).
  double diagonal_sum() const;

  PluckerCoords operator-() const;

 private:
  TangentSpace space_;
  int degree_ = 0;
  std::vector<std::pair<std::uint64_t, double>> entries_;  // sorted by mask
};

/// Throws std::invalid_argument for a non-orthonormal plane unless
/// `reorthonormalize` is set, and std::length_error above `max_entries` minors.
PluckerCoords plucker_coords(const TangentPlane& plane, bool reorthonormalize = false,
                             std::size_t max_entries = 5'000'000);

/// |xi ^ xi| (Euclidean). Vanishes on decomposable xi; for k' > 2 this is a
/// necessary condition only.
double plucker_residual(const PluckerCoords& coords);

/// Gaussian columns orthonormalized; deterministic per seed.
TangentPlane random_tangent_plane(const TangentSpace& space, int degree, std::uint64_t seed);
TangentPlane random_tangent_plane(const Split& s, int degree, std::uint64_t seed);

/// Tangent plane at W0 to the quaternionic line family of split (4,8): the
/// maps x -> x q for q in {1, i, j, k}, W0 = H identified with R^4.
ExactPlane quaternionic_tangent_plane(const Split& s);
/// Same with left multiplication x -> q x.
ExactPlane quaternionic_tangent_plane_left(const Split& s);
/// Complex line tangent plane in split (2,n), n >= 4: spanned by
/// E_13 + E_24 and E_14 - E_23.
ExactPlane complex_tangent_plane(const Split& s);
/// span{E_{1,k+1}, ..., E_{1,n}}: only the first axis moves. U-rank in {2,4,8}.
ExactPlane axis_sphere_family_plane(const Split& s);
/// Plane spanned by the listed E_ab (each a <= k < b).
ExactPlane coordinate_plane(const TangentSpace& space, std::span<const std::pair<int, int>> gens);

/// Product of quaternion basis units (0..3 = 1, i, j, k): e_a e_b = sign e_c.
/// Returns c and stores the sign.
int quaternion_unit_product(int a, int b, int& sign);

/// Calls f(indices) for every increasing `size`-subset of 0..count-1.
void for_each_subset(int count, int size, const std::function<void(std::span<const int>)>& f);

}  // namespace folcal::grassmann
