#pragma once

// Foliations of round spheres by great spheres and their volume: the mass of
// the Gauss section p -> T_p(leaf) in the Grassmann bundle with the Sasaki
// metric.
//
// Sasaki convention (the only place it lives): the vertical space at a plane
// D is Hom(D, D^perp) with the trace inner product, unscaled, so the section
// Jacobian is sqrt det(I + G), G_rs = <A(X_r), A(X_s)>, with A(X) the
// Hom(D, D^perp) part of the derivative of the plane field along X.

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace folcal::folvol {

struct FoliationModel {
  enum class Kind { Hopf, NS };
  Kind kind = Kind::Hopf;
  int leaf_dim = 1;    ///< fiber dimension (Hopf) or leaf dimension k (NS)
  int sphere_dim = 3;  ///< m, the sphere is S^m in R^{m+1}

  /// Hopf needs (1, odd m), (3, m = 3 mod 4) or (7, 15).
  static FoliationModel hopf(int fiber_dim, int m);
  /// All great k-spheres through the great (k-1)-sphere of span{e_1..e_k}; 1 <= k <= m-1.
  static FoliationModel ns(int k, int m);
  /// Named models pair Hopf and NS foliations of equal leaf dimension:
  /// hopf-s3 (1,3), hopf-s7 (3,7), hopf-s15 (7,15), ns-s3 (1,3), ns-s5 (1,5),
  /// ns-s7 (3,7), ns-s15 (7,15); general forms hopf-<d>-<m> and ns-<k>-<m>.
  /// Throws std::invalid_argument on anything else.
  static FoliationModel parse(const std::string& id);

  std::string id() const;
  int ambient() const { return sphere_dim + 1; }
};

/// Octonion product via Cayley-Dickson doubling of quaternions:
/// (a, b)(c, d) = (ac - conj(d) b, d a + b conj(c)), basis index c <-> e_c,
/// e_0..e_3 = (1, i, j, k; 0), e_4..e_7 = (0; 1, i, j, k).
using Octonion = std::array<double, 8>;
Octonion oct_mul(const Octonion& x, const Octonion& y);
Octonion oct_conj(const Octonion& x);
using Quaternion = std::array<double, 4>;
Quaternion quat_mul(const Quaternion& x, const Quaternion& y);

/// Orthogonal projector onto the (k+1)-dimensional linear span of the leaf through p.
Eigen::MatrixXd leaf_span_projector(const FoliationModel& model, const Eigen::VectorXd& p);

/// Distance from p to the singular locus (the axis sphere) for NS; +inf for Hopf.
double singular_distance(const FoliationModel& model, const Eigen::VectorXd& p);

/// Orthonormal frame of T_p(leaf), (m+1) x k. Hopf: imaginary units applied
/// to p. NS: projections of e_1..e_k, Gram-Schmidt, oriented toward +e_1.
/// Throws std::domain_error within 1e-9 of the singular locus.
Eigen::MatrixXd leaf_tangent(const FoliationModel& model, const Eigen::VectorXd& p);

/// sqrt det(I + G). The plane-field derivative is a central difference of the
/// projector along great circles exp_p(hX), refined by one Richardson step.
/// For NS the step is capped at 1% of the distance to the singular locus.
double gauss_jacobian(const FoliationModel& model, const Eigen::VectorXd& p, double h = 1e-5);

enum class QuadratureMethod { LatitudeProfile, MonteCarlo };

struct QuadratureSpec {
  QuadratureMethod method = QuadratureMethod::LatitudeProfile;
  int nodes = 48;                        ///< Gauss-Legendre nodes (profile)
  long samples = 200000;                 ///< Monte Carlo samples
  std::vector<double> eps = {1e-2, 1e-3, 1e-4, 1e-5};  ///< NS cutoffs
  std::uint64_t seed = 1;
  double h = 1e-5;
  int workers = 1;
};

struct EpsPoint {
  double eps = 0.0;
  double value = 0.0;
};

struct VolumeReport {
  FoliationModel model;
  QuadratureSpec spec;
  double value = 0.0;
  double error_estimate = 0.0;
  double quadrature_error = 0.0;      ///< node doubling (profile) or standard error (MC)
  double jacobian_error = 0.0;        ///< finite-difference step halving
  double cutoff_error = 0.0;          ///< epsilon extrapolation / omitted tube
  std::vector<EpsPoint> eps_sequence;  ///< NS only
  bool eps_converged = true;
  std::vector<std::pair<double, double>> jacobian_profile;  ///< (latitude, J)
  double base_volume = 0.0;            ///< vol(S^m)
};

VolumeReport foliation_volume(const FoliationModel& model, const QuadratureSpec& spec = {});

struct RatioReport {
  double ratio = 0.0;
  double error_estimate = 0.0;
  VolumeReport a;
  VolumeReport b;
};

RatioReport volume_ratio(const FoliationModel& a, const FoliationModel& b, const QuadratureSpec& spec = {});

struct ProfilePoint {
  double t = 0.0;  ///< geodesic distance from the singular sphere
  double jacobian = 0.0;
};

/// J along p(t) = cos t e_1 + sin t e_{k+1}, t_j = (pi/2) j / nodes, j = 1..nodes.
std::vector<ProfilePoint> ns_profile(const FoliationModel& model, int nodes, double h = 1e-5);

/// Point at distance t from the axis sphere: cos t y + sin t x with y in
/// span{e_1..e_k}, x in its complement (both unit).
Eigen::VectorXd ns_point(const FoliationModel& model, double t, const Eigen::VectorXd& y, const Eigen::VectorXd& x);

/// Volume of the unit sphere S^d.
double sphere_volume(int d);

/// Gauss-Legendre nodes and weights on [a, b].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n, double a, double b);

}  // namespace folcal::folvol
