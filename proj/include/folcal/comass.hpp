#pragma once

// Evaluation of invariant forms on decomposable tangent planes and numerical
// maximization over the unit decomposable set (orthonormal frames).

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "folcal/exalg.hpp"
#include "folcal/grassmann.hpp"

namespace folcal::comass {

using exalg::FormExpr;
using grassmann::TangentPlane;
using grassmann::TangentSpace;

/// A form pulled back to a tangent space, with floating coefficients:
/// value(V) = sum_terms c * det(V[rows, :]).
class NumericForm {
 public:
  NumericForm(const FormExpr& f, const TangentSpace& space);

  int degree() const { return degree_; }
  const TangentSpace& space() const { return space_; }
  std::size_t term_count() const { return coef_.size(); }

  double value(const Eigen::MatrixXd& basis) const;
  /// Euclidean gradient with respect to the basis entries.
  double value_and_gradient(const Eigen::MatrixXd& basis, Eigen::MatrixXd& grad) const;

 private:
  TangentSpace space_;
  int degree_ = 0;
  std::vector<int> rows_;  // degree_ rows per term
  std::vector<double> coef_;
};

struct TableRow {
  std::vector<int> rows;  ///< i_1..i_k' (U indices), in basis order
  std::vector<int> cols;  ///< k_1..k_k' (V indices), paired with rows
  PiScalar exact;
  double value = 0.0;
};

/// The form on every increasing k'-tuple of basis vectors E_ik of the
/// Grassmann tangent space, zeros included. Throws std::length_error above
/// `max_rows` tuples.
std::vector<TableRow> evaluation_table(const FormExpr& f, const TangentSpace& space, int degree,
                                       std::size_t max_rows = 2'000'000);

/// Throws std::invalid_argument on degree mismatch.
double evaluate_on_plane(const FormExpr& f, const TangentPlane& plane);
/// Exact value on a rational plane; the result is divided by sqrt(Gram det),
/// which must be a perfect rational square (std::domain_error otherwise).
PiScalar evaluate_on_plane(const FormExpr& f, const grassmann::ExactPlane& plane);

struct MaximizeOptions {
  int restarts = 64;
  std::uint64_t seed = 1;
  double tol = 1e-10;  ///< projected gradient norm at which a restart stops
  int max_iterations = 10000;
  int workers = 1;
};

struct ComassReport {
  std::string form_id;
  charforms::Split split;
  int degree = 0;
  double best_value = 0.0;
  TangentPlane argmax;
  std::optional<double> achiever_diagnostic;  ///< sum_i xi_{i..i} at the argmax, Grassmann space only
  std::optional<double> aligned_diagnostic;   ///< same after align_to_first_axis
  std::size_t best_restart = 0;
  std::vector<double> restart_values;
  long iterations = 0;
  int nonconverged = 0;    ///< restarts that hit the iteration cap
  bool monotone = true;    ///< no accepted step decreased the objective
  MaximizeOptions options;
};

/// Multi-start projected gradient ascent on the Stiefel manifold with
/// backtracking from step 1 and Gram-Schmidt retraction.
ComassReport maximize(const FormExpr& f, const TangentSpace& space, int degree, const MaximizeOptions& opt = {});

/// Rotates the U-block (an isometry of the tangent space preserving the
/// block-invariant forms) so that the dominant row direction of the plane,
/// the top eigenvector of sum_s X_s^T X_s with X_s in Hom(U, V), becomes e_1.
/// Planes of the form span{E_{x,m}} land on span{E_{1,m}}.
TangentPlane align_to_first_axis(const TangentPlane& plane);

struct SearchReport {
  double best_value = 0.0;
  long evaluations = 0;
};

/// Derivative-free oracle: random sampling followed by random-perturbation
/// hill climbing, `evaluations` form evaluations in total.
SearchReport random_search(const FormExpr& f, const TangentSpace& space, int degree, long evaluations,
                           std::uint64_t seed, int workers = 1);

struct BoundVerdict {
  bool pass = true;
  double bound = 0.0;
  double max_value = 0.0;
  std::size_t argmax_sample = 0;
  std::size_t samples = 0;
  double tolerance = 1e-9;
};

/// Fails iff some random decomposable unit plane evaluates above bound + tol.
BoundVerdict verify_bound(const FormExpr& f, const TangentSpace& space, int degree, double bound, std::size_t samples,
                          std::uint64_t seed, int workers = 1, double tol = 1e-9);

struct MixedPlaneSpec {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double theta3 = 0.0;
};

/// The 7-plane {cos t_i E_{1,i+1} + sin t_i E_{i+1,5}}_{i=1..3} + {E_15..E_18}
/// in the flag tangent space of (4,8).
TangentPlane mixed_plane(const MixedPlaneSpec& spec);

struct MixedRow {
  MixedPlaneSpec spec;
  double value = 0.0;   ///< Phi(W) with the supplied C
  double bound = 0.0;   ///< |cos(t1 + (t2 - t3))| * |Phi(W at t = 0)|
  bool ok = true;
};

struct MixedScan {
  std::vector<MixedRow> rows;
  double phi_at_zero = 0.0;
  double literal_scale = 0.0;  ///< C * 3/(2 pi^2), the printed right-hand factor
  double max_ratio = 0.0;      ///< max |Phi| / |Phi(0)| over the grid
  int violations = 0;
  bool all_ok() const { return violations == 0; }
};

/// Evaluates Phi = C Te ^ e(Omega*) on a grid x grid x grid scan of
/// [0, pi/2]^3 and checks the cosine bound pointwise (tolerance 1e-9).
MixedScan mixed_vertical_scan(int grid = 9, double comass_constant = 1.0);

}  // namespace folcal::comass
