#include "folcal/comass.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "folcal/charforms.hpp"
#include "folcal/parallel.hpp"
#include "folcal/rng.hpp"

namespace folcal::comass {

NumericForm::NumericForm(const FormExpr& f, const TangentSpace& space) : space_(space) {
  if (f.rank() != space.split.n) throw std::invalid_argument("form rank does not match the tangent space");
  if (f.is_zero()) return;
  const auto deg = f.degree();
  if (!deg) throw std::invalid_argument("NumericForm: form is not homogeneous");
  degree_ = *deg;
  std::vector<int> lookup(exalg::generator_count(space.split.n), -1);
  for (int r = 0; r < space.dim(); ++r) lookup[space.positions[r]] = r;
  for (const auto& [m, c] : f.terms()) {
    std::vector<int> rows;
    bool inside = true;
    m.for_each([&](int pos) {
      rows.push_back(lookup[pos]);
      inside = inside && lookup[pos] >= 0;
    });
    if (!inside) continue;  // pulls back to zero on this tangent space
    rows_.insert(rows_.end(), rows.begin(), rows.end());
    coef_.push_back(c.to_double());
  }
}

double NumericForm::value(const Eigen::MatrixXd& basis) const {
  if (basis.cols() != degree_ && !coef_.empty())
    throw std::invalid_argument("evaluate: plane rank does not match form degree");
  const int p = degree_;
  Eigen::MatrixXd sub(p, p);
  double s = 0.0;
  for (std::size_t t = 0; t < coef_.size(); ++t) {
    for (int r = 0; r < p; ++r) sub.row(r) = basis.row(rows_[t * p + r]);
    s += coef_[t] * (p == 0 ? 1.0 : sub.determinant());
  }
  return s;
}

namespace {

// Cofactor matrix of a small square matrix.
Eigen::MatrixXd cofactors(const Eigen::MatrixXd& m) {
  const int p = static_cast<int>(m.rows());
  Eigen::MatrixXd c(p, p);
  if (p == 1) {
    c(0, 0) = 1.0;
    return c;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  if (lu.rank() == p) {
    c = lu.determinant() * lu.inverse().transpose();
    if (std::abs(lu.determinant()) > 1e-6) return c;
  }
  Eigen::MatrixXd minor(p - 1, p - 1);
  for (int r = 0; r < p; ++r)
    for (int q = 0; q < p; ++q) {
      for (int a = 0, ra = 0; a < p; ++a) {
        if (a == r) continue;
        for (int b = 0, cb = 0; b < p; ++b) {
          if (b == q) continue;
          minor(ra, cb++) = m(a, b);
        }
        ++ra;
      }
      c(r, q) = ((r + q) % 2 ? -1.0 : 1.0) * minor.determinant();
    }
  return c;
}

}  // namespace

double NumericForm::value_and_gradient(const Eigen::MatrixXd& basis, Eigen::MatrixXd& grad) const {
  const int p = degree_;
  grad = Eigen::MatrixXd::Zero(basis.rows(), basis.cols());
  if (coef_.empty()) return 0.0;
  if (basis.cols() != p) throw std::invalid_argument("evaluate: plane rank does not match form degree");
  Eigen::MatrixXd sub(p, p);
  double s = 0.0;
  for (std::size_t t = 0; t < coef_.size(); ++t) {
    const int* rows = &rows_[t * p];
    for (int r = 0; r < p; ++r) sub.row(r) = basis.row(rows[r]);
    s += coef_[t] * sub.determinant();
    const Eigen::MatrixXd c = cofactors(sub);
    for (int r = 0; r < p; ++r) grad.row(rows[r]) += coef_[t] * c.row(r);
  }
  return s;
}

double evaluate_on_plane(const FormExpr& f, const TangentPlane& plane) {
  if (f.is_zero()) return 0.0;
  NumericForm nf(f, plane.space);
  if (nf.degree() != plane.degree()) throw std::invalid_argument("evaluate_on_plane: degree mismatch");
  return nf.value(plane.basis);
}

std::vector<TableRow> evaluation_table(const FormExpr& f, const TangentSpace& space, int degree, std::size_t max_rows) {
  if (degree < 0 || degree > space.dim()) throw std::invalid_argument("evaluation_table: bad degree");
  double count = 1.0;
  for (int r = 0; r < degree; ++r) count = count * (space.dim() - r) / (r + 1);
  if (count > static_cast<double>(max_rows)) throw std::length_error("evaluation_table: too many tuples");
  if (!f.is_zero() && f.degree() != degree) throw std::invalid_argument("evaluation_table: degree mismatch");
  std::vector<TableRow> out;
  out.reserve(static_cast<std::size_t>(count));
  std::vector<exalg::DualVector> dv;
  grassmann::for_each_subset(space.dim(), degree, [&](std::span<const int> idx) {
    TableRow row;
    dv.clear();
    for (int b : idx) {
      const auto g = space.generator(b);
      row.rows.push_back(g.i);
      row.cols.push_back(g.j);
      dv.push_back(exalg::DualVector::basis(space.split.n, g.i, g.j));
    }
    row.exact = exalg::evaluate(f, dv);
    row.value = row.exact.to_double();
    out.push_back(std::move(row));
  });
  return out;
}

PiScalar evaluate_on_plane(const FormExpr& f, const grassmann::ExactPlane& plane) {
  if (f.is_zero()) return PiScalar{};
  if (f.degree() != plane.degree()) throw std::invalid_argument("evaluate_on_plane: degree mismatch");
  const auto dv = plane.dual_vectors();
  PiScalar raw = exalg::evaluate(f, dv);
  Rational root;
  if (!exact_sqrt(plane.gram_determinant(), root) || root.is_zero())
    throw std::domain_error("evaluate_on_plane: Gram determinant is not a nonzero rational square");
  return raw * PiScalar(Rational(1) / root);
}

// ---------------------------------------------------------------- maximize

namespace {

Eigen::MatrixXd project_tangent(const Eigen::MatrixXd& v, const Eigen::MatrixXd& g) {
  const Eigen::MatrixXd vg = v.transpose() * g;
  return g - v * (0.5 * (vg + vg.transpose()));
}

Eigen::MatrixXd retract(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd q = m;
  if (!grassmann::orthonormalize(q, 1e-14)) {
    // a full step collapsed the frame; fall back to a thin QR
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    q = qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
  }
  return q;
}

struct AscentResult {
  double value = 0.0;
  Eigen::MatrixXd basis;
  long iterations = 0;
  bool converged = false;
  bool monotone = true;
};

AscentResult ascend(const NumericForm& nf, Eigen::MatrixXd v, const MaximizeOptions& opt) {
  AscentResult out;
  Eigen::MatrixXd grad;
  double f = nf.value_and_gradient(v, grad);
  for (int it = 0; it < opt.max_iterations; ++it) {
    const Eigen::MatrixXd dir = project_tangent(v, grad);
    const double gn2 = dir.squaredNorm();
    if (std::sqrt(gn2) <= opt.tol) {
      out.converged = true;
      break;
    }
    double step = 1.0;
    bool accepted = false;
    while (step > 1e-16) {
      Eigen::MatrixXd cand = retract(v + step * dir);
      const double fc = nf.value(cand);
      if (fc >= f + 1e-4 * step * gn2) {
        if (fc < f) out.monotone = false;
        v = std::move(cand);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++out.iterations;
    if (!accepted) {
      // no ascent step left at double precision: numerically stationary
      out.converged = true;
      break;
    }
    f = nf.value_and_gradient(v, grad);
  }
  out.value = f;
  out.basis = std::move(v);
  return out;
}

}  // namespace

ComassReport maximize(const FormExpr& f, const TangentSpace& space, int degree, const MaximizeOptions& opt) {
  if (degree < 1 || degree > space.dim()) throw std::invalid_argument("maximize: degree exceeds tangent space dimension");
  if (opt.restarts < 1) throw std::invalid_argument("maximize: need at least one restart");
  NumericForm nf(f, space);
  if (!f.is_zero() && nf.degree() != degree) throw std::invalid_argument("maximize: degree mismatch");
  std::vector<AscentResult> results(opt.restarts);
  parallel_for(results.size(), opt.workers, [&](std::size_t r) {
    auto start = grassmann::random_tangent_plane(space, degree, derive_seed(opt.seed, r));
    results[r] = ascend(nf, start.basis, opt);
  });
  ComassReport rep;
  rep.split = space.split;
  rep.degree = degree;
  rep.options = opt;
  std::size_t best = 0;
  for (std::size_t r = 0; r < results.size(); ++r) {
    rep.restart_values.push_back(results[r].value);
    rep.iterations += results[r].iterations;
    rep.nonconverged += !results[r].converged;
    rep.monotone = rep.monotone && results[r].monotone;
    if (results[r].value > results[best].value) best = r;  // ties keep the lowest index
  }
  rep.best_restart = best;
  rep.best_value = results[best].value;
  rep.argmax = {space, results[best].basis};
  const bool grassmann_space = space == TangentSpace::grassmann(space.split);
  if (grassmann_space && degree <= space.split.v_rank()) {
    try {
      rep.achiever_diagnostic = grassmann::plucker_coords(rep.argmax, true).diagonal_sum();
      rep.aligned_diagnostic = grassmann::plucker_coords(align_to_first_axis(rep.argmax), true).diagonal_sum();
    } catch (const std::length_error&) {
    }
  }
  return rep;
}

TangentPlane align_to_first_axis(const TangentPlane& plane) {
  const auto& sp = plane.space;
  const int k = sp.split.k, v = sp.split.v_rank();
  if (!(sp == TangentSpace::grassmann(sp.split))) throw std::invalid_argument("align_to_first_axis: Grassmann space only");
  auto as_matrix = [&](const Eigen::VectorXd& col) {
    Eigen::MatrixXd x(v, k);
    for (int i = 1; i <= k; ++i)
      for (int m = k + 1; m <= sp.split.n; ++m) x(m - k - 1, i - 1) = col(sp.index_of(i, m));
    return x;
  };
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(k, k);
  for (int s = 0; s < plane.degree(); ++s) {
    const Eigen::MatrixXd x = as_matrix(plane.basis.col(s));
    gram += x.transpose() * x;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  Eigen::VectorXd axis = es.eigenvectors().col(k - 1);
  // Householder reflection axis -> e_1, then flip e_2 to stay in SO(k)
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(k);
  e1(0) = 1.0;
  Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(k, k);
  const Eigen::VectorXd w = axis - e1;
  if (w.norm() > 1e-14) rot -= 2.0 * w * w.transpose() / w.squaredNorm();
  if (w.norm() > 1e-14 && k >= 2) rot.row(1) *= -1.0;
  TangentPlane out = plane;
  for (int s = 0; s < plane.degree(); ++s) {
    const Eigen::MatrixXd x = as_matrix(plane.basis.col(s)) * rot.transpose();
    for (int i = 1; i <= k; ++i)
      for (int m = k + 1; m <= sp.split.n; ++m) out.basis(sp.index_of(i, m), s) = x(m - k - 1, i - 1);
  }
  return out;
}

SearchReport random_search(const FormExpr& f, const TangentSpace& space, int degree, long evaluations,
                           std::uint64_t seed, int workers) {
  NumericForm nf(f, space);
  constexpr int kChains = 8;
  const long per_chain = std::max<long>(evaluations / kChains, 2);
  std::vector<double> best(kChains, -INFINITY);
  parallel_for(kChains, workers, [&](std::size_t c) {
    std::mt19937_64 rng(derive_seed(seed ^ 0x5EA2C4ull, c));
    std::normal_distribution<double> g;
    const long explore = per_chain / 10;
    Eigen::MatrixXd v;
    double fv = -INFINITY;
    long used = 0;
    for (; used < explore; ++used) {
      auto p = grassmann::random_tangent_plane(space, degree, rng());
      const double x = nf.value(p.basis);
      if (x > fv) {
        fv = x;
        v = p.basis;
      }
    }
    double sigma = 0.3;
    Eigen::MatrixXd noise(v.rows(), v.cols());
    for (; used < per_chain; ++used) {
      for (int a = 0; a < noise.rows(); ++a)
        for (int b = 0; b < noise.cols(); ++b) noise(a, b) = g(rng);
      Eigen::MatrixXd cand = v + sigma * noise;
      if (!grassmann::orthonormalize(cand)) continue;
      const double x = nf.value(cand);
      if (x > fv) {
        fv = x;
        v = std::move(cand);
        sigma *= 1.5;
      } else {
        sigma *= 0.95;
      }
      sigma = std::clamp(sigma, 1e-9, 1.0);
    }
    best[c] = fv;
  });
  SearchReport rep;
  rep.evaluations = per_chain * kChains;
  rep.best_value = *std::max_element(best.begin(), best.end());
  return rep;
}

BoundVerdict verify_bound(const FormExpr& f, const TangentSpace& space, int degree, double bound, std::size_t samples,
                          std::uint64_t seed, int workers, double tol) {
  BoundVerdict v;
  v.bound = bound;
  v.samples = samples;
  v.tolerance = tol;
  if (f.is_zero()) {
    v.pass = 0.0 <= bound + tol;
    return v;
  }
  NumericForm nf(f, space);
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<std::pair<double, std::size_t>> chunk_max(chunks, {-INFINITY, 0});
  parallel_for(chunks, workers, [&](std::size_t c) {
    const std::size_t lo = c * kChunk, hi = std::min(samples, lo + kChunk);
    for (std::size_t i = lo; i < hi; ++i) {
      const auto p = grassmann::random_tangent_plane(space, degree, derive_seed(seed, i));
      const double x = nf.value(p.basis);
      if (x > chunk_max[c].first) chunk_max[c] = {x, i};
    }
  });
  v.max_value = -INFINITY;
  for (const auto& [x, i] : chunk_max)
    if (x > v.max_value) {
      v.max_value = x;
      v.argmax_sample = i;
    }
  v.pass = v.max_value <= bound + tol;
  return v;
}

// ---------------------------------------------------------------- mixed planes

TangentPlane mixed_plane(const MixedPlaneSpec& spec) {
  const charforms::Split s(4, 8);
  const auto space = TangentSpace::flag(s);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(space.dim(), 7);
  const double th[3] = {spec.theta1, spec.theta2, spec.theta3};
  for (int i = 0; i < 3; ++i) {
    b(space.index_of(1, i + 2), i) = std::cos(th[i]);
    b(space.index_of(i + 2, 5), i) = std::sin(th[i]);
  }
  for (int c = 0; c < 4; ++c) b(space.index_of(1, 5 + c), 3 + c) = 1.0;
  return {space, b};
}

MixedScan mixed_vertical_scan(int grid, double comass_constant) {
  if (grid < 2) throw std::invalid_argument("mixed_vertical_scan: grid needs at least 2 points per axis");
  const charforms::Split s(4, 8);
  const auto phi = charforms::calibration_phi(s, comass_constant);
  const NumericForm nf(ScalarPi{Rational(1)} * phi.form, TangentSpace::flag(s));
  MixedScan out;
  out.phi_at_zero = comass_constant * nf.value(mixed_plane({}).basis);
  out.literal_scale = comass_constant * 1.5 / (std::numbers::pi * std::numbers::pi);
  const double h = std::numbers::pi / 2 / (grid - 1);
  for (int a = 0; a < grid; ++a)
    for (int b = 0; b < grid; ++b)
      for (int c = 0; c < grid; ++c) {
        MixedRow row;
        row.spec = {a * h, b * h, c * h};
        row.value = comass_constant * nf.value(mixed_plane(row.spec).basis);
        row.bound = std::abs(std::cos(row.spec.theta1 + (row.spec.theta2 - row.spec.theta3))) * std::abs(out.phi_at_zero);
        row.ok = std::abs(row.value) <= row.bound + 1e-9;
        out.violations += !row.ok;
        out.max_ratio = std::max(out.max_ratio, std::abs(row.value) / std::abs(out.phi_at_zero));
        out.rows.push_back(row);
      }
  return out;
}

}  // namespace folcal::comass
