#include "folcal/folvol.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <regex>
#include <stdexcept>

#include "folcal/parallel.hpp"
#include "folcal/rng.hpp"

namespace folcal::folvol {

namespace {

constexpr double kPi = std::numbers::pi;

void require_unit(const FoliationModel& model, const Eigen::VectorXd& p) {
  if (p.size() != model.ambient()) throw std::invalid_argument("point has the wrong dimension for " + model.id());
  if (std::abs(p.norm() - 1.0) > 1e-9) throw std::invalid_argument("point is not on the unit sphere");
}

}  // namespace

FoliationModel FoliationModel::hopf(int fiber_dim, int m) {
  const bool ok = (fiber_dim == 1 && m >= 1 && m % 2 == 1) || (fiber_dim == 3 && m >= 3 && m % 4 == 3) ||
                  (fiber_dim == 7 && m == 15);
  if (!ok)
    throw std::invalid_argument("no Hopf fibration of S^" + std::to_string(m) + " by great " +
                                std::to_string(fiber_dim) + "-spheres");
  return {Kind::Hopf, fiber_dim, m};
}

FoliationModel FoliationModel::ns(int k, int m) {
  if (k < 1 || k > m - 1) throw std::invalid_argument("NS foliation needs 1 <= k <= m-1");
  return {Kind::NS, k, m};
}

FoliationModel FoliationModel::parse(const std::string& id) {
  if (id == "hopf-s3") return hopf(1, 3);
  if (id == "hopf-s7") return hopf(3, 7);
  if (id == "hopf-s15") return hopf(7, 15);
  if (id == "ns-s3") return ns(1, 3);
  if (id == "ns-s5") return ns(1, 5);
  if (id == "ns-s7") return ns(3, 7);
  if (id == "ns-s15") return ns(7, 15);
  static const std::regex general(R"((hopf|ns)-(\d+)-(\d+))");
  std::smatch mt;
  if (std::regex_match(id, mt, general)) {
    const int a = std::stoi(mt[2]), b = std::stoi(mt[3]);
    return mt[1] == "hopf" ? hopf(a, b) : ns(a, b);
  }
  throw std::invalid_argument("unknown foliation model '" + id + "'");
}

std::string FoliationModel::id() const {
  return std::string(kind == Kind::Hopf ? "hopf-" : "ns-") + std::to_string(leaf_dim) + "-" + std::to_string(sphere_dim);
}

// ---------------------------------------------------------------- algebra

Quaternion quat_mul(const Quaternion& x, const Quaternion& y) {
  return {x[0] * y[0] - x[1] * y[1] - x[2] * y[2] - x[3] * y[3],
          x[0] * y[1] + x[1] * y[0] + x[2] * y[3] - x[3] * y[2],
          x[0] * y[2] - x[1] * y[3] + x[2] * y[0] + x[3] * y[1],
          x[0] * y[3] + x[1] * y[2] - x[2] * y[1] + x[3] * y[0]};
}

namespace {

Quaternion qconj(const Quaternion& x) { return {x[0], -x[1], -x[2], -x[3]}; }

}  // namespace

Octonion oct_conj(const Octonion& x) {
  Octonion r;
  r[0] = x[0];
  for (int c = 1; c < 8; ++c) r[c] = -x[c];
  return r;
}

Octonion oct_mul(const Octonion& x, const Octonion& y) {
  const Quaternion a{x[0], x[1], x[2], x[3]}, b{x[4], x[5], x[6], x[7]};
  const Quaternion c{y[0], y[1], y[2], y[3]}, d{y[4], y[5], y[6], y[7]};
  const Quaternion ac = quat_mul(a, c), db = quat_mul(qconj(d), b);
  const Quaternion da = quat_mul(d, a), bc = quat_mul(b, qconj(c));
  Octonion r;
  for (int t = 0; t < 4; ++t) {
    r[t] = ac[t] - db[t];
    r[4 + t] = da[t] + bc[t];
  }
  return r;
}

// ---------------------------------------------------------------- leaves

namespace {

// Orthonormal basis of the leaf span through p, as columns.
Eigen::MatrixXd hopf_span(const FoliationModel& model, const Eigen::VectorXd& p) {
  const int n = model.ambient();
  const int f = model.leaf_dim;
  Eigen::MatrixXd b(n, f + 1);
  b.col(0) = p;
  if (f == 1) {
    for (int a = 0; a < n; a += 2) {
      b(a, 1) = -p(a + 1);
      b(a + 1, 1) = p(a);
    }
  } else if (f == 3) {
    for (int u = 1; u <= 3; ++u) {
      Quaternion e{0, 0, 0, 0};
      e[u] = 1.0;
      for (int blk = 0; blk < n; blk += 4) {
        const Quaternion x{p(blk), p(blk + 1), p(blk + 2), p(blk + 3)};
        const Quaternion y = quat_mul(e, x);
        for (int t = 0; t < 4; ++t) b(blk + t, u) = y[t];
      }
    }
  } else {
    // W = {(x, m x)} with m = b a^{-1}, or {(m' y, y)} with m' = a b^{-1}
    Octonion a, c;
    for (int t = 0; t < 8; ++t) {
      a[t] = p(t);
      c[t] = p(8 + t);
    }
    const double na = std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0));
    const double nc = std::sqrt(std::inner_product(c.begin(), c.end(), c.begin(), 0.0));
    const bool first = na >= nc;
    const Octonion& num = first ? c : a;
    const Octonion& den = first ? a : c;
    const double dd = first ? na * na : nc * nc;
    Octonion inv = oct_conj(den);
    for (double& v : inv) v /= dd;
    const Octonion mult = oct_mul(num, inv);
    double mm = 0.0;
    for (double v : mult) mm += v * v;
    const double scale = 1.0 / std::sqrt(1.0 + mm);
    Eigen::MatrixXd w(16, 8);
    for (int e = 0; e < 8; ++e) {
      Octonion x{};
      x[e] = 1.0;
      const Octonion y = oct_mul(mult, x);
      for (int t = 0; t < 8; ++t) {
        w(first ? t : 8 + t, e) = x[t] * scale;
        w(first ? 8 + t : t, e) = y[t] * scale;
      }
    }
    return w;
  }
  return b;
}

}  // namespace

double singular_distance(const FoliationModel& model, const Eigen::VectorXd& p) {
  if (model.kind == FoliationModel::Kind::Hopf) return std::numeric_limits<double>::infinity();
  const int k = model.leaf_dim;
  return std::atan2(p.tail(p.size() - k).norm(), p.head(k).norm());
}

Eigen::MatrixXd leaf_span_projector(const FoliationModel& model, const Eigen::VectorXd& p) {
  const int n = model.ambient();
  if (model.kind == FoliationModel::Kind::Hopf) {
    const Eigen::MatrixXd b = hopf_span(model, p);
    return b * b.transpose();
  }
  const int k = model.leaf_dim;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  u.tail(n - k) = p.tail(n - k);
  const double len = u.norm();
  if (!(len > 0.0)) throw std::domain_error("point lies on the singular sphere");
  u /= len;
  Eigen::MatrixXd q = u * u.transpose();
  for (int i = 0; i < k; ++i) q(i, i) += 1.0;
  return q;
}

Eigen::MatrixXd leaf_tangent(const FoliationModel& model, const Eigen::VectorXd& p) {
  require_unit(model, p);
  const int n = model.ambient();
  const int k = model.leaf_dim;
  Eigen::MatrixXd f(n, k);
  if (model.kind == FoliationModel::Kind::Hopf) {
    if (k == 7) {
      const Eigen::MatrixXd w = hopf_span(model, p);
      Eigen::MatrixXd proj = w - p * (p.transpose() * w);
      // drop the column most aligned with p, then orthonormalize
      Eigen::VectorXd along = (p.transpose() * w).transpose().cwiseAbs();
      int drop = 0;
      along.maxCoeff(&drop);
      for (int c = 0, o = 0; c < 8; ++c)
        if (c != drop) f.col(o++) = proj.col(c);
    } else {
      f = hopf_span(model, p).rightCols(k);
    }
  } else {
    if (singular_distance(model, p) < 1e-9) throw std::domain_error("point is within 1e-9 of the singular sphere");
    for (int i = 0; i < k; ++i) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e(i) = 1.0;
      f.col(i) = e - p(i) * p;
    }
  }
  for (int c = 0; c < k; ++c) {
    for (int pass = 0; pass < 2; ++pass)
      for (int q = 0; q < c; ++q) f.col(c) -= f.col(q).dot(f.col(c)) * f.col(q);
    f.col(c).normalize();
  }
  return f;
}

// ---------------------------------------------------------------- Jacobian

namespace {

// Columns 1..m of a Householder reflection sending e_0 to p: an orthonormal
// basis of T_p S^m.
Eigen::MatrixXd tangent_basis(const Eigen::VectorXd& p) {
  const int n = static_cast<int>(p.size());
  Eigen::VectorXd v = p;
  v(0) -= 1.0;
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  if (v.norm() > 1e-14) h -= 2.0 * v * v.transpose() / v.squaredNorm();
  return h.rightCols(n - 1);
}

Eigen::MatrixXd dprojector(const FoliationModel& model, const Eigen::VectorXd& p, const Eigen::VectorXd& x, double h) {
  auto at = [&](double s) {
    const Eigen::VectorXd q = std::cos(s) * p + std::sin(s) * x;
    return leaf_span_projector(model, q);
  };
  const Eigen::MatrixXd d1 = (at(h) - at(-h)) / (2 * h);
  const Eigen::MatrixXd d2 = (at(h / 2) - at(-h / 2)) / h;
  return (4.0 * d2 - d1) / 3.0;
}

}  // namespace

double gauss_jacobian(const FoliationModel& model, const Eigen::VectorXd& p, double h) {
  require_unit(model, p);
  const double dist = singular_distance(model, p);
  if (dist < 1e-9) throw std::domain_error("point is within 1e-9 of the singular sphere");
  if (!(h > 0.0)) throw std::invalid_argument("difference step must be positive");
  const double step = std::min(h, 0.01 * dist);
  const int n = model.ambient();
  const int m = model.sphere_dim;
  const Eigen::MatrixXd q = leaf_span_projector(model, p);
  const Eigen::MatrixXd f = leaf_tangent(model, p);
  const Eigen::MatrixXd perp = Eigen::MatrixXd::Identity(n, n) - q;
  const Eigen::MatrixXd tb = tangent_basis(p);
  Eigen::MatrixXd a(n * model.leaf_dim, m);
  for (int r = 0; r < m; ++r) {
    const Eigen::MatrixXd ax = perp * dprojector(model, p, tb.col(r), step) * f;
    a.col(r) = Eigen::Map<const Eigen::VectorXd>(ax.data(), ax.size());
  }
  const Eigen::MatrixXd g = Eigen::MatrixXd::Identity(m, m) + a.transpose() * a;
  const double det = g.ldlt().vectorD().array().log().sum();
  return std::exp(0.5 * det);
}

// ---------------------------------------------------------------- quadrature

double sphere_volume(int d) { return 2.0 * std::pow(kPi, (d + 1) / 2.0) / std::tgamma((d + 1) / 2.0); }

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  // Golub-Welsch: eigenvalues of the Jacobi matrix of the Legendre recurrence
  Eigen::MatrixXd jm = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double beta = i / std::sqrt(4.0 * i * i - 1.0);
    jm(i, i - 1) = jm(i - 1, i) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jm);
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    const double v = es.eigenvectors()(0, i);
    x[i] = 0.5 * (b - a) * es.eigenvalues()(i) + 0.5 * (b + a);
    w[i] = (b - a) * v * v;
  }
  return {x, w};
}

Eigen::VectorXd ns_point(const FoliationModel& model, double t, const Eigen::VectorXd& y, const Eigen::VectorXd& x) {
  const int k = model.leaf_dim;
  Eigen::VectorXd p(model.ambient());
  p.head(k) = std::cos(t) * y;
  p.tail(model.ambient() - k) = std::sin(t) * x;
  return p;
}

std::vector<ProfilePoint> ns_profile(const FoliationModel& model, int nodes, double h) {
  if (model.kind != FoliationModel::Kind::NS) throw std::invalid_argument("ns_profile needs an NS model");
  const int k = model.leaf_dim, n = model.ambient();
  Eigen::VectorXd y = Eigen::VectorXd::Zero(k), x = Eigen::VectorXd::Zero(n - k);
  y(0) = 1.0;
  x(0) = 1.0;
  std::vector<ProfilePoint> out;
  for (int j = 1; j <= nodes; ++j) {
    const double t = kPi / 2 * j / nodes;
    out.push_back({t, gauss_jacobian(model, ns_point(model, t, y, x), h)});
  }
  return out;
}

namespace {

// Latitude integrand: NS in the distance t, Hopf in the polar angle from e_0.
struct Profile {
  const FoliationModel& model;
  double h;
  double prefactor() const {
    if (model.kind == FoliationModel::Kind::Hopf) return sphere_volume(model.sphere_dim - 1);
    return sphere_volume(model.leaf_dim - 1) * sphere_volume(model.sphere_dim - model.leaf_dim);
  }
  double jacobian(double t, double step) const {
    const int n = model.ambient();
    if (model.kind == FoliationModel::Kind::Hopf) {
      Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
      p(0) = std::cos(t);
      p(1) = std::sin(t);
      return gauss_jacobian(model, p, step);
    }
    const int k = model.leaf_dim;
    Eigen::VectorXd y = Eigen::VectorXd::Zero(k), x = Eigen::VectorXd::Zero(n - k);
    y(0) = 1.0;
    x(0) = 1.0;
    return gauss_jacobian(model, ns_point(model, t, y, x), step);
  }
  double measure(double t) const {
    if (model.kind == FoliationModel::Kind::Hopf) return std::pow(std::sin(t), model.sphere_dim - 1);
    return std::pow(std::cos(t), model.leaf_dim - 1) * std::pow(std::sin(t), model.sphere_dim - model.leaf_dim);
  }
};

double profile_integral(const Profile& pr, int nodes, double a, double b, double step, int workers,
                        std::vector<std::pair<double, double>>* samples) {
  auto [x, w] = gauss_legendre(nodes, a, b);
  std::vector<double> terms(nodes), js(nodes);
  parallel_for(nodes, workers, [&](std::size_t i) {
    js[i] = pr.jacobian(x[i], step);
    terms[i] = w[i] * js[i] * pr.measure(x[i]);
  });
  if (samples)
    for (int i = 0; i < nodes; ++i) samples->emplace_back(x[i], js[i]);
  return pr.prefactor() * pairwise_sum(terms);
}

VolumeReport latitude_volume(const FoliationModel& model, const QuadratureSpec& spec) {
  VolumeReport rep;
  rep.model = model;
  rep.spec = spec;
  const Profile pr{model, spec.h};
  if (model.kind == FoliationModel::Kind::Hopf) {
    const double v = profile_integral(pr, spec.nodes, 0.0, kPi, spec.h, spec.workers, &rep.jacobian_profile);
    const double v2 = profile_integral(pr, 2 * spec.nodes, 0.0, kPi, spec.h, spec.workers, nullptr);
    const double vh = profile_integral(pr, spec.nodes, 0.0, kPi, spec.h / 2, spec.workers, nullptr);
    rep.value = v2;
    rep.quadrature_error = std::abs(v2 - v);
    rep.jacobian_error = std::abs(vh - v);
  } else {
    if (spec.eps.size() < 2) throw std::invalid_argument("NS volume needs at least two cutoffs");
    std::vector<double> eps = spec.eps;
    std::sort(eps.rbegin(), eps.rend());
    for (double e : eps) {
      if (!(e > 0.0 && e < kPi / 2)) throw std::invalid_argument("cutoffs must lie in (0, pi/2)");
      rep.eps_sequence.push_back({e, profile_integral(pr, spec.nodes, e, kPi / 2, spec.h, spec.workers, nullptr)});
    }
    const auto& l1 = rep.eps_sequence[eps.size() - 2];
    const auto& l0 = rep.eps_sequence.back();
    const double slope = (l1.value - l0.value) / (l1.eps - l0.eps);
    rep.value = l0.value - slope * l0.eps;
    rep.cutoff_error = std::abs(rep.value - l0.value);
    // successive differences must shrink for the improper integral to converge
    for (std::size_t i = 2; i < rep.eps_sequence.size(); ++i) {
      const double d_prev = std::abs(rep.eps_sequence[i - 1].value - rep.eps_sequence[i - 2].value);
      const double d_cur = std::abs(rep.eps_sequence[i].value - rep.eps_sequence[i - 1].value);
      if (d_cur > 0.5 * d_prev + 1e-12 * std::abs(rep.value)) rep.eps_converged = false;
    }
    const double e0 = eps.back();
    const double v2 = profile_integral(pr, 2 * spec.nodes, e0, kPi / 2, spec.h, spec.workers, nullptr);
    const double vh = profile_integral(pr, spec.nodes, e0, kPi / 2, spec.h / 2, spec.workers, nullptr);
    rep.quadrature_error = std::abs(v2 - l0.value);
    rep.jacobian_error = std::abs(vh - l0.value);
    profile_integral(pr, std::min(spec.nodes, 24), e0, kPi / 2, spec.h, spec.workers, &rep.jacobian_profile);
  }
  rep.error_estimate = rep.quadrature_error + rep.jacobian_error + rep.cutoff_error;
  rep.base_volume = sphere_volume(model.sphere_dim);
  return rep;
}

Eigen::VectorXd unit_gaussian(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> g;
  Eigen::VectorXd v(d);
  do {
    for (int i = 0; i < d; ++i) v(i) = g(rng);
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

VolumeReport monte_carlo_volume(const FoliationModel& model, const QuadratureSpec& spec) {
  VolumeReport rep;
  rep.model = model;
  rep.spec = spec;
  if (spec.samples < 2) throw std::invalid_argument("Monte Carlo needs at least two samples");
  const bool ns = model.kind == FoliationModel::Kind::NS;
  const int n = model.ambient(), k = model.leaf_dim;
  const double e0 = ns ? *std::min_element(spec.eps.begin(), spec.eps.end()) : 0.0;
  const double scale = ns ? sphere_volume(k - 1) * sphere_volume(model.sphere_dim - k) * (kPi / 2 - e0)
                          : sphere_volume(model.sphere_dim);
  constexpr long kChunk = 4096;
  const long chunks = (spec.samples + kChunk - 1) / kChunk;
  std::vector<double> sum(chunks), sum_sq(chunks), fd_dev(chunks);
  std::vector<std::vector<std::pair<double, double>>> prof(chunks);
  parallel_for(chunks, spec.workers, [&](std::size_t c) {
    std::mt19937_64 rng(derive_seed(spec.seed, c));
    std::uniform_real_distribution<double> unif(e0, kPi / 2);
    const long lo = c * kChunk, hi = std::min<long>(spec.samples, lo + kChunk);
    std::vector<double> vals;
    vals.reserve(hi - lo);
    for (long i = lo; i < hi; ++i) {
      double f = 0.0, lat = 0.0;
      Eigen::VectorXd p;
      if (ns) {
        const double t = unif(rng);
        p = ns_point(model, t, unit_gaussian(rng, k), unit_gaussian(rng, n - k));
        lat = t;
        f = std::pow(std::cos(t), k - 1) * std::pow(std::sin(t), model.sphere_dim - k);
      } else {
        p = unit_gaussian(rng, n);
        lat = std::acos(std::clamp(p(0), -1.0, 1.0));
        f = 1.0;
      }
      const double j = gauss_jacobian(model, p, spec.h);
      vals.push_back(scale * f * j);
      if (i - lo < 4) {
        prof[c].emplace_back(lat, j);
        // step-halving spread at a few points per chunk feeds the FD budget
        const double jh = gauss_jacobian(model, p, spec.h / 2);
        fd_dev[c] = std::max(fd_dev[c], std::abs(jh - j) / j);
      }
    }
    sum[c] = pairwise_sum(vals);
    for (double& v : vals) v *= v;
    sum_sq[c] = pairwise_sum(vals);
  });
  const double total = pairwise_sum(sum), total_sq = pairwise_sum(sum_sq);
  const double nsamp = static_cast<double>(spec.samples);
  const double mean = total / nsamp;
  const double var = std::max(0.0, total_sq / nsamp - mean * mean) * nsamp / (nsamp - 1);
  rep.value = mean;
  rep.quadrature_error = 2.0 * std::sqrt(var / nsamp);  // two standard errors
  rep.jacobian_error = std::abs(mean) * *std::max_element(fd_dev.begin(), fd_dev.end());
  if (ns) {
    // omitted tube t < eps: the integrand is at most the prefactor (up to J sin^(m-k) -> 1)
    rep.cutoff_error = sphere_volume(k - 1) * sphere_volume(model.sphere_dim - k) * e0 * 2.0;
  }
  for (auto& pc : prof)
    for (auto& pt : pc)
      if (rep.jacobian_profile.size() < 64) rep.jacobian_profile.push_back(pt);
  rep.error_estimate = rep.quadrature_error + rep.jacobian_error + rep.cutoff_error;
  rep.base_volume = sphere_volume(model.sphere_dim);
  return rep;
}

}  // namespace

VolumeReport foliation_volume(const FoliationModel& model, const QuadratureSpec& spec) {
  if (spec.method == QuadratureMethod::LatitudeProfile) {
    if (spec.nodes < 2) throw std::invalid_argument("latitude profile needs at least two nodes");
    return latitude_volume(model, spec);
  }
  return monte_carlo_volume(model, spec);
}

RatioReport volume_ratio(const FoliationModel& a, const FoliationModel& b, const QuadratureSpec& spec) {
  RatioReport r;
  r.a = foliation_volume(a, spec);
  r.b = foliation_volume(b, spec);
  if (!(r.b.value > 0.0)) throw std::runtime_error("volume_ratio: nonpositive denominator");
  r.ratio = r.a.value / r.b.value;
  r.error_estimate = r.ratio * (r.a.error_estimate / std::abs(r.a.value) + r.b.error_estimate / std::abs(r.b.value));
  return r;
}

}  // namespace folcal::folvol
