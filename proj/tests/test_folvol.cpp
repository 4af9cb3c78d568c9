#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "folcal/folvol.hpp"

using namespace folcal::folvol;

namespace {

const double kPi = std::numbers::pi;

Eigen::VectorXd random_point(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXd p(n);
  for (int i = 0; i < n; ++i) p(i) = g(rng);
  return p / p.norm();
}

// Hand-derived: the NS leaf through a point at distance t from the axis
// sphere stretches the normal directions by 1/sin t, so J = sin^-(m-k) t and
// the section volume collapses to a product of sphere volumes.
double ns_closed_form(int k, int m) {
  auto [x, w] = gauss_legendre(40, 0.0, kPi / 2);
  double c = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) c += w[i] * std::pow(std::cos(x[i]), k - 1);
  return sphere_volume(k - 1) * sphere_volume(m - k) * c;
}

std::vector<FoliationModel> all_models() {
  return {FoliationModel::hopf(1, 3), FoliationModel::hopf(1, 5), FoliationModel::hopf(3, 7),
          FoliationModel::hopf(7, 15), FoliationModel::ns(1, 3),  FoliationModel::ns(1, 5),
          FoliationModel::ns(3, 7),   FoliationModel::ns(2, 6),  FoliationModel::ns(7, 15)};
}

}  // namespace

TEST_CASE("model construction and names") {
  CHECK(FoliationModel::parse("hopf-s7").leaf_dim == 3);
  CHECK(FoliationModel::parse("ns-s15").sphere_dim == 15);
  CHECK(FoliationModel::parse("ns-2-9").leaf_dim == 2);
  CHECK(FoliationModel::parse("ns-s5").id() == "ns-1-5");
  CHECK_THROWS_AS(FoliationModel::parse("hopf-3-5"), std::invalid_argument);
  CHECK_THROWS_AS(FoliationModel::parse("hopf-7-7"), std::invalid_argument);
  CHECK_THROWS_AS(FoliationModel::parse("ns-4-4"), std::invalid_argument);
  CHECK_THROWS_AS(FoliationModel::parse("pedersen"), std::invalid_argument);
}

TEST_CASE("octonion product is alternative with a multiplicative norm") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  auto rnd = [&] {
    Octonion o;
    for (double& v : o) v = g(rng);
    return o;
  };
  auto norm2 = [](const Octonion& o) {
    double s = 0.0;
    for (double v : o) s += v * v;
    return s;
  };
  for (int trial = 0; trial < 20; ++trial) {
    const Octonion x = rnd(), y = rnd();
    const Octonion lhs = oct_mul(oct_mul(x, x), y), rhs = oct_mul(x, oct_mul(x, y));
    for (int c = 0; c < 8; ++c) CHECK(lhs[c] == doctest::Approx(rhs[c]).epsilon(1e-12).scale(10));
    CHECK(norm2(oct_mul(x, y)) == doctest::Approx(norm2(x) * norm2(y)).epsilon(1e-12));
  }
  // not associative
  Octonion e1{}, e2{}, e4{};
  e1[1] = e2[2] = e4[4] = 1.0;
  const Octonion a = oct_mul(oct_mul(e1, e2), e4), b = oct_mul(e1, oct_mul(e2, e4));
  double diff = 0.0;
  for (int c = 0; c < 8; ++c) diff += std::abs(a[c] - b[c]);
  CHECK(diff > 1.0);
}

TEST_CASE("leaf frames at simple points") {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(4);
  p(0) = 1.0;
  Eigen::MatrixXd f = leaf_tangent(FoliationModel::hopf(1, 3), p);
  CHECK(f.cols() == 1);
  CHECK(f(1, 0) == doctest::Approx(1.0));
  CHECK(std::abs(f(0, 0)) + std::abs(f(2, 0)) + std::abs(f(3, 0)) < 1e-15);

  // equator point midway between the poles +-e_1: the longitude runs toward +e_1
  Eigen::VectorXd q = Eigen::VectorXd::Zero(4);
  q(1) = q(2) = std::sqrt(0.5);
  f = leaf_tangent(FoliationModel::ns(1, 3), q);
  CHECK(f(0, 0) == doctest::Approx(1.0));
  CHECK(f.col(0).tail(3).norm() < 1e-15);

  Eigen::VectorXd pole = Eigen::VectorXd::Zero(4);
  pole(0) = 1.0;
  CHECK_THROWS_AS(leaf_tangent(FoliationModel::ns(1, 3), pole), std::domain_error);
  CHECK_THROWS_AS(gauss_jacobian(FoliationModel::ns(1, 3), pole), std::domain_error);
}

TEST_CASE("leaf frames are orthonormal, tangent and inside the leaf span") {
  std::mt19937_64 rng(11);
  for (const auto& m : all_models()) {
    double worst = 0.0;
    for (int t = 0; t < 2000; ++t) {
      const Eigen::VectorXd p = random_point(m.ambient(), rng);
      const Eigen::MatrixXd f = leaf_tangent(m, p);
      const Eigen::MatrixXd q = leaf_span_projector(m, p);
      worst = std::max(worst, (f.transpose() * f - Eigen::MatrixXd::Identity(m.leaf_dim, m.leaf_dim)).norm());
      worst = std::max(worst, (f.transpose() * p).norm());
      worst = std::max(worst, (q * f - f).norm());
      worst = std::max(worst, (q * p - p).norm());
      worst = std::max(worst, (q * q - q).norm());
      worst = std::max(worst, std::abs(q.trace() - (m.leaf_dim + 1)));
    }
    INFO(m.id());
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("Hopf Jacobian is constant") {
  std::mt19937_64 rng(5);
  for (auto [m, expect] : {std::pair{FoliationModel::hopf(1, 3), 2.0}, std::pair{FoliationModel::hopf(3, 7), 16.0},
                           std::pair{FoliationModel::hopf(1, 5), 0.0}}) {
    double lo = 1e300, hi = 0.0;
    for (int t = 0; t < 100; ++t) {
      const double j = gauss_jacobian(m, random_point(m.ambient(), rng));
      lo = std::min(lo, j);
      hi = std::max(hi, j);
    }
    INFO(m.id());
    CHECK(hi - lo <= 1e-6);
    CHECK(lo >= 1.0);
    if (expect > 0.0) CHECK(lo == doctest::Approx(expect).epsilon(1e-8));
  }
}

TEST_CASE("NS Jacobian depends only on the distance to the axis sphere") {
  std::mt19937_64 rng(8);
  for (const auto& m : {FoliationModel::ns(1, 3), FoliationModel::ns(3, 7), FoliationModel::ns(2, 5)}) {
    const int k = m.leaf_dim, n = m.ambient();
    double worst = 0.0, closed = 0.0;
    for (int t = 0; t < 50; ++t) {
      const double lat = 0.05 + 1.5 * (t + 0.5) / 50;
      const Eigen::VectorXd y1 = random_point(k, rng), y2 = random_point(k, rng);
      const Eigen::VectorXd x1 = random_point(n - k, rng), x2 = random_point(n - k, rng);
      const double j1 = gauss_jacobian(m, ns_point(m, lat, y1, x1));
      const double j2 = gauss_jacobian(m, ns_point(m, lat, y2, x2));
      // relative above J = 1: near the axis J grows like t^-(m-k)
      worst = std::max(worst, std::abs(j1 - j2) / std::max(1.0, j1));
      closed = std::max(closed, std::abs(j1 * std::pow(std::sin(lat), m.sphere_dim - k) - 1.0));
      CHECK(j1 >= 1.0);
    }
    INFO(m.id());
    CHECK(worst <= 1e-8);
    CHECK(closed <= 1e-8);
  }
}

TEST_CASE("NS profile") {
  const auto m = FoliationModel::ns(1, 3);
  auto prof = ns_profile(m, 16);
  REQUIRE(prof.size() == 16);
  CHECK(prof.back().t == doctest::Approx(kPi / 2));
  Eigen::VectorXd p = Eigen::VectorXd::Zero(4);
  p(1) = 1.0;
  CHECK(std::abs(prof.back().jacobian - gauss_jacobian(m, p)) <= 1e-8);
  for (std::size_t i = 0; i < prof.size(); ++i) {
    CHECK(prof[i].jacobian >= 1.0);
    if (i) CHECK(prof[i].jacobian < prof[i - 1].jacobian);  // decreasing away from the poles
  }
  CHECK(prof.back().jacobian == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(ns_profile(FoliationModel::hopf(1, 3), 4), std::invalid_argument);
}

TEST_CASE("quadrature helpers") {
  auto [x, w] = gauss_legendre(10, 0.0, 2.0);
  double s = 0.0, s5 = 0.0;
  for (int i = 0; i < 10; ++i) {
    s += w[i];
    s5 += w[i] * std::pow(x[i], 5);
  }
  CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s5 == doctest::Approx(64.0 / 6.0).epsilon(1e-13));
  CHECK(sphere_volume(1) == doctest::Approx(2 * kPi));
  CHECK(sphere_volume(2) == doctest::Approx(4 * kPi));
  CHECK(sphere_volume(3) == doctest::Approx(2 * kPi * kPi));
  CHECK(sphere_volume(0) == doctest::Approx(2.0));
}

TEST_CASE("latitude-profile volumes against closed forms") {
  const auto h3 = foliation_volume(FoliationModel::hopf(1, 3));
  CHECK(h3.value == doctest::Approx(4 * kPi * kPi).epsilon(1e-9));
  CHECK(h3.value >= h3.base_volume);
  const auto h7 = foliation_volume(FoliationModel::hopf(3, 7));
  CHECK(h7.value == doctest::Approx(16 * std::pow(kPi, 4) / 3).epsilon(1e-9));
  for (auto [k, m] : {std::pair{1, 3}, std::pair{3, 7}, std::pair{1, 5}, std::pair{2, 6}}) {
    const auto r = foliation_volume(FoliationModel::ns(k, m));
    INFO(r.model.id());
    CHECK(r.eps_converged);
    CHECK(r.error_estimate >= 0.0);
    CHECK(r.value == doctest::Approx(ns_closed_form(k, m)).epsilon(1e-4));
    CHECK(std::abs(r.value - ns_closed_form(k, m)) <= r.error_estimate + 1e-9 * r.value);
    CHECK(r.eps_sequence.size() == 4);
  }
  CHECK(ns_closed_form(1, 3) == doctest::Approx(4 * kPi * kPi));
  CHECK(ns_closed_form(3, 7) == doctest::Approx(8 * std::pow(kPi, 4) / 3));
}

TEST_CASE("ratios and two-method agreement") {
  QuadratureSpec mc;
  mc.method = QuadratureMethod::MonteCarlo;
  mc.samples = 40000;
  for (auto [a, b, target] : {std::tuple{"hopf-s3", "ns-s3", 1.0}, std::tuple{"hopf-s7", "ns-s7", 2.0}}) {
    const auto lat = volume_ratio(FoliationModel::parse(a), FoliationModel::parse(b));
    const auto rnd = volume_ratio(FoliationModel::parse(a), FoliationModel::parse(b), mc);
    INFO(a);
    CHECK(std::abs(lat.ratio - target) <= 0.01 * target);
    CHECK(std::abs(rnd.ratio - target) <= 0.01 * target);
    CHECK(std::abs(lat.b.value - rnd.b.value) <= lat.b.error_estimate + rnd.b.error_estimate);
  }
}

TEST_CASE("Monte Carlo is independent of the worker count") {
  QuadratureSpec mc;
  mc.method = QuadratureMethod::MonteCarlo;
  mc.samples = 10000;
  mc.seed = 42;
  const auto one = foliation_volume(FoliationModel::ns(1, 3), mc);
  mc.workers = 3;
  const auto three = foliation_volume(FoliationModel::ns(1, 3), mc);
  CHECK(one.value == three.value);
  CHECK(one.error_estimate == three.error_estimate);
  mc.seed = 43;
  CHECK(foliation_volume(FoliationModel::ns(1, 3), mc).value != one.value);
}

TEST_CASE("invalid quadrature settings") {
  QuadratureSpec q;
  q.eps = {1e-3};
  CHECK_THROWS_AS(foliation_volume(FoliationModel::ns(1, 3), q), std::invalid_argument);
  q.eps = {-1.0, 1e-3};
  CHECK_THROWS_AS(foliation_volume(FoliationModel::ns(1, 3), q), std::invalid_argument);
  q = {};
  q.nodes = 1;
  CHECK_THROWS_AS(foliation_volume(FoliationModel::hopf(1, 3), q), std::invalid_argument);
}
