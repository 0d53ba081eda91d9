#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <memory>
#include <numbers>

#include "widthlab/error.hpp"
#include "widthlab/stochastic.hpp"

using namespace widthlab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix diag(std::initializer_list<double> d) {
  Vector v(static_cast<Eigen::Index>(d.size()));
  std::size_t i = 0;
  for (double x : d) v[static_cast<Eigen::Index>(i++)] = x;
  return v.asDiagonal();
}

Subspace span_of(std::initializer_list<std::initializer_list<double>> cols) {
  std::vector<Vector> vs;
  for (const auto& c : cols) {
    Vector v(static_cast<Eigen::Index>(c.size()));
    std::size_t i = 0;
    for (double x : c) v[static_cast<Eigen::Index>(i++)] = x;
    vs.push_back(v);
  }
  return orthonormalize(vs);
}

}  // namespace

TEST_CASE("Haar samples: unit length, centred, reproducible") {
  const auto one = haar_sphere_sample(1, 4000, 3);
  double mean = 0.0;
  for (const Vector& u : one) {
    CHECK(std::abs(std::abs(u[0]) - 1.0) < 1e-15);
    mean += u[0];
  }
  CHECK(std::abs(mean / 4000.0) < 3.0 / std::sqrt(4000.0));

  const auto three = haar_sphere_sample(3, 100000, 5);
  double m = 0.0;
  for (const Vector& u : three) {
    CHECK(std::abs(u.norm() - 1.0) < 1e-14);
    m += u[0];
  }
  CHECK(std::abs(m / 100000.0) < 0.01);

  const auto again = haar_sphere_sample(3, 100000, 5);
  bool same = true;
  for (std::size_t i = 0; i < again.size(); ++i) same = same && (again[i] - three[i]).norm() == 0.0;
  CHECK(same);
}

TEST_CASE("sampling does not depend on the worker count") {
  auto trig = std::make_shared<const OrthonormalSystem>(trig_system(1));
  const Body v = induced_ball(trig, 4.0);
  setenv("WIDTHLAB_THREADS", "1", 1);
  const EstimateWithCI a = expectation_norm(v, 20000, 9);
  setenv("WIDTHLAB_THREADS", "4", 1);
  const EstimateWithCI b = expectation_norm(v, 20000, 9);
  unsetenv("WIDTHLAB_THREADS");
  CHECK(a.value == b.value);
  CHECK(a.half_width == b.half_width);
}

TEST_CASE("expectation of the Euclidean norm is exactly one") {
  const EstimateWithCI e = expectation_norm(euclidean_ball(4), 2000, 1);
  CHECK(e.value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.half_width < 1e-14);
  CHECK_THROWS_AS(expectation_norm(euclidean_ball(2), 999, 1), PreconditionFailed);
  const auto j = e.to_json();
  CHECK(j.contains("value"));
  CHECK(j["samples"] == 2000);
  CHECK(j["seed"] == 1);
}

TEST_CASE("expectations of trig balls against the closed-form bound") {
  auto trig = std::make_shared<const OrthonormalSystem>(trig_system(1));
  const EstimateWithCI e2 = expectation_norm(induced_ball(trig, 2.0), 20000, 2);
  CHECK(std::abs(e2.value - 1.0) <= 1e-6 + e2.half_width);
  const EstimateWithCI e4 = expectation_norm(induced_ball(trig, 4.0), 50000, 2);
  CHECK(e4.value <= 1.3161 + e4.half_width);
}

TEST_CASE("expectation bound: closed-form values") {
  CHECK(expectation_bound(2.0) == 1.0);
  // Γ(5/2) = 3√π/4.
  const double p4 = std::sqrt(2.0) * std::pow(std::numbers::pi, -1.0 / 8.0) *
                    std::pow(3.0 * std::sqrt(std::numbers::pi) / 4.0, 0.25);
  CHECK(expectation_bound(4.0) == doctest::Approx(p4).epsilon(1e-14));
  CHECK(expectation_bound(4.0) == doctest::Approx(1.3161).epsilon(1e-4));
  const double growth = expectation_bound(16.0) / expectation_bound(4.0);
  CHECK(growth >= 1.6);
  CHECK(growth <= 2.4);
  CHECK_THROWS_AS(expectation_bound(1.5), PreconditionFailed);
}

TEST_CASE("sphere-integral volume ratios") {
  const Body ball = euclidean_ball(2);
  CHECK(mc_volume_ratio(ball, ball, 5000, 1).value == doctest::Approx(1.0));
  CHECK(mc_volume_ratio(lp_ball(2, kInf), ball, 200000, 2).value == doctest::Approx(4.0 / std::numbers::pi).epsilon(0.03));
  CHECK(mc_volume_ratio(linear_image(ball, diag({2.0, 1.0})), ball, 200000, 3).value == doctest::Approx(2.0).epsilon(0.03));
  CHECK_THROWS_AS(mc_volume_ratio(euclidean_ball(11), euclidean_ball(11), 1000, 1), BadDimensions);
  // Heavy tails of gauge^{-n} for a thin ellipsoid.
  CHECK_THROWS_AS(mc_volume_ratio(linear_image(ball, diag({1000.0, 0.001})), ball, 2000, 1), VarianceBlowup);
}

TEST_CASE("hit-or-miss agrees with the sphere integral") {
  const Body ball = euclidean_ball(2);
  const EstimateWithCI h = hit_or_miss_volume_ratio(lp_ball(2, kInf), ball, 200000, 1);
  CHECK(h.value == doctest::Approx(4.0 / std::numbers::pi).epsilon(0.03));
}

TEST_CASE("section volumes") {
  const Body e = linear_image(euclidean_ball(3), diag({2.0, 1.0, 1.0}));
  CHECK(section_volume_ratio(euclidean_ball(3), random_subspace(3, 2, std::uint64_t{1}), euclidean_ball(2), 5000, 1)
            .value == doctest::Approx(1.0));
  CHECK(section_volume_ratio(e, span_of({{0, 1, 0}, {0, 0, 1}}), euclidean_ball(2), 100000, 2).value ==
        doctest::Approx(1.0).epsilon(0.03));
  CHECK(section_volume_ratio(e, span_of({{1, 0, 0}, {0, 1, 0}}), euclidean_ball(2), 100000, 3).value ==
        doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("projection volumes: exact ellipsoid path and the polytope estimate") {
  const Matrix a = diag({3.0, 2.0, 1.0});
  const Body e = linear_image(euclidean_ball(3), a);
  const Subspace l = span_of({{1, 0, 0}, {0, 1, 0}});
  CHECK(ellipsoid_projection_ratio(a, l) == doctest::Approx(6.0));
  CHECK(projection_volume_ratio(e, l, euclidean_ball(2), 1000, 1).value == doctest::Approx(6.0));
  // Projection of the cube onto a coordinate plane is the square (area 4).
  const EstimateWithCI sq = projection_volume_ratio(lp_ball(3, kInf), l, euclidean_ball(2), 100000, 2, 512);
  CHECK(sq.value == doctest::Approx(4.0 / std::numbers::pi).epsilon(0.03));
  CHECK(sq.value >= 4.0 / std::numbers::pi - sq.half_width);
}

TEST_CASE("section radius: oracle values") {
  const Body e = linear_image(euclidean_ball(2), diag({2.0, 1.0}));
  const Body ball = euclidean_ball(2);
  CHECK(section_radius(e, ball, span_of({{1, 0}}), 8, 1) == doctest::Approx(2.0));
  CHECK(section_radius(e, ball, span_of({{1, 1}}), 8, 1) == doctest::Approx(std::sqrt(8.0 / 5.0)).epsilon(1e-12));
  auto trig = std::make_shared<const OrthonormalSystem>(trig_system(1));
  const Body v = induced_ball(trig, 4.0);
  CHECK(section_radius(v, v, random_subspace(3, 2, std::uint64_t{4}), 8, 1) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(section_radius(v, v, Subspace::full(3), 4, 1), PreconditionFailed);
}

TEST_CASE("section radius by ascent matches the exact ellipsoid path") {
  const Body e = linear_image(euclidean_ball(3), diag({3.0, 2.0, 1.0}));
  // A custom Euclidean gauge without the ellipsoid tag forces the ascent path.
  BodyDescriptor d;
  Body plain(3, [](const Vector& x) { return x.norm(); }, d, "plain");
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Subspace l = random_subspace(3, 2, s);
    CHECK(section_radius(e, plain, l, 8, s) == doctest::Approx(section_radius(e, euclidean_ball(3), l, 8, s)).epsilon(1e-8));
  }
}

TEST_CASE("greedy nets") {
  const Body seg = euclidean_ball(1);
  const NetReport r = greedy_net(seg, seg, 1.0, 1);
  CHECK(r.net_points.size() <= 3);
  CHECK(r.packing_points.size() >= 2);
  for (std::size_t i = 0; i < r.packing_points.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) CHECK((r.packing_points[i] - r.packing_points[j]).norm() >= 1.0);
  CHECK(r.certified);

  const NetReport single = greedy_net(euclidean_ball(2), euclidean_ball(2), 2.5, 2);
  CHECK(single.net_points.size() == 1);

  NetOptions tiny;
  tiny.candidates = 5000;
  tiny.max_points = 10;
  CHECK_THROWS_AS(greedy_net(euclidean_ball(2), euclidean_ball(2), 0.05, 3, tiny), Saturation);
  CHECK_THROWS_AS(greedy_net(euclidean_ball(7), euclidean_ball(7), 0.5, 3), BadDimensions);
}

TEST_CASE("packing/net chain on the disk across seeds") {
  NetOptions opts;
  opts.candidates = 4000;
  opts.certificate_samples = 2000;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const NetChain c = net_chain(euclidean_ball(2), euclidean_ball(2), 0.5, s, 4, opts);
    CHECK(c.holds());
  }
}

TEST_CASE("Brunn sections") {
  const std::array<std::size_t, 1> x_axis{0};
  const Subspace line = Subspace::coordinate(2, x_axis);
  const BrunnReport disk = brunn_sections(euclidean_ball(2), line, {Vector::Unit(2, 1) * 0.5}, 100000, 1);
  CHECK(disk.central.value == doctest::Approx(2.0).epsilon(0.01));
  CHECK(disk.offsets[0].value == doctest::Approx(std::sqrt(3.0)).epsilon(0.01));
  CHECK(disk.holds);

  const BrunnReport zero = brunn_sections(euclidean_ball(2), line, {Vector::Zero(2)}, 10000, 1);
  CHECK(zero.central.value == zero.offsets[0].value);

  const BrunnReport cube = brunn_sections(lp_ball(2, kInf), line, {Vector::Unit(2, 1) * 0.7}, 10000, 1);
  CHECK(cube.central.value == doctest::Approx(2.0));
  CHECK(cube.offsets[0].value == doctest::Approx(2.0));
  CHECK(brunn_section_check(lp_ball(2, kInf), line, {Vector::Unit(2, 1) * 0.7}, 10000, 1));
}

TEST_CASE("Urysohn-type bound: volume ratio >= E^{-n}") {
  auto trig = std::make_shared<const OrthonormalSystem>(trig_system(1));
  for (double p : {1.0, 2.0, 4.0}) {
    const Body v = induced_ball(trig, p);
    const EstimateWithCI vol = mc_volume_ratio(v, euclidean_ball(3), 50000, 1);
    const EstimateWithCI e = expectation_norm(v, 50000, 2);
    const double slack = vol.half_width + 3.0 * std::pow(e.value, -4.0) * e.half_width;
    CHECK(vol.value + slack >= std::pow(e.value, -3.0));
  }
}
