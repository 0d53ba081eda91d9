#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "widthlab/error.hpp"
#include "widthlab/stochastic.hpp"
#include "widthlab/widths.hpp"

using namespace widthlab;

namespace {

Matrix diag(std::initializer_list<double> d) {
  Vector v(static_cast<Eigen::Index>(d.size()));
  std::size_t i = 0;
  for (double x : d) v[static_cast<Eigen::Index>(i++)] = x;
  return v.asDiagonal();
}

WidthSearchOptions quick() {
  WidthSearchOptions o;
  o.outer_restarts = 64;
  o.refine_best = 2;
  return o;
}

}  // namespace

TEST_CASE("exact ellipsoid widths") {
  const std::vector<double> axes{3, 2, 1};
  CHECK(ellipsoid_kolmogorov_exact(axes, 1) == 2.0);
  CHECK(ellipsoid_kolmogorov_exact(axes, 3) == 0.0);
  const std::vector<double> ones{1, 1, 1};
  CHECK(ellipsoid_kolmogorov_exact(ones, 0) == 1.0);
  const std::vector<double> bad{1, 2};
  CHECK_THROWS_AS(ellipsoid_kolmogorov_exact(bad, 0), BadOrder);
  CHECK_THROWS_AS(ellipsoid_kolmogorov_exact(axes, 4), BadOrder);
}

TEST_CASE("brute-force Kolmogorov widths") {
  const Body ball3 = euclidean_ball(3);
  const Body e = linear_image(ball3, diag({3.0, 2.0, 1.0}));
  const WidthResult k1 = brute_force_kolmogorov(e, ball3, 1, quick(), 1);
  CHECK(k1.value == doctest::Approx(2.0).epsilon(5e-4));
  CHECK(k1.method == WidthMethod::brute_force);
  REQUIRE(k1.witness);
  CHECK(k1.witness->dim() == 1);
  CHECK(brute_force_kolmogorov(e, ball3, 0, quick(), 1).value == doctest::Approx(3.0));
  CHECK(brute_force_kolmogorov(e, ball3, 3, quick(), 1).value == 0.0);

  const Body ball2 = euclidean_ball(2);
  CHECK(brute_force_kolmogorov(ball2, ball2, 1, quick(), 2).value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(brute_force_kolmogorov(euclidean_ball(6), euclidean_ball(6), 1, quick(), 1), BadDimensions);
}

TEST_CASE("Kolmogorov search without the ellipsoid shortcut") {
  // The ascent + conditional-gradient inner loop must find the same widths.
  const Body ball3 = euclidean_ball(3);
  const Body e = linear_image(ball3, diag({3.0, 2.0, 1.0}));
  BodyDescriptor d;
  Body plain(3, [&e](const Vector& x) { return e.gauge(x); }, d, "plain");
  plain.with_gradient([&e](const Vector& x) { return e.gauge_gradient(x); });
  WidthSearchOptions o = quick();
  o.outer_restarts = 32;
  CHECK(brute_force_kolmogorov(plain, ball3, 1, o, 3).value == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("brute-force Gelfand widths") {
  const Body ball3 = euclidean_ball(3);
  const Body e = linear_image(ball3, diag({3.0, 2.0, 1.0}));
  const WidthResult g1 = brute_force_gelfand(e, ball3, 1, quick(), 1);
  CHECK(g1.value == doctest::Approx(2.0).epsilon(5e-4));
  REQUIRE(g1.witness);
  CHECK(g1.witness->dim() == 2);
  CHECK(brute_force_gelfand(e, ball3, 0, quick(), 1).value == doctest::Approx(3.0));
  CHECK(brute_force_gelfand(e, ball3, 3, quick(), 1).value == 0.0);
}

TEST_CASE("width sequences are nonincreasing in m") {
  const Body ball4 = euclidean_ball(4);
  const Body e = linear_image(ball4, diag({1.7, 0.4, 2.2, 1.1}));
  double prev_k = 1e300, prev_g = 1e300;
  for (std::size_t m = 0; m <= 4; ++m) {
    const double k = brute_force_kolmogorov(e, ball4, m, quick(), m).value;
    const double g = brute_force_gelfand(e, ball4, m, quick(), m).value;
    CHECK(k <= prev_k + 1e-9);
    CHECK(g <= prev_g + 1e-9);
    prev_k = k;
    prev_g = g;
  }
}

TEST_CASE("duality between Gelfand and Kolmogorov widths") {
  CHECK(duality_check(diag({3.0, 2.0, 1.0}), 1, quick(), 1));
  for (std::size_t m = 0; m < 3; ++m) {
    const DualityReport r = duality_report(Matrix::Identity(3, 3), m, quick(), 2);
    CHECK(r.agrees);
    CHECK(r.gelfand == doctest::Approx(1.0));
  }
  const DualityReport full = duality_report(diag({3.0, 2.0, 1.0}), 3, quick(), 3);
  CHECK(full.gelfand == 0.0);
  CHECK(full.kolmogorov == 0.0);
  Matrix a(3, 3);
  a << 2, 1, 0, 0, 1, 0.5, 0.3, 0, 1;
  CHECK(duality_check(a, 2, quick(), 4));
}

TEST_CASE("Fourier tail supremum") {
  const auto spec = MultiplierSpec::from_sequence({1.0, 0.5, 1.0 / 3.0, 0.25}, true);
  CHECK(fourier_tail_sup(spec, 1) == 0.5);
  CHECK(fourier_tail_sup(spec, 0) == 1.0);
  const std::vector<double> lambdas{1.0, 0.5, 1.0 / 3.0, 0.25};
  for (std::size_t m = 0; m < 4; ++m)
    CHECK(std::abs(fourier_tail_sup_numeric(lambdas, m, m) - fourier_tail_sup(spec, m)) <= 1e-9);
  CHECK_THROWS_AS(fourier_tail_sup(MultiplierSpec::from_sequence({1.0, 2.0}, false), 0), NotMonotone);
  const auto fn = MultiplierSpec::from_function([](double k) { return 1.0 / k; }, true);
  CHECK(fourier_tail_sup(fn, 2) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("section lower bound formulas") {
  const CalibrationConstant unit{"test", 1.0, 0};
  CHECK(section_lower_bound(Matrix::Identity(3, 3), 1.0, unit) == 1.0);
  CHECK(section_lower_bound(diag({1.0, 1.0, 0.5}), 1.0, unit) == 0.5);
  const double lemma3 = std::pow(expectation_bound(4.0), -1.5);
  CHECK(lemma3 == doctest::Approx(0.662).epsilon(1e-3));
  const double mc = section_lower_bound(Matrix::Identity(3, 3), trig_system(1), 4.0, unit, 50000, 1);
  CHECK(mc >= lemma3 - 1e-2);
  CHECK_THROWS_AS(section_lower_bound(Matrix::Zero(3, 3), trig_system(1), 4.0, unit, 2000, 1), SingularMatrix);

  CHECK(cross_section_lower_bound(Matrix::Identity(3, 3), 3, 3, 1.0, 1.0, unit) == 1.0);
  const double e1 = 1.2, e2 = 1.1;
  CHECK(cross_section_lower_bound(2.0 * Matrix::Identity(4, 4), 4, 2, e1, e2, unit) ==
        doctest::Approx(2.0 * std::pow(e1 * e2, -2.0)));
  CHECK(cross_section_lower_bound(Matrix::Identity(3, 3), trig_system(1), 2.0, 2.0, 3, unit, 20000, 1) ==
        doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(cross_section_lower_bound(Matrix::Identity(3, 3), trig_system(1), 2.0, 1.0, 2, unit, 2000, 1),
                  PreconditionFailed);
}

TEST_CASE("cross-section bound sits below sampled radii (trig n=5, p=4, q=1.5)") {
  ExpectationTable table(50000, 3);
  const CalibrationConstant unit{"test", 1.0, 0};
  auto system = std::make_shared<const OrthonormalSystem>(trig_system(2));
  const Body v = induced_ball(system, 4.0);
  const Body w = induced_ball(system, 1.5);
  const double bound =
      cross_section_lower_bound(Matrix::Identity(5, 5), 5, 3, table.get(5, 3.0), table.get(5, 4.0), unit);
  for (std::uint64_t s = 0; s < 50; ++s) CHECK(section_radius(v, w, random_subspace(5, 3, s), 8, s) >= bound);
}

TEST_CASE("log-log slope") {
  const std::vector<double> x{1, 2, 4, 8};
  const std::vector<double> y{1, 0.25, 0.0625, 0.015625};
  CHECK(loglog_slope(x, y) == doctest::Approx(-2.0));
}

TEST_CASE("Sobolev width order on the two-sphere") {
  const ManifoldParams s2 = ManifoldParams::sphere(2);
  const ScalingFit fit = sobolev_width_order(s2, 2.0, 4, 12);
  CHECK(fit.expected == -1.0);
  CHECK(fit.slope == doctest::Approx(-1.0).epsilon(0.05));
  CHECK(sobolev_exact_width_slope(s2, 2.0, 4, 12) == doctest::Approx(-1.0).epsilon(0.05));
  CHECK(sobolev_exact_width_slope(s2, 1.0, 4, 12) == doctest::Approx(-0.5).epsilon(0.05 / 0.5));
  CHECK(std::abs(sobolev_width_order(s2, 1e-6, 4, 12).slope) < 1e-5);
}

TEST_CASE("radius trials and calibration") {
  ExpectationTable table(20000, 1);
  RadiusTrialSpec spec;
  spec.n = 4;
  spec.p = 4.0;
  spec.subspaces = 4;
  const RadiusTrialResult a = run_radius_trial(spec, table);
  const RadiusTrialResult b = run_radius_trial(spec, table);
  CHECK(a.min_radius == b.min_radius);
  CHECK(a.min_radius > 0.0);
  CHECK(a.unit_bound > 0.0);
  const CalibrationConstant c = calibrate("thm1", {a, b}, 0.5);
  CHECK(c.value == doctest::Approx(0.5 * a.ratio()));
  CHECK(c.trials == 2);
  CHECK_THROWS_AS(calibrate("thm1", {}, 0.5), PreconditionFailed);
}

TEST_CASE("width result JSON") {
  WidthResult r;
  r.kind = WidthKind::gelfand;
  r.order = 2;
  r.value = 1.5;
  r.method = WidthMethod::section_bound;
  const auto j = r.to_json();
  CHECK(j["kind"] == "gelfand");
  CHECK(j["m"] == 2);
  CHECK(j["method"] == "lower_bound_thm1");
  CHECK(to_string(WidthMethod::cross_section_bound) == "lower_bound_thm2");
}
