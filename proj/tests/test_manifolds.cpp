#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "widthlab/error.hpp"
#include "widthlab/manifolds.hpp"

using namespace widthlab;

namespace {

std::vector<ManifoldParams> families() {
  return {ManifoldParams::sphere(2), ManifoldParams::real_projective(2), ManifoldParams::complex_projective(4),
          ManifoldParams::quaternionic_projective(8), ManifoldParams::cayley_plane()};
}

std::vector<std::uint64_t> first_dims(const ManifoldParams& m, int count) {
  std::vector<std::uint64_t> out;
  for (int k = 0; k < count; ++k) out.push_back(eigenspace_dim(m, k));
  return out;
}

}  // namespace

TEST_CASE("eigenvalues") {
  CHECK(eigenvalue(ManifoldParams::sphere(2), 3) == 12.0);
  CHECK(eigenvalue(ManifoldParams::cayley_plane(), 1) == 12.0);
  CHECK(eigenvalue(ManifoldParams::real_projective(2), 1) == 6.0);
  CHECK(eigenvalue(ManifoldParams::real_projective(3), 2) == 4.0 * (4.0 + 2.0));
  for (const auto& m : families()) CHECK(eigenvalue(m, 0) == 0.0);
}

TEST_CASE("Jacobi parameters per family") {
  const ManifoldParams cay = ManifoldParams::cayley_plane();
  CHECK(cay.d == 16);
  CHECK(cay.alpha == 7.0);
  CHECK(cay.beta == 3.0);
  const ManifoldParams h = ManifoldParams::quaternionic_projective(8);
  CHECK(h.alpha == 3.0);
  CHECK(h.beta == 1.0);
  CHECK(ManifoldParams::complex_projective(4).beta == 0.0);
  CHECK(ManifoldParams::real_projective(4).even_only);
  CHECK_THROWS_AS(ManifoldParams::complex_projective(5), BadDimensions);
  CHECK_THROWS_AS(ManifoldParams::quaternionic_projective(6), BadDimensions);
  CHECK_THROWS_AS(ManifoldParams::sphere(0), BadDimensions);
}

TEST_CASE("eigenspace dimensions: classical values") {
  CHECK(first_dims(ManifoldParams::sphere(2), 4) == std::vector<std::uint64_t>{1, 3, 5, 7});
  CHECK(first_dims(ManifoldParams::sphere(3), 4) == std::vector<std::uint64_t>{1, 4, 9, 16});
  CHECK(first_dims(ManifoldParams::complex_projective(4), 4) == std::vector<std::uint64_t>{1, 8, 27, 64});
  CHECK(first_dims(ManifoldParams::quaternionic_projective(8), 4) == std::vector<std::uint64_t>{1, 14, 90, 385});
  CHECK(first_dims(ManifoldParams::cayley_plane(), 4) == std::vector<std::uint64_t>{1, 26, 324, 2652});
  CHECK(first_dims(ManifoldParams::real_projective(2), 3) == std::vector<std::uint64_t>{1, 5, 9});
}

TEST_CASE("S² cumulative counts are (N+1)²") {
  const ManifoldParams s2 = ManifoldParams::sphere(2);
  for (int n = 0; n <= 30; ++n) CHECK(cumulative_dim(s2, n) == static_cast<std::uint64_t>((n + 1) * (n + 1)));
}

TEST_CASE("S^d eigenspaces match the harmonic-polynomial count") {
  // dim H_k(S^d) = C(k+d, d) - C(k+d-2, d).
  auto binom = [](int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return std::llround(r);
  };
  for (int d : {2, 3, 4, 5, 7})
    for (int k = 0; k <= 12; ++k) {
      const long long expected = binom(k + d, d) - (k >= 2 ? binom(k + d - 2, d) : 0);
      CHECK(static_cast<long long>(eigenspace_dim(ManifoldParams::sphere(d), k)) == expected);
    }
}

TEST_CASE("eigenspace dimension log-slope rises toward d-1") {
  for (const auto& m : families()) {
    double previous = 0.0;
    for (int k = 5; k <= 20; ++k) {
      const double slope = std::log(static_cast<double>(eigenspace_dim(m, 2 * k)) /
                                    static_cast<double>(eigenspace_dim(m, k))) / std::log(2.0);
      CHECK(slope > previous);
      CHECK(slope < m.d - 1);
      previous = slope;
    }
  }
}

TEST_CASE("Weyl ratios") {
  CHECK(weyl_ratio(ManifoldParams::sphere(2), 10) == doctest::Approx(121.0 / 110.0));
  CHECK(weyl_ratio(ManifoldParams::sphere(2), 100) == doctest::Approx(1.01).epsilon(1e-3));
  for (const auto& m : families()) {
    CHECK(std::isfinite(weyl_ratio(m, 1)));
    CHECK(weyl_ratio(m, 1) > 0.0);
  }
  CHECK_THROWS_AS(weyl_ratio(ManifoldParams::sphere(2), 0), PreconditionFailed);
}

TEST_CASE("spectral ratios approach one") {
  for (const auto& m : families()) {
    for (int n = 10; n <= 60; ++n) CHECK(std::abs(eigenvalue(m, n + 1) / eigenvalue(m, n) - 1.0) < 3.0 / n);
    const SpectralData s = SpectralData::build(m, 60);
    for (int n = 20; n < 60; ++n) {
      CHECK(s.theta[n + 1] / s.theta[n] < 1.25);
      CHECK(static_cast<double>(s.tau[n + 1]) / static_cast<double>(s.tau[n]) < 2.25);
      CHECK(s.theta[n + 1] > s.theta[n]);
    }
  }
}

TEST_CASE("spectral table CSV") {
  const SpectralData s = SpectralData::build(ManifoldParams::sphere(2), 2);
  CHECK(s.to_csv() == "k,theta,dim,tau\n0,0,1,1\n1,2,3,4\n2,6,5,9\n");
}

TEST_CASE("Sobolev multiplier") {
  const ManifoldParams s2 = ManifoldParams::sphere(2);
  const SpectralData spectral = SpectralData::build(s2, 8);
  const MultiplierSpec spec = sobolev_multiplier(s2, 2.0);
  CHECK(spec.class_a);
  const auto entries = expand_multiplier(spec, spectral, 8);
  CHECK(entries[0] == 0.5);
  CHECK(entries[2] == 0.5);
  CHECK(entries[3] < entries[2]);
  const auto flat = expand_multiplier(sobolev_multiplier(s2, 1e-9), spectral, 20);
  for (double x : flat) CHECK(x == doctest::Approx(1.0).epsilon(1e-7));
  // λ(Ct)/λ(t) = C^(-γ/2) for the power function.
  for (double t : {1.0, 7.0, 100.0}) CHECK(spec.lambda_fn(3.0 * t) / spec.lambda_fn(t) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(sobolev_multiplier(s2, 0.0), PreconditionFailed);
}
