#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "widthlab/error.hpp"
#include "widthlab/linalg.hpp"

using namespace widthlab;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  std::size_t i = 0;
  for (double x : v) out[static_cast<Eigen::Index>(i++)] = x;
  return out;
}

}  // namespace

TEST_CASE("orthonormalize keeps the span and returns an orthonormal frame") {
  const std::vector<Vector> pair = {vec({1, 0}), vec({1, 1})};
  const Subspace l = orthonormalize(pair);
  CHECK(l.dim() == 2);
  CHECK(std::abs(std::abs(l.frame()(0, 0)) - 1.0) < 1e-12);
  CHECK(std::abs(l.frame()(1, 0)) < 1e-12);
  CHECK(std::abs(std::abs(l.frame()(1, 1)) - 1.0) < 1e-12);

  const std::vector<Vector> single = {vec({2, 0, 0})};
  const Subspace e1 = orthonormalize(single);
  CHECK(e1.frame()(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e1.frame().col(0).tail(2).norm() < 1e-14);
}

TEST_CASE("orthonormalize rejects numerically dependent vectors") {
  const std::vector<Vector> dup = {vec({1, 1}), vec({1, 1 + 1e-14})};
  CHECK_THROWS_AS(orthonormalize(dup), RankDeficient);
}

TEST_CASE("Subspace validates its frame") {
  CHECK_THROWS_AS(Subspace(Matrix::Ones(2, 1)), RankDeficient);
  CHECK_THROWS_AS(Subspace(Matrix::Identity(2, 3)), BadDimensions);
  CHECK_THROWS_AS(Subspace(Matrix(3, 0)), BadDimensions);
}

TEST_CASE("project: hand-computed examples") {
  const std::array<std::size_t, 1> first{0};
  const Subspace x_axis = Subspace::coordinate(2, first);
  CHECK((project(vec({3, 4}), x_axis) - vec({3, 0})).norm() < 1e-14);

  const std::vector<Vector> diag = {vec({1, 1})};
  const Subspace d = orthonormalize(diag);
  CHECK((project(vec({1, 1}), d) - vec({1, 1})).norm() < 1e-14);
  CHECK((project(vec({1, 0}), d) - vec({0.5, 0.5})).norm() < 1e-14);
  CHECK_THROWS_AS(project(vec({1, 0, 0}), d), DimensionMismatch);
}

TEST_CASE("project is idempotent and leaves an orthogonal residual") {
  Rng rng = make_rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 6);
    const std::size_t s = 1 + static_cast<std::size_t>(trial % static_cast<int>(n));
    const Subspace l = random_subspace(n, s, rng);
    const Vector x = gaussian_vector(n, rng);
    const Vector p = project(x, l);
    CHECK((project(p, l) - p).norm() < 1e-10);
    CHECK((l.frame().transpose() * (x - p)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("complement is orthogonal and completes the space") {
  const Subspace l = random_subspace(5, 2, std::uint64_t{3});
  const Subspace c = l.complement();
  CHECK(c.dim() == 3);
  CHECK((l.frame().transpose() * c.frame()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(Subspace::full(3).complement(), BadDimensions);
}

TEST_CASE("varrho: oracle values") {
  CHECK(varrho(Matrix::Identity(3, 3)) == doctest::Approx(1.0));
  CHECK(varrho(Vector(vec({3, 2, 1})).asDiagonal().toDenseMatrix()) == doctest::Approx(1.0));
  Matrix a(2, 2);
  a << 0, 2, 0.5, 0;
  CHECK(varrho(a) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(varrho(Matrix::Zero(2, 2)), SingularMatrix);
  Matrix tiny = Matrix::Identity(2, 2) * 1e-7;
  CHECK_THROWS_AS(varrho(tiny), SingularMatrix);
}

TEST_CASE("varrho scales with |c| and its ball sits inside A·B_2") {
  Rng rng = make_rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = Matrix::Random(4, 4) + 2.0 * Matrix::Identity(4, 4);
    const double r = varrho(a);
    CHECK(varrho(-3.0 * a) == doctest::Approx(3.0 * r).epsilon(1e-12));
    const Matrix inv = a.inverse();
    for (int k = 0; k < 50; ++k) {
      Vector u = gaussian_vector(4, rng);
      u *= r / u.norm();
      CHECK((inv * u).norm() <= 1.0 + 1e-10);
    }
  }
}

TEST_CASE("random_subspace is deterministic and orthonormal") {
  const Subspace a = random_subspace(5, 2, std::uint64_t{42});
  const Subspace b = random_subspace(5, 2, std::uint64_t{42});
  CHECK((a.frame() - b.frame()).norm() == 0.0);
  CHECK((a.frame().transpose() * a.frame() - Matrix::Identity(2, 2)).norm() < 1e-12);
  const Subspace full = random_subspace(3, 3, std::uint64_t{1});
  CHECK(std::abs(std::abs(full.frame().determinant()) - 1.0) < 1e-12);
  CHECK_THROWS_AS(random_subspace(3, 4, std::uint64_t{1}), BadDimensions);
  CHECK_THROWS_AS(random_subspace(3, 0, std::uint64_t{1}), BadDimensions);
}

TEST_CASE("random lines in the plane have uniform angle (KS statistic < 0.02)") {
  std::vector<double> angles;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const Subspace l = random_subspace(2, 1, seed);
    double t = std::atan2(l.frame()(1, 0), l.frame()(0, 0));
    if (t < 0) t += std::numbers::pi;
    if (t >= std::numbers::pi) t -= std::numbers::pi;
    angles.push_back(t / std::numbers::pi);
  }
  std::sort(angles.begin(), angles.end());
  double ks = 0.0;
  const double n = static_cast<double>(angles.size());
  for (std::size_t i = 0; i < angles.size(); ++i)
    ks = std::max({ks, (i + 1) / n - angles[i], angles[i] - i / n});
  CHECK(ks < 0.02);
}

TEST_CASE("singular values are sorted descending") {
  Matrix a(3, 3);
  a << 1, 2, 0, 0, 3, 1, 4, 0, 1;
  const Vector sv = singular_values(a);
  CHECK(sv[0] >= sv[1]);
  CHECK(sv[1] >= sv[2]);
  CHECK(sv.prod() == doctest::Approx(std::abs(a.determinant())).epsilon(1e-12));
}
