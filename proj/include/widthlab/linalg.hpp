#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "widthlab/rng.hpp"

namespace widthlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kOrthonormalityTol = 1e-10;
inline constexpr double kRankTol = 1e-10;
inline constexpr double kSingularDetTol = 1e-12;

/// Singular values in descending order.
Vector singular_values(const Matrix& a);

/// An s-dimensional subspace of R^n stored as an n×s matrix with
/// orthonormal columns. 1 <= s <= n.
class Subspace {
 public:
  /// Throws BadDimensions if the frame is empty or wider than tall and
  /// RankDeficient if its columns are not orthonormal to 1e-10.
  explicit Subspace(Matrix frame);

  std::size_t ambient_dim() const { return frame_.rows(); }
  std::size_t dim() const { return frame_.cols(); }
  const Matrix& frame() const { return frame_; }

  /// Frame coordinates -> ambient vector.
  Vector embed(const Vector& coords) const { return frame_ * coords; }
  /// Ambient vector -> frame coordinates of its orthogonal projection.
  Vector coordinates(const Vector& x) const { return frame_.transpose() * x; }

  /// Orthogonal complement; throws BadDimensions when dim() == ambient_dim().
  Subspace complement() const;

  static Subspace full(std::size_t n);
  /// span{e_i : i in indices}
  static Subspace coordinate(std::size_t n, std::span<const std::size_t> indices);

 private:
  Matrix frame_;
};

/// Gram–Schmidt (two passes) on the columns, after a numerical rank check
/// relative to the largest singular value.
Subspace orthonormalize(const Matrix& columns);
Subspace orthonormalize(std::span<const Vector> vectors);

/// Orthogonal projection of x onto L.
Vector project(const Vector& x, const Subspace& l);

/// Smallest singular value of A, i.e. the radius of the largest Euclidean
/// ball inside A·B_2^n. Throws SingularMatrix when |det A| <= 1e-12.
double varrho(const Matrix& a);

/// Haar-distributed random subspace: orthonormalized Gaussian columns.
Subspace random_subspace(std::size_t n, std::size_t s, Rng& rng);
Subspace random_subspace(std::size_t n, std::size_t s, std::uint64_t seed);

}  // namespace widthlab
