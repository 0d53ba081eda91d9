#include "widthlab/linalg.hpp"

#include <cmath>
#include <string>

#include "widthlab/error.hpp"

namespace widthlab {

Vector singular_values(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues();
}

Subspace::Subspace(Matrix frame) : frame_(std::move(frame)) {
  if (frame_.cols() == 0 || frame_.rows() == 0 || frame_.cols() > frame_.rows())
    throw BadDimensions("subspace frame must be n×s with 1 <= s <= n, got " + std::to_string(frame_.rows()) +
                        "×" + std::to_string(frame_.cols()));
  const Matrix gram = frame_.transpose() * frame_;
  const double dev = (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  if (dev > kOrthonormalityTol)
    throw RankDeficient("frame columns are not orthonormal (deviation " + std::to_string(dev) + ")");
}

Subspace Subspace::complement() const {
  const std::size_t n = ambient_dim();
  const std::size_t s = dim();
  if (s == n) throw BadDimensions("complement of the full space is {0}");
  // Full QR of the frame: trailing columns of Q span the complement.
  Eigen::HouseholderQR<Matrix> qr(frame_);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  Matrix rest = q.rightCols(n - s);
  // Clean up rounding so the frame passes the orthonormality check.
  return orthonormalize(rest);
}

Subspace Subspace::full(std::size_t n) { return Subspace(Matrix::Identity(n, n)); }

Subspace Subspace::coordinate(std::size_t n, std::span<const std::size_t> indices) {
  Matrix f = Matrix::Zero(n, indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    if (indices[j] >= n) throw BadDimensions("coordinate index out of range");
    f(indices[j], j) = 1.0;
  }
  return Subspace(std::move(f));
}

Subspace orthonormalize(const Matrix& columns) {
  const std::size_t n = columns.rows();
  const std::size_t s = columns.cols();
  if (s == 0 || n == 0 || s > n) throw RankDeficient("need 1 <= count <= ambient dimension");
  if (!columns.allFinite()) throw RankDeficient("non-finite entries");

  const Vector sv = singular_values(columns);
  if (sv[0] == 0.0 || sv[s - 1] <= kRankTol * sv[0])
    throw RankDeficient("numerical rank below " + std::to_string(s));

  Matrix q = columns;
  for (std::size_t j = 0; j < s; ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
    const double norm = q.col(j).norm();
    if (norm <= kRankTol * sv[0]) throw RankDeficient("column " + std::to_string(j) + " is dependent");
    q.col(j) /= norm;
  }
  return Subspace(std::move(q));
}

Subspace orthonormalize(std::span<const Vector> vectors) {
  if (vectors.empty()) throw RankDeficient("no vectors");
  const std::size_t n = vectors.front().size();
  Matrix m(n, vectors.size());
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    if (static_cast<std::size_t>(vectors[j].size()) != n) throw DimensionMismatch("vectors differ in length");
    m.col(j) = vectors[j];
  }
  return orthonormalize(m);
}

Vector project(const Vector& x, const Subspace& l) {
  if (static_cast<std::size_t>(x.size()) != l.ambient_dim())
    throw DimensionMismatch("vector of length " + std::to_string(x.size()) + " vs ambient dimension " +
                            std::to_string(l.ambient_dim()));
  return l.frame() * (l.frame().transpose() * x);
}

double varrho(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) throw SingularMatrix("matrix must be square and nonempty");
  const Vector sv = singular_values(a);
  double det = 1.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) det *= sv[i];
  if (!(det > kSingularDetTol)) throw SingularMatrix("|det A| <= 1e-12");
  return sv[sv.size() - 1];
}

Subspace random_subspace(std::size_t n, std::size_t s, Rng& rng) {
  if (s < 1 || s > n) throw BadDimensions("need 1 <= s <= n");
  for (;;) {
    Matrix g(n, s);
    for (std::size_t j = 0; j < s; ++j) g.col(j) = gaussian_vector(n, rng);
    try {
      return orthonormalize(g);
    } catch (const RankDeficient&) {
      // probability zero; draw again
    }
  }
}

Subspace random_subspace(std::size_t n, std::size_t s, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0x5eed);
  return random_subspace(n, s, rng);
}

}  // namespace widthlab
