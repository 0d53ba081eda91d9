#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "widthlab/linalg.hpp"
#include "widthlab/manifolds.hpp"
#include "widthlab/multiplier.hpp"
#include "widthlab/ortho_systems.hpp"

namespace widthlab {

enum class BodyKind { euclidean, lp_ball, induced, linear_image, section, projection, polar, custom };

std::string to_string(BodyKind kind);

struct BodyDescriptor {
  BodyKind kind = BodyKind::custom;
  std::string system;  // orthonormal system name for induced bodies
  double p = 2.0;
  std::optional<Matrix> matrix;  // linear image matrix
  std::string base;              // label of the base body, if any

  nlohmann::json to_json() const;
};

/// Convex origin-symmetric body in R^n given by its gauge (Minkowski
/// functional). Optional hooks supply an analytic gradient, the support
/// function, and the support point argmax{<x, y> : x in V}; missing hooks fall
/// back to finite differences or numerical ascent.
class Body {
 public:
  using Gauge = std::function<double(const Vector&)>;
  using Gradient = std::function<Vector(const Vector&)>;
  using Support = std::function<double(const Vector&)>;
  using SupportPoint = std::function<Vector(const Vector&)>;

  Body(std::size_t dim, Gauge gauge, BodyDescriptor descriptor, std::string label);

  Body& with_gradient(Gradient g);
  Body& with_support(Support h);
  Body& with_support_point(SupportPoint sp);
  /// Marks the body as A·B_2^n.
  Body& with_ellipsoid(Matrix a);

  std::size_t dimension() const { return dim_; }
  const std::string& label() const { return label_; }
  const BodyDescriptor& descriptor() const { return descriptor_; }

  double gauge(const Vector& x) const { return gauge_(x); }
  bool contains(const Vector& x) const { return gauge_(x) <= 1.0; }
  Vector gauge_gradient(const Vector& x) const;

  bool has_exact_support() const { return static_cast<bool>(support_); }
  bool has_support_point() const { return static_cast<bool>(support_point_); }
  /// h_V(y) = max{<x, y> : x in V}. Uses the exact hook when present,
  /// otherwise multistart ascent (a lower bound, accurate to ~1e-9 for
  /// smooth gauges).
  double support(const Vector& y) const;
  Vector support_point(const Vector& y) const;

  /// A with V = A·B_2^n, when known.
  const std::optional<Matrix>& ellipsoid_matrix() const { return ellipsoid_; }
  bool is_euclidean_ball() const { return descriptor_.kind == BodyKind::euclidean; }

 private:
  std::size_t dim_;
  Gauge gauge_;
  Gradient gradient_;
  Support support_;
  SupportPoint support_point_;
  BodyDescriptor descriptor_;
  std::string label_;
  std::optional<Matrix> ellipsoid_;
};

Body euclidean_ball(std::size_t n);
/// Finite-dimensional l_p ball (p in [1, ∞]).
Body lp_ball(std::size_t n, double p);
/// B_(J,p)^n: gauge α -> ‖Σ α_k φ_k‖_p. For p = 2 this is B_2^n.
Body induced_ball(const OrthonormalSystem& system, double p);
Body induced_ball(std::shared_ptr<const OrthonormalSystem> system, double p);
/// A·V with gauge x -> gauge_V(A^{-1} x). Throws SingularMatrix.
Body linear_image(const Body& v, const Matrix& a);

/// V ∩ L as a body in the frame coordinates of L.
Body section_body(const Body& v, const Subspace& l);

/// P_L V in frame coordinates of L. Ellipsoids are handled exactly; other
/// bodies get the circumscribed polytope {c : <c, y_j> <= h_V(F y_j)} over
/// `directions` Haar directions (a superset of the projection).
Body projection_body(const Body& v, const Subspace& l, std::size_t directions, std::uint64_t seed);

/// Polar body V° (gauge = support function of V). Without an exact support
/// hook, h_V is evaluated by a tabulated boundary (table_size directions)
/// followed by local ascent.
Body polar_body(const Body& v, std::size_t table_size, std::uint64_t seed);

/// Support function of V by multistart ascent of <y, u>/gauge_V(u).
double support_by_ascent(const Body& v, const Vector& y, int restarts, std::uint64_t seed);

/// Support function of B_(J,p) at x (the dual norm), by ascent.
double dual_gauge(const OrthonormalSystem& system, double p, const Vector& x, int restarts = 32,
                  std::uint64_t seed = 0);

/// Λ_n = diag(λ_1, ..., λ_n). Throws SpectrumExhausted.
Matrix truncate_multiplier(const MultiplierSpec& spec, const SpectralData& spectral, std::size_t n);

}  // namespace widthlab
