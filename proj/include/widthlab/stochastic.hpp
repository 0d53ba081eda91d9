#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include <json.hpp>

#include "widthlab/bodies.hpp"
#include "widthlab/linalg.hpp"

namespace widthlab {

/// Monte-Carlo estimate with a 95% normal-approximation half-width.
struct EstimateWithCI {
  double value = 0.0;
  double half_width = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;

  double lower() const { return value - half_width; }
  double upper() const { return value + half_width; }
  nlohmann::json to_json() const;
};

inline constexpr double kZ95 = 1.959963984540054;
inline constexpr std::size_t kSampleChunk = 4096;

/// Haar (uniform) points on S^{n-1}, normalized Gaussians. Deterministic per
/// seed; sample i is generated by chunk i / 4096 regardless of threading.
std::vector<Vector> haar_sphere_sample(std::size_t n, std::size_t count, std::uint64_t seed);

/// Calls fn(u) for each Haar sample (in chunks, possibly concurrently) and
/// returns the per-sample values in order.
std::vector<double> map_sphere_samples(std::size_t n, std::size_t count, std::uint64_t seed,
                                       const std::function<double(const Vector&)>& fn);

/// E[‖·‖_V] over the Haar measure on S^{n-1}. samples >= 1000.
EstimateWithCI expectation_norm(const Body& v, std::size_t samples, std::uint64_t seed);

/// 2^{1/2} π^{-1/(2p)} Γ((p+1)/2)^{1/p}: upper bound on E[‖·‖_{B_(J,p)}] for
/// systems with Σ φ_k² ≡ n. p >= 2; equals 1 at p = 2.
double expectation_bound(double p);

/// Vol(V)/Vol(reference) through the sphere integral ∫ gauge^{-n} dμ (ratio
/// of the two integrals, common samples; reference = B_2^n is exact).
/// n <= 10. Throws VarianceBlowup when the half-width exceeds 25% of the value.
EstimateWithCI mc_volume_ratio(const Body& v, const Body& reference, std::size_t samples,
                               std::uint64_t seed);

/// Same ratio by hit-or-miss counting in the box [-b_i, b_i] spanned by the
/// two bodies' support functions along the axes.
EstimateWithCI hit_or_miss_volume_ratio(const Body& v, const Body& reference, std::size_t samples,
                                        std::uint64_t seed);

/// Volume of V ∩ L relative to `reference` (a body of dimension dim L).
EstimateWithCI section_volume_ratio(const Body& v, const Subspace& l, const Body& reference,
                                    std::size_t samples, std::uint64_t seed);

/// Volume of P_L V relative to `reference` (dimension dim L).
EstimateWithCI projection_volume_ratio(const Body& v, const Subspace& l, const Body& reference,
                                       std::size_t samples, std::uint64_t seed,
                                       std::size_t directions = 2048);

/// Exact Vol_s(P_L A·B_2^n)/Vol_s(B_2^s) = sqrt(det(F^T A A^T F)).
double ellipsoid_projection_ratio(const Matrix& a, const Subspace& l);

/// rad(V ∩ L | W) = sup{gauge_W(x) : x in V ∩ L}. Multistart projected ascent
/// (a lower bound on the true radius); exact through the restricted quadratic
/// form when V is an ellipsoid and W = B_2.
double section_radius(const Body& v, const Body& w, const Subspace& l, int restarts, std::uint64_t seed);
double body_radius(const Body& v, const Body& w, int restarts, std::uint64_t seed);

/// Farthest-point and random-order greedy packings. Every run is both a
/// δ-separated set and a δ-net of the candidate cloud.
struct NetReport {
  double delta = 0.0;
  std::vector<Vector> net_points;
  std::vector<Vector> packing_points;
  /// Fraction of fresh sampled body points within δ of the net.
  double coverage = 0.0;
  bool certified = false;
};

struct NetOptions {
  std::size_t candidates = 20000;
  std::size_t certificate_samples = 10000;
  double certificate_fraction = 0.999;
  std::size_t max_points = 1000000;
};

/// Farthest-point greedy net started at the origin. n <= 6, delta > 0.
NetReport greedy_net(const Body& v, const Body& reference, double delta, std::uint64_t seed,
                     const NetOptions& options = {});

/// Sizes entering m(2δ) <= n(δ) <= m(δ): over a shared candidate cloud,
/// m(·) is the largest greedy packing found and n(δ) the smallest greedy net.
struct NetChain {
  double delta = 0.0;
  std::size_t packing_2delta = 0;
  std::size_t net_delta = 0;
  std::size_t packing_delta = 0;
  bool certified = false;
  bool holds() const { return packing_2delta <= net_delta && net_delta <= packing_delta; }
};

NetChain net_chain(const Body& v, const Body& reference, double delta, std::uint64_t seed,
                   int orderings = 8, const NetOptions& options = {});

/// Uniform points of V: rejection from the bounding box plus boundary points.
std::vector<Vector> sample_body_points(const Body& v, std::size_t count, Rng& rng,
                                       double boundary_fraction = 0.25);

/// Hit-or-miss volumes of V ∩ (z + L) for the central and offset sections,
/// estimated with common sample points.
struct BrunnReport {
  EstimateWithCI central;
  std::vector<EstimateWithCI> offsets;
  bool holds = false;
};

BrunnReport brunn_sections(const Body& v, const Subspace& l, const std::vector<Vector>& offsets,
                           std::size_t samples, std::uint64_t seed);
bool brunn_section_check(const Body& v, const Subspace& l, const std::vector<Vector>& offsets,
                         std::size_t samples, std::uint64_t seed);

}  // namespace widthlab
