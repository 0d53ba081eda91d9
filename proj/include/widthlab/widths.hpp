#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "widthlab/bodies.hpp"
#include "widthlab/linalg.hpp"
#include "widthlab/manifolds.hpp"
#include "widthlab/multiplier.hpp"
#include "widthlab/ortho_systems.hpp"

namespace widthlab {

enum class WidthKind { gelfand, kolmogorov };
enum class WidthMethod { exact, brute_force, section_bound, cross_section_bound };

std::string to_string(WidthKind kind);
std::string to_string(WidthMethod method);

struct WidthResult {
  WidthKind kind = WidthKind::kolmogorov;
  std::size_t order = 0;
  double value = 0.0;
  WidthMethod method = WidthMethod::exact;
  std::optional<Subspace> witness;

  nlohmann::json to_json() const;
};

/// A universal constant fitted on training trials and then frozen.
struct CalibrationConstant {
  std::string context;
  double value = 1.0;
  std::size_t trials = 0;
};

/// Kolmogorov width d_m of the ellipsoid with the given semiaxes in the
/// Euclidean norm: semiaxes[m] (0-based), 0 for m = n. Throws BadOrder when the
/// semiaxes are not positive and descending or m > n.
double ellipsoid_kolmogorov_exact(std::span<const double> semiaxes, std::size_t m);

struct WidthSearchOptions {
  int outer_restarts = 256;
  int refine_best = 4;
  int inner_restarts = 8;
  double tolerance = 1e-4;
};

/// inf over m-dimensional L of sup_{x in V} dist_Z(x, L). Random frames
/// followed by Nelder–Mead refinement; inner sup by multistart ascent. The
/// result is an upper estimate of the true width. n <= 5.
WidthResult brute_force_kolmogorov(const Body& v, const Body& z, std::size_t m,
                                   const WidthSearchOptions& options, std::uint64_t seed);

/// inf over codimension-m L of rad(V ∩ L | Z). n <= 5.
WidthResult brute_force_gelfand(const Body& v, const Body& z, std::size_t m,
                                const WidthSearchOptions& options, std::uint64_t seed);

/// d^m(A^T B_2) from the Gelfand search against d_m(A B_2) from the
/// Kolmogorov search, agreement within 1e-2.
struct DualityReport {
  double gelfand = 0.0;
  double kolmogorov = 0.0;
  bool agrees = false;
};
DualityReport duality_report(const Matrix& a, std::size_t m, const WidthSearchOptions& options,
                             std::uint64_t seed);
bool duality_check(const Matrix& a, std::size_t m, const WidthSearchOptions& options, std::uint64_t seed);

/// sup{‖f - S_m f‖_2 : f in Λ U_2} = |λ_{m+1}| for a nonincreasing |λ|.
/// Throws NotMonotone.
double fourier_tail_sup(const MultiplierSpec& spec, std::size_t m);

/// Same supremum by maximizing ‖(I - P_m) Λ α‖_2 over the unit sphere of R^n.
double fourier_tail_sup_numeric(std::span<const double> lambdas, std::size_t m, std::uint64_t seed);

/// C · ϱ(A) · E[‖·‖_{B_(J,p)}]^{-3/2}: lower bound on the radius of
/// A·B_(J,p) ∩ L_r in the B_(J,1) gauge for dim L_r >= 2n/3. p >= 2.
double section_lower_bound(const Matrix& a, const OrthonormalSystem& system, double p,
                           const CalibrationConstant& c, std::size_t samples, std::uint64_t seed);
/// Same with a known expectation value.
double section_lower_bound(const Matrix& a, double expectation_p, const CalibrationConstant& c);

/// C · ϱ(A) · (E[‖·‖_{B_(J,q')}] E[‖·‖_{B_(J,p)}])^{-n/s}: lower bound on the
/// radius of A·B_(J,p) ∩ L_s in the B_(J,q) gauge. 1 < q <= 2 <= p.
double cross_section_lower_bound(const Matrix& a, const OrthonormalSystem& system, double p, double q,
                                 std::size_t s, const CalibrationConstant& c, std::size_t samples,
                                 std::uint64_t seed);
double cross_section_lower_bound(const Matrix& a, std::size_t n, std::size_t s, double expectation_qdual,
                                 double expectation_p, const CalibrationConstant& c);

/// Log-log least squares slope.
double loglog_slope(std::span<const double> x, std::span<const double> y);

struct ScalingFit {
  std::vector<int> degrees;
  std::vector<double> n;            // τ_N
  std::vector<double> bound;        // λ(τ_N^{2/d})
  std::vector<double> lambda_at_theta;  // λ(θ_N)
  double slope = 0.0;               // of bound vs n
  double theta_slope = 0.0;         // of λ(θ_N) vs n
  double expected = 0.0;            // -γ/d
};

/// Lower-bound curve λ(s^{2/d}) with λ(t) = t^{-γ/2}, s = τ_N, for N in
/// [n_min, n_max], and its fitted slope.
ScalingFit sobolev_width_order(const ManifoldParams& params, double gamma, int n_min, int n_max);

/// Slope of the exact ellipsoid widths d_m = a_{m+1} of the truncated
/// Sobolev multiplier over every order m in [τ_{n_min}, τ_{n_max}].
double sobolev_exact_width_slope(const ManifoldParams& params, double gamma, int n_min, int n_max);

/// One randomized trial of the section-radius lower bounds: random diagonal
/// A, trig system of size n, `subspaces` Haar subspaces of dimension
/// ceil(2n/3) (no q) or ceil(n/2) (with q). Radius measured in the B_(J,1)
/// or B_(J,q) gauge.
struct RadiusTrialSpec {
  std::size_t n = 3;
  double p = 2.0;
  std::optional<double> q;
  std::uint64_t seed = 0;
  std::size_t subspaces = 10;
  int restarts = 8;
};

struct RadiusTrialResult {
  RadiusTrialSpec spec;
  Matrix a;
  double min_radius = 0.0;
  double unit_bound = 0.0;  // bound with C = 1
  double ratio() const { return min_radius / unit_bound; }
};

/// Expectations E[‖·‖_{B_(J,p)}] for trig systems, keyed by (n, p); filled on
/// demand with a fixed sample budget.
class ExpectationTable {
 public:
  ExpectationTable(std::size_t samples, std::uint64_t seed) : samples_(samples), seed_(seed) {}
  double get(std::size_t n, double p);

 private:
  std::size_t samples_;
  std::uint64_t seed_;
  std::map<std::pair<std::size_t, double>, double> cache_;
  std::mutex mutex_;
};

Matrix random_diagonal(std::size_t n, Rng& rng);

RadiusTrialResult run_radius_trial(const RadiusTrialSpec& spec, ExpectationTable& expectations);

/// Calibrate C as `safety` × the smallest ratio over the training trials.
CalibrationConstant calibrate(const std::string& context, const std::vector<RadiusTrialResult>& training,
                              double safety);

}  // namespace widthlab
