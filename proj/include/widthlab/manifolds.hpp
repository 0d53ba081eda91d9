#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "widthlab/multiplier.hpp"

namespace widthlab {

enum class ManifoldFamily { sphere, real_projective, complex_projective, quaternionic_projective, cayley_plane };

/// Compact two-point homogeneous space described by its Jacobi parameters.
/// alpha = (d-2)/2 for every family; beta depends on the family.
struct ManifoldParams {
  ManifoldFamily family = ManifoldFamily::sphere;
  int d = 2;
  double alpha = 0.0;
  double beta = 0.0;
  /// Only even-degree harmonics survive (real projective spaces).
  bool even_only = false;

  std::string name() const;

  /// Throw BadDimensions for an inadmissible d.
  static ManifoldParams sphere(int d);
  static ManifoldParams real_projective(int d);
  static ManifoldParams complex_projective(int d);
  static ManifoldParams quaternionic_projective(int d);
  static ManifoldParams cayley_plane();
};

/// k-th eigenvalue of the Laplace–Beltrami operator, θ_k = k(k+α+β+1);
/// for real projective spaces the k-th eigenvalue sits at degree 2k.
double eigenvalue(const ManifoldParams& params, int k);

/// Exact dimension of the k-th eigenspace (Jacobi-weight formula, exact
/// rational arithmetic). Throws Error on uint64 overflow.
std::uint64_t eigenspace_dim(const ManifoldParams& params, int k);

/// τ_N = Σ_{k<=N} dim H_k.
std::uint64_t cumulative_dim(const ManifoldParams& params, int n);

/// τ_N / θ_N^(d/2). N >= 1.
double weyl_ratio(const ManifoldParams& params, int n);

/// Tabulated spectrum up to max_degree.
struct SpectralData {
  ManifoldParams params;
  int max_degree = 0;
  std::vector<double> theta;
  std::vector<std::uint64_t> dims;
  std::vector<std::uint64_t> tau;

  static SpectralData build(const ManifoldParams& params, int max_degree);

  /// CSV with header k,theta,dim,tau.
  std::string to_csv() const;
};

/// λ(t) = t^(-γ/2) from degree 1 on (constants excluded).
MultiplierSpec sobolev_multiplier(const ManifoldParams& params, double gamma);

/// Expand a multiplier into its first n diagonal entries. Function specs are
/// expanded over the spectrum (θ_k repeated dims(k) times, from start_degree);
/// sequence specs are truncated. Throws SpectrumExhausted when there are
/// fewer than n entries.
std::vector<double> expand_multiplier(const MultiplierSpec& spec, const SpectralData& spectral,
                                      std::size_t n);

}  // namespace widthlab
