#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "widthlab/linalg.hpp"

namespace widthlab {

/// Discrete probability measure: nodes in the domain with nonnegative
/// weights summing to one.
struct QuadratureRule {
  std::vector<std::vector<double>> nodes;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  /// Throws PreconditionFailed unless weights are >= 0 and sum to 1 within 1e-12.
  void validate() const;
};

/// Finite orthonormal system {phi_k} on a probability space, together with
/// the quadrature used to evaluate L_p norms of its linear combinations.
class OrthonormalSystem {
 public:
  using Evaluator = std::function<double(std::size_t k, std::span<const double> point)>;

  OrthonormalSystem(std::string name, std::size_t n, Evaluator evaluator,
                    QuadratureRule quadrature, std::vector<double> sup_norms);

  const std::string& name() const { return name_; }
  std::size_t dimension() const { return values_.cols(); }
  const QuadratureRule& quadrature() const { return quadrature_; }
  const std::vector<double>& sup_norms() const { return sup_norms_; }
  const Vector& weights() const { return weights_; }

  double evaluate(std::size_t k, std::span<const double> point) const;

  /// Values of every function at every node, nodes × n.
  const Matrix& node_values() const { return values_; }

  /// Gram matrix under the quadrature.
  Matrix gram() const;

  /// The first m functions.
  OrthonormalSystem leading(std::size_t m) const;
  OrthonormalSystem select(std::span<const std::size_t> indices) const;

  nlohmann::json to_json() const;

 private:
  std::string name_;
  Evaluator evaluator_;
  std::vector<std::size_t> index_map_;
  QuadratureRule quadrature_;
  std::vector<double> sup_norms_;
  Vector weights_;
  Matrix values_;
};

/// {1, √2 cos kθ, √2 sin kθ : 1 <= k <= max_degree} on [0, 2π) with the
/// normalized uniform measure and a trapezoid rule. `nodes` = 0 picks
/// max(4·max_degree + 1, 128).
OrthonormalSystem trig_system(int max_degree, std::size_t nodes = 0);

/// Trig system truncated to its first n functions (1, cos, sin, cos 2θ, ...).
OrthonormalSystem trig_system_of_size(std::size_t n, std::size_t nodes = 0);

/// Real spherical harmonics of degree <= max_degree (<= 12) on S², orthonormal
/// for the normalized surface measure. Quadrature is Gauss–Legendre in cos of
/// the polar angle times a uniform azimuthal grid. Points are (polar, azimuth).
OrthonormalSystem sphere_harmonics_system(int max_degree, std::size_t polar_nodes = 0,
                                          std::size_t azimuth_nodes = 0);

/// Gauss–Legendre nodes and weights on [-1, 1] (weights sum to 2).
void gauss_legendre(std::size_t count, std::vector<double>& nodes, std::vector<double>& weights);

/// Conjugate exponent p' with 1/p + 1/p' = 1 (1 <-> ∞).
double conjugate_exponent(double p);

/// ‖Σ α_k φ_k‖_p under the quadrature measure; p = ∞ gives the max over nodes.
double lp_norm(const OrthonormalSystem& system, const Vector& alpha, double p);

/// A (sub)gradient of alpha -> lp_norm(system, alpha, p).
Vector lp_norm_gradient(const OrthonormalSystem& system, const Vector& alpha, double p);

/// Subfamily with uniformly bounded sup-norms, picked greedily by smallest
/// sup-norm. `fraction` is the proportion C in (0, 1).
struct EssentialSubsystem {
  std::vector<std::size_t> indices;
  double bound = 0.0;
  double fraction = 0.0;
  std::size_t parent_dimension = 0;
};

/// Throws CannotSatisfy when the selected bound exceeds `bound_limit`.
EssentialSubsystem essential_subsystem(const OrthonormalSystem& system, double fraction,
                                       double bound_limit = std::numeric_limits<double>::infinity());

}  // namespace widthlab
