#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "widthlab/linalg.hpp"
#include "widthlab/rng.hpp"

namespace widthlab {

/// Value and gradient of a function on R^d \ {0}.
using ValueGrad = std::function<std::pair<double, Vector>(const Vector&)>;

struct AscentResult {
  double value = 0.0;
  Vector argmax;
};

struct AscentOptions {
  int max_iterations = 400;
  double rel_tol = 1e-13;
};

/// Maximizes a 0-homogeneous function over the unit sphere by projected
/// gradient ascent with backtracking, from each of the given starts plus
/// `random_starts` Haar starts. Returns the best point found.
AscentResult maximize_on_sphere(const ValueGrad& f, std::size_t dim, const std::vector<Vector>& starts,
                                int random_starts, Rng& rng, const AscentOptions& options = {});

/// Ratio num(u)/den(u) of two 1-homogeneous functions as a ValueGrad.
ValueGrad ratio_objective(ValueGrad num, ValueGrad den);

struct SimplexOptions {
  double initial_step = 0.3;
  double size_tol = 1e-4;
  int max_iterations = 4000;
};

/// Nelder–Mead minimization (GSL nmsimplex2). Returns (min value, argmin).
std::pair<double, Vector> nelder_mead(const std::function<double(const Vector&)>& f, const Vector& x0,
                                      const SimplexOptions& options = {});

}  // namespace widthlab
