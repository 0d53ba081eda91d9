#include "widthlab/optimize.hpp"

#include <cmath>
#include <limits>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

namespace widthlab {

namespace {

AscentResult ascend_from(const ValueGrad& f, Vector u, const AscentOptions& options) {
  u.normalize();
  auto [value, grad] = f(u);
  if (!std::isfinite(value)) return {value, u};
  double step = 1.0;
  int stalled = 0;
  for (int it = 0; it < options.max_iterations; ++it) {
    const Vector tangent = grad - grad.dot(u) * u;
    if (!(tangent.norm() > 1e-300)) break;
    bool improved = false;
    double gain = 0.0;
    while (step > 1e-18) {
      Vector cand = u + step * tangent;
      cand.normalize();
      auto [cv, cg] = f(cand);
      if (std::isfinite(cv) && cv > value) {
        gain = cv - value;
        u = std::move(cand);
        value = cv;
        grad = std::move(cg);
        step = std::min(step * 2.0, 1e6);
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
    if (gain <= options.rel_tol * std::abs(value)) {
      if (++stalled >= 3) break;
    } else {
      stalled = 0;
    }
  }
  return {value, u};
}

}  // namespace

AscentResult maximize_on_sphere(const ValueGrad& f, std::size_t dim, const std::vector<Vector>& starts,
                                int random_starts, Rng& rng, const AscentOptions& options) {
  AscentResult best{-std::numeric_limits<double>::infinity(), Vector::Zero(dim)};
  auto consider = [&](const Vector& start) {
    if (!(start.norm() > 0.0)) return;
    AscentResult r = ascend_from(f, start, options);
    if (r.value > best.value) best = std::move(r);
  };
  for (const auto& s : starts) consider(s);
  for (int i = 0; i < random_starts; ++i) consider(gaussian_vector(dim, rng));
  return best;
}

ValueGrad ratio_objective(ValueGrad num, ValueGrad den) {
  return [num = std::move(num), den = std::move(den)](const Vector& u) -> std::pair<double, Vector> {
    auto [n, gn] = num(u);
    auto [d, gd] = den(u);
    if (!(d > 0.0)) return {std::numeric_limits<double>::infinity(), Vector::Zero(u.size())};
    const double r = n / d;
    return {r, (gn - r * gd) / d};
  };
}

namespace {

double gsl_trampoline(const gsl_vector* x, void* params) {
  const auto& f = *static_cast<const std::function<double(const Vector&)>*>(params);
  Vector v(x->size);
  for (std::size_t i = 0; i < x->size; ++i) v[static_cast<Eigen::Index>(i)] = gsl_vector_get(x, i);
  const double r = f(v);
  return std::isfinite(r) ? r : std::numeric_limits<double>::max();
}

}  // namespace

std::pair<double, Vector> nelder_mead(const std::function<double(const Vector&)>& f, const Vector& x0,
                                      const SimplexOptions& options) {
  const std::size_t n = x0.size();
  gsl_set_error_handler_off();
  gsl_multimin_function fn{&gsl_trampoline, n, const_cast<void*>(static_cast<const void*>(&f))};
  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* step = gsl_vector_alloc(n);
  for (std::size_t i = 0; i < n; ++i) {
    gsl_vector_set(x, i, x0[static_cast<Eigen::Index>(i)]);
    gsl_vector_set(step, i, options.initial_step);
  }
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
  gsl_multimin_fminimizer_set(s, &fn, x, step);
  for (int it = 0; it < options.max_iterations; ++it) {
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), options.size_tol) == GSL_SUCCESS) break;
  }
  Vector best(n);
  for (std::size_t i = 0; i < n; ++i) best[static_cast<Eigen::Index>(i)] = gsl_vector_get(s->x, i);
  const double value = s->fval;
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(step);
  gsl_vector_free(x);
  return {value, best};
}

}  // namespace widthlab
