#include "widthlab/widths.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "widthlab/error.hpp"
#include "widthlab/optimize.hpp"
#include "widthlab/stochastic.hpp"

namespace widthlab {

std::string to_string(WidthKind kind) { return kind == WidthKind::gelfand ? "gelfand" : "kolmogorov"; }

std::string to_string(WidthMethod method) {
  switch (method) {
    case WidthMethod::exact: return "exact";
    case WidthMethod::brute_force: return "brute_force";
    case WidthMethod::section_bound: return "lower_bound_thm1";
    case WidthMethod::cross_section_bound: return "lower_bound_thm2";
  }
  return "exact";
}

nlohmann::json WidthResult::to_json() const {
  nlohmann::json j = {{"kind", to_string(kind)}, {"m", order}, {"value", value}, {"method", to_string(method)}};
  if (witness) {
    const Matrix& f = witness->frame();
    std::vector<std::vector<double>> rows(f.rows(), std::vector<double>(f.cols()));
    for (Eigen::Index i = 0; i < f.rows(); ++i)
      for (Eigen::Index k = 0; k < f.cols(); ++k) rows[i][k] = f(i, k);
    j["witness"] = rows;
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

double ellipsoid_kolmogorov_exact(std::span<const double> semiaxes, std::size_t m) {
  if (semiaxes.empty()) throw BadOrder("no semiaxes");
  for (std::size_t i = 0; i < semiaxes.size(); ++i) {
    if (!(semiaxes[i] > 0.0)) throw BadOrder("semiaxes must be positive");
    if (i > 0 && semiaxes[i] > semiaxes[i - 1]) throw BadOrder("semiaxes must be sorted descending");
  }
  if (m > semiaxes.size()) throw BadOrder("order exceeds the dimension");
  return m == semiaxes.size() ? 0.0 : semiaxes[m];
}

namespace {

constexpr double kDegenerate = 1e300;

void check_width_args(const Body& v, const Body& z, std::size_t m) {
  if (v.dimension() > 5) throw BadDimensions("brute-force widths are limited to n <= 5");
  if (z.dimension() != v.dimension()) throw DimensionMismatch("norm body dimension differs");
  if (m > v.dimension()) throw BadOrder("order exceeds the dimension");
}

/// Orthonormal frame from free parameters, or nullopt when degenerate.
std::optional<Matrix> frame_from(const Vector& params, std::size_t n, std::size_t m) {
  const Matrix raw = Eigen::Map<const Matrix>(params.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  const Vector sv = singular_values(raw);
  if (!(sv[sv.size() - 1] > 1e-8 * sv[0])) return std::nullopt;
  Eigen::HouseholderQR<Matrix> qr(raw);
  return Matrix(qr.householderQ() * Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m)));
}

/// Random Haar frames, then Nelder–Mead from the best few.
std::pair<double, Matrix> search_frames(std::size_t n, std::size_t m, const std::function<double(const Matrix&)>& cost,
                                        const WidthSearchOptions& options, std::uint64_t seed) {
  const std::size_t outer = static_cast<std::size_t>(std::max(1, options.outer_restarts));
  auto scored = parallel_map(outer, [&](std::size_t i) {
    const Subspace l = random_subspace(n, m, mix_seed(seed, i));
    return std::pair<double, Matrix>{cost(l.frame()), l.frame()};
  });
  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scored[a].first < scored[b].first; });
  auto objective = [&](const Vector& params) {
    const auto f = frame_from(params, n, m);
    return f ? cost(*f) : kDegenerate;
  };
  const std::size_t refine = std::min<std::size_t>(order.size(), static_cast<std::size_t>(std::max(0, options.refine_best)));
  SimplexOptions simplex;
  simplex.size_tol = options.tolerance;
  auto refined = parallel_map(refine, [&](std::size_t r) {
    const Matrix& start = scored[order[r]].second;
    const Vector x0 = Eigen::Map<const Vector>(start.data(), start.size());
    const auto [value, x] = nelder_mead(objective, x0, simplex);
    const auto f = frame_from(x, n, m);
    return f ? std::pair<double, Matrix>{value, *f} : scored[order[r]];
  });
  std::pair<double, Matrix> best = scored[order[0]];
  for (const auto& r : refined)
    if (r.first < best.first) best = r;
  return best;
}

/// sup over V of a 1-homogeneous convex function `dist` (ambient coordinates).
double sup_over_body(const Body& v, const std::function<double(const Vector&)>& dist, const Body& dist_body,
                     int restarts, std::uint64_t seed) {
  ValueGrad num = [&dist_body](const Vector& x) {
    return std::pair<double, Vector>{dist_body.gauge(x), dist_body.gauge_gradient(x)};
  };
  ValueGrad den = [&v](const Vector& x) { return std::pair<double, Vector>{v.gauge(x), v.gauge_gradient(x)}; };
  Rng rng = make_rng(seed, 0x5b);
  AscentOptions opts;
  opts.max_iterations = 200;
  const AscentResult r = maximize_on_sphere(ratio_objective(num, den), v.dimension(), {}, restarts, rng, opts);
  double best = r.value;
  if (v.has_support_point()) {
    // Conditional-gradient refinement: x <- argmax_{V} <∇dist(x), ·>.
    Vector x = r.argmax / v.gauge(r.argmax);
    for (int it = 0; it < 200; ++it) {
      const Vector g = dist_body.gauge_gradient(x);
      if (!(g.norm() > 0.0)) break;
      const Vector next = v.support_point(g);
      const double value = dist(next);
      if (!(value > best * (1.0 + 1e-14))) {
        best = std::max(best, value);
        break;
      }
      best = value;
      x = next;
    }
  }
  return best;
}

}  // namespace

WidthResult brute_force_kolmogorov(const Body& v, const Body& z, std::size_t m, const WidthSearchOptions& options,
                                   std::uint64_t seed) {
  check_width_args(v, z, m);
  const std::size_t n = v.dimension();
  WidthResult result;
  result.kind = WidthKind::kolmogorov;
  result.order = m;
  result.method = WidthMethod::brute_force;
  const int inner = std::max(8, options.inner_restarts);
  if (m == n) {
    result.value = 0.0;
    result.witness = Subspace::full(n);
    return result;
  }
  if (m == 0) {
    result.value = body_radius(v, z, inner, seed);
    return result;
  }
  const bool euclidean = z.is_euclidean_ball();
  auto cost = [&](const Matrix& f) -> double {
    const Matrix q = Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) - f * f.transpose();
    if (euclidean && v.ellipsoid_matrix()) return singular_values(q * *v.ellipsoid_matrix())[0];
    std::function<double(const Vector&)> dist;
    if (euclidean) {
      dist = [q](const Vector& x) { return (q * x).norm(); };
    } else {
      dist = [&z, f, m](const Vector& x) {
        const auto [value, y] = nelder_mead([&](const Vector& c) { return z.gauge(x - f * c); },
                                            Vector(f.transpose() * x), SimplexOptions{0.1, 1e-9, 4000});
        (void)y;
        return value;
      };
    }
    BodyDescriptor d;
    Body dist_body(n, dist, d, "dist_L");
    if (euclidean)
      dist_body.with_gradient([q](const Vector& x) {
        const Vector qx = q * x;
        const double r = qx.norm();
        return r > 0.0 ? Vector(q * qx / r) : Vector(Vector::Zero(x.size()));
      });
    return sup_over_body(v, dist, dist_body, inner, seed);
  };
  const auto [value, frame] = search_frames(n, m, cost, options, seed);
  result.value = value;
  result.witness = Subspace(frame);
  return result;
}

WidthResult brute_force_gelfand(const Body& v, const Body& z, std::size_t m, const WidthSearchOptions& options,
                                std::uint64_t seed) {
  check_width_args(v, z, m);
  const std::size_t n = v.dimension();
  WidthResult result;
  result.kind = WidthKind::gelfand;
  result.order = m;
  result.method = WidthMethod::brute_force;
  const int inner = std::max(8, options.inner_restarts);
  if (m == n) {
    result.value = 0.0;
    return result;
  }
  if (m == 0) {
    result.value = body_radius(v, z, inner, seed);
    result.witness = Subspace::full(n);
    return result;
  }
  // Search over the m-dimensional annihilated directions K; L = K^⊥.
  auto cost = [&](const Matrix& k) { return section_radius(v, z, Subspace(k).complement(), inner, seed); };
  const auto [value, frame] = search_frames(n, m, cost, options, seed);
  result.value = value;
  result.witness = Subspace(frame).complement();
  return result;
}

DualityReport duality_report(const Matrix& a, std::size_t m, const WidthSearchOptions& options, std::uint64_t seed) {
  const std::size_t n = static_cast<std::size_t>(a.rows());
  if (n > 5) throw BadDimensions("duality check is limited to n <= 5");
  const Body ball = euclidean_ball(n);
  DualityReport report;
  report.gelfand = brute_force_gelfand(linear_image(ball, a.transpose()), ball, m, options, seed).value;
  report.kolmogorov = brute_force_kolmogorov(linear_image(ball, a), ball, m, options, seed).value;
  report.agrees = std::abs(report.gelfand - report.kolmogorov) <= 1e-2;
  return report;
}

bool duality_check(const Matrix& a, std::size_t m, const WidthSearchOptions& options, std::uint64_t seed) {
  return duality_report(a, m, options, seed).agrees;
}

double fourier_tail_sup(const MultiplierSpec& spec, std::size_t m) {
  std::vector<double> values;
  if (spec.is_function()) {
    for (std::size_t k = 1; k <= m + 1; ++k) values.push_back(std::abs(spec.lambda_fn(static_cast<double>(k))));
  } else {
    if (spec.sequence.size() <= m) throw SpectrumExhausted("sequence has no entry of index m+1");
    for (std::size_t k = 0; k < spec.sequence.size(); ++k) values.push_back(std::abs(spec.sequence[k]));
  }
  for (std::size_t k = 1; k < values.size(); ++k)
    if (values[k] > values[k - 1]) throw NotMonotone("|λ_k| increases at k = " + std::to_string(k + 1));
  return values[m];
}

double fourier_tail_sup_numeric(std::span<const double> lambdas, std::size_t m, std::uint64_t seed) {
  const std::size_t n = lambdas.size();
  if (m > n) throw BadOrder("order exceeds the dimension");
  if (m == n) return 0.0;
  Vector tail = Vector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t k = m; k < n; ++k) tail[static_cast<Eigen::Index>(k)] = lambdas[k];
  ValueGrad num = [&tail](const Vector& a) {
    const Vector t = tail.cwiseProduct(a);
    const double r = t.norm();
    return std::pair<double, Vector>{r, r > 0.0 ? Vector(tail.cwiseProduct(t) / r) : Vector(Vector::Zero(a.size()))};
  };
  ValueGrad den = [](const Vector& a) {
    const double r = a.norm();
    return std::pair<double, Vector>{r, a / r};
  };
  Rng rng = make_rng(seed, 0xf0);
  AscentOptions opts;
  opts.max_iterations = 4000;
  opts.rel_tol = 1e-15;
  const AscentResult r = maximize_on_sphere(ratio_objective(num, den), n, {}, 16, rng, opts);
  // Polish with power steps on the quadratic form α -> ‖(I - P_m) Λ α‖².
  Vector x = r.argmax;
  double best = r.value;
  for (int it = 0; it < 10000; ++it) {
    Vector next = tail.cwiseProduct(tail.cwiseProduct(x));
    const double norm = next.norm();
    if (!(norm > 0.0)) break;
    next /= norm;
    const double value = tail.cwiseProduct(next).norm();
    const bool stalled = value <= best * (1.0 + 1e-16);
    best = std::max(best, value);
    x = next;
    if (stalled && it > 8) break;
  }
  return best;
}

double section_lower_bound(const Matrix& a, double expectation_p, const CalibrationConstant& c) {
  if (!(c.value > 0.0)) throw PreconditionFailed("calibration constant must be positive");
  return c.value * varrho(a) * std::pow(expectation_p, -1.5);
}

double section_lower_bound(const Matrix& a, const OrthonormalSystem& system, double p, const CalibrationConstant& c,
                           std::size_t samples, std::uint64_t seed) {
  if (!(p >= 2.0)) throw PreconditionFailed("section bound needs p >= 2");
  varrho(a);
  const double e = expectation_norm(induced_ball(system, p), samples, seed).value;
  return section_lower_bound(a, e, c);
}

double cross_section_lower_bound(const Matrix& a, std::size_t n, std::size_t s, double expectation_qdual,
                                 double expectation_p, const CalibrationConstant& c) {
  if (!(c.value > 0.0)) throw PreconditionFailed("calibration constant must be positive");
  if (s == 0 || s > n) throw BadDimensions("section dimension must lie in [1, n]");
  return c.value * varrho(a) *
         std::pow(expectation_qdual * expectation_p, -static_cast<double>(n) / static_cast<double>(s));
}

double cross_section_lower_bound(const Matrix& a, const OrthonormalSystem& system, double p, double q, std::size_t s,
                                 const CalibrationConstant& c, std::size_t samples, std::uint64_t seed) {
  if (!(p >= 2.0)) throw PreconditionFailed("cross-section bound needs p >= 2");
  if (!(q > 1.0 && q <= 2.0)) throw PreconditionFailed("cross-section bound needs 1 < q <= 2");
  varrho(a);
  const double e_p = expectation_norm(induced_ball(system, p), samples, seed).value;
  const double e_q = expectation_norm(induced_ball(system, conjugate_exponent(q)), samples, mix_seed(seed, 1)).value;
  return cross_section_lower_bound(a, system.dimension(), s, e_q, e_p, c);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw PreconditionFailed("slope fit needs two or more paired points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw PreconditionFailed("log-log fit needs positive data");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

ScalingFit sobolev_width_order(const ManifoldParams& params, double gamma, int n_min, int n_max) {
  if (!(gamma > 0.0)) throw PreconditionFailed("gamma must be positive");
  if (n_min < 1 || n_max <= n_min) throw PreconditionFailed("need 1 <= n_min < n_max");
  ScalingFit fit;
  fit.expected = -gamma / params.d;
  for (int k = n_min; k <= n_max; ++k) {
    const double tau = static_cast<double>(cumulative_dim(params, k));
    fit.degrees.push_back(k);
    fit.n.push_back(tau);
    fit.bound.push_back(std::pow(std::pow(tau, 2.0 / params.d), -gamma / 2.0));
    fit.lambda_at_theta.push_back(std::pow(eigenvalue(params, k), -gamma / 2.0));
  }
  fit.slope = loglog_slope(fit.n, fit.bound);
  fit.theta_slope = loglog_slope(fit.n, fit.lambda_at_theta);
  return fit;
}

double sobolev_exact_width_slope(const ManifoldParams& params, double gamma, int n_min, int n_max) {
  if (n_min < 1 || n_max <= n_min) throw PreconditionFailed("need 1 <= n_min < n_max");
  const SpectralData spectral = SpectralData::build(params, n_max + 1);
  const std::size_t lo = spectral.tau[static_cast<std::size_t>(n_min)];
  const std::size_t hi = spectral.tau[static_cast<std::size_t>(n_max)];
  // Entries start at degree 1, so d_m = a_{m+1} is entry m (0-based).
  const std::vector<double> a = expand_multiplier(sobolev_multiplier(params, gamma), spectral, hi + 1);
  std::vector<double> m_values, widths;
  for (std::size_t m = lo; m <= hi; ++m) {
    m_values.push_back(static_cast<double>(m));
    widths.push_back(a[m]);
  }
  return loglog_slope(m_values, widths);
}

double ExpectationTable::get(std::size_t n, double p) {
  std::lock_guard<std::mutex> lock(mutex_);
  const auto key = std::make_pair(n, p);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  const OrthonormalSystem system = trig_system_of_size(n);
  const std::uint64_t stream = mix_seed(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(std::llround(p * 1000.0)));
  const double value = expectation_norm(induced_ball(system, p), samples_, mix_seed(seed_, stream)).value;
  cache_.emplace(key, value);
  return value;
}

Matrix random_diagonal(std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = std::exp(unit(rng));
  return a;
}

RadiusTrialResult run_radius_trial(const RadiusTrialSpec& spec, ExpectationTable& expectations) {
  if (spec.n < 2) throw BadDimensions("radius trials need n >= 2");
  if (!(spec.p >= 2.0)) throw PreconditionFailed("radius trials need p >= 2");
  if (spec.q && !(*spec.q > 1.0 && *spec.q <= 2.0)) throw PreconditionFailed("radius trials need 1 < q <= 2");
  const std::size_t n = spec.n;
  Rng rng = make_rng(spec.seed, 0x7a1);
  RadiusTrialResult result;
  result.spec = spec;
  result.a = random_diagonal(n, rng);
  auto system = std::make_shared<const OrthonormalSystem>(trig_system_of_size(n));
  const Body v = linear_image(induced_ball(system, spec.p), result.a);
  const Body w = induced_ball(system, spec.q ? *spec.q : 1.0);
  const std::size_t dim = spec.q ? (n + 1) / 2 : (2 * n + 2) / 3;
  std::vector<Subspace> subspaces;
  for (std::size_t j = 0; j < spec.subspaces; ++j) subspaces.push_back(random_subspace(n, dim, rng));
  const auto radii = parallel_map(subspaces.size(), [&](std::size_t j) {
    return section_radius(v, w, subspaces[j], spec.restarts, mix_seed(spec.seed, j));
  });
  result.min_radius = *std::min_element(radii.begin(), radii.end());
  const CalibrationConstant unit{"unit", 1.0, 0};
  const double e_p = expectations.get(n, spec.p);
  if (spec.q)
    result.unit_bound = cross_section_lower_bound(result.a, n, dim, expectations.get(n, conjugate_exponent(*spec.q)), e_p, unit);
  else
    result.unit_bound = section_lower_bound(result.a, e_p, unit);
  return result;
}

CalibrationConstant calibrate(const std::string& context, const std::vector<RadiusTrialResult>& training,
                              double safety) {
  if (training.empty()) throw PreconditionFailed("calibration needs training trials");
  if (!(safety > 0.0 && safety <= 1.0)) throw PreconditionFailed("safety factor must lie in (0, 1]");
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& t : training) lo = std::min(lo, t.ratio());
  if (!(lo > 0.0)) throw PreconditionFailed("nonpositive training ratio");
  return {context, safety * lo, training.size()};
}

}  // namespace widthlab
