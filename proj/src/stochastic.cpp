#include "widthlab/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "widthlab/error.hpp"
#include "widthlab/optimize.hpp"

namespace widthlab {

nlohmann::json EstimateWithCI::to_json() const {
  return {{"value", value}, {"half_width", half_width}, {"samples", samples}, {"seed", seed}};
}

namespace {

std::size_t chunk_count(std::size_t count) { return (count + kSampleChunk - 1) / kSampleChunk; }

EstimateWithCI mean_estimate(const std::vector<double>& values, std::uint64_t seed) {
  EstimateWithCI e;
  e.samples = values.size();
  e.seed = seed;
  if (values.empty()) return e;
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double var = values.size() > 1 ? ss / (n - 1.0) : 0.0;
  e.value = mean;
  e.half_width = kZ95 * std::sqrt(var / n);
  return e;
}

/// Ratio mean(a)/mean(b) of paired samples, delta-method CI.
EstimateWithCI ratio_estimate(const std::vector<double>& a, const std::vector<double>& b, std::uint64_t seed) {
  EstimateWithCI e;
  e.samples = a.size();
  e.seed = seed;
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  if (!(mb > 0.0)) throw VarianceBlowup("reference estimate is zero");
  const double r = ma / mb;
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - r * b[i];
    ss += d * d;
  }
  const double var = a.size() > 1 ? ss / (n - 1.0) : 0.0;
  e.value = r;
  e.half_width = kZ95 * std::sqrt(var / n) / mb;
  return e;
}

void check_blowup(const EstimateWithCI& e, const std::string& what) {
  if (!std::isfinite(e.value) || !std::isfinite(e.half_width) || e.half_width > 0.25 * std::abs(e.value))
    throw VarianceBlowup(what + ": half-width " + std::to_string(e.half_width) + " exceeds 25% of " +
                         std::to_string(e.value));
}

Vector axis(std::size_t n, std::size_t i) {
  Vector e = Vector::Zero(static_cast<Eigen::Index>(n));
  e[static_cast<Eigen::Index>(i)] = 1.0;
  return e;
}

Vector bounding_box(const Body& v) {
  const std::size_t n = v.dimension();
  Vector box(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) box[static_cast<Eigen::Index>(i)] = v.support(axis(n, i));
  return box;
}

}  // namespace

std::vector<Vector> haar_sphere_sample(std::size_t n, std::size_t count, std::uint64_t seed) {
  if (n == 0) throw BadDimensions("sphere dimension must be >= 1");
  auto chunks = parallel_map(chunk_count(count), [&](std::size_t c) {
    Rng rng = make_rng(seed, c);
    const std::size_t begin = c * kSampleChunk;
    const std::size_t end = std::min(count, begin + kSampleChunk);
    std::vector<Vector> out;
    out.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      Vector g = gaussian_vector(n, rng);
      double r = g.norm();
      while (!(r > 0.0)) {
        g = gaussian_vector(n, rng);
        r = g.norm();
      }
      out.push_back(g / r);
    }
    return out;
  });
  std::vector<Vector> all;
  all.reserve(count);
  for (auto& c : chunks)
    for (auto& u : c) all.push_back(std::move(u));
  return all;
}

std::vector<double> map_sphere_samples(std::size_t n, std::size_t count, std::uint64_t seed,
                                       const std::function<double(const Vector&)>& fn) {
  if (n == 0) throw BadDimensions("sphere dimension must be >= 1");
  auto chunks = parallel_map(chunk_count(count), [&](std::size_t c) {
    Rng rng = make_rng(seed, c);
    const std::size_t begin = c * kSampleChunk;
    const std::size_t end = std::min(count, begin + kSampleChunk);
    std::vector<double> out;
    out.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      Vector g = gaussian_vector(n, rng);
      double r = g.norm();
      while (!(r > 0.0)) {
        g = gaussian_vector(n, rng);
        r = g.norm();
      }
      out.push_back(fn(g / r));
    }
    return out;
  });
  std::vector<double> all;
  all.reserve(count);
  for (auto& c : chunks) all.insert(all.end(), c.begin(), c.end());
  return all;
}

EstimateWithCI expectation_norm(const Body& v, std::size_t samples, std::uint64_t seed) {
  if (samples < 1000) throw PreconditionFailed("expectation_norm needs at least 1000 samples");
  return mean_estimate(map_sphere_samples(v.dimension(), samples, seed, [&v](const Vector& u) { return v.gauge(u); }),
                       seed);
}

double expectation_bound(double p) {
  if (!(p >= 2.0) || std::isinf(p)) throw PreconditionFailed("expectation bound needs 2 <= p < inf");
  if (p == 2.0) return 1.0;
  return std::sqrt(2.0) * std::pow(M_PI, -1.0 / (2.0 * p)) * std::exp(std::lgamma((p + 1.0) / 2.0) / p);
}

EstimateWithCI mc_volume_ratio(const Body& v, const Body& reference, std::size_t samples, std::uint64_t seed) {
  const std::size_t n = v.dimension();
  if (reference.dimension() != n) throw DimensionMismatch("volume reference dimension differs");
  if (n > 10) throw BadDimensions("sphere-integral volumes are limited to n <= 10");
  const double dn = static_cast<double>(n);
  auto inv_power = [dn](double g) {
    if (!(g > 0.0)) throw PreconditionFailed("gauge vanishes on the sphere");
    return std::pow(g, -dn);
  };
  EstimateWithCI e;
  if (reference.is_euclidean_ball()) {
    e = mean_estimate(map_sphere_samples(n, samples, seed, [&](const Vector& u) { return inv_power(v.gauge(u)); }),
                      seed);
  } else {
    std::vector<double> a = map_sphere_samples(n, samples, seed, [&](const Vector& u) { return inv_power(v.gauge(u)); });
    std::vector<double> b =
        map_sphere_samples(n, samples, seed, [&](const Vector& u) { return inv_power(reference.gauge(u)); });
    e = ratio_estimate(a, b, seed);
  }
  check_blowup(e, "mc_volume_ratio");
  return e;
}

EstimateWithCI hit_or_miss_volume_ratio(const Body& v, const Body& reference, std::size_t samples,
                                        std::uint64_t seed) {
  const std::size_t n = v.dimension();
  if (reference.dimension() != n) throw DimensionMismatch("volume reference dimension differs");
  const Vector box = bounding_box(v).cwiseMax(bounding_box(reference));
  auto chunks = parallel_map(chunk_count(samples), [&](std::size_t c) {
    Rng rng = make_rng(mix_seed(seed, 0x40u), c);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const std::size_t begin = c * kSampleChunk;
    const std::size_t end = std::min(samples, begin + kSampleChunk);
    std::vector<std::pair<double, double>> out;
    out.reserve(end - begin);
    Vector x(static_cast<Eigen::Index>(n));
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t k = 0; k < n; ++k) x[static_cast<Eigen::Index>(k)] = box[static_cast<Eigen::Index>(k)] * unit(rng);
      out.emplace_back(v.contains(x) ? 1.0 : 0.0, reference.contains(x) ? 1.0 : 0.0);
    }
    return out;
  });
  std::vector<double> a, b;
  a.reserve(samples);
  b.reserve(samples);
  for (const auto& c : chunks)
    for (const auto& [in_v, in_ref] : c) {
      a.push_back(in_v);
      b.push_back(in_ref);
    }
  return ratio_estimate(a, b, seed);
}

EstimateWithCI section_volume_ratio(const Body& v, const Subspace& l, const Body& reference, std::size_t samples,
                                    std::uint64_t seed) {
  if (l.dim() > 8) throw BadDimensions("section volumes are limited to dim L <= 8");
  if (reference.dimension() != l.dim()) throw DimensionMismatch("reference must live in L");
  return mc_volume_ratio(section_body(v, l), reference, samples, seed);
}

EstimateWithCI projection_volume_ratio(const Body& v, const Subspace& l, const Body& reference, std::size_t samples,
                                       std::uint64_t seed, std::size_t directions) {
  if (l.dim() > 8) throw BadDimensions("projection volumes are limited to dim L <= 8");
  if (reference.dimension() != l.dim()) throw DimensionMismatch("reference must live in L");
  if (v.ellipsoid_matrix() && reference.is_euclidean_ball()) {
    EstimateWithCI e;
    e.value = ellipsoid_projection_ratio(*v.ellipsoid_matrix(), l);
    e.samples = samples;
    e.seed = seed;
    return e;
  }
  return mc_volume_ratio(projection_body(v, l, directions, seed), reference, samples, seed);
}

double ellipsoid_projection_ratio(const Matrix& a, const Subspace& l) {
  if (static_cast<std::size_t>(a.rows()) != l.ambient_dim()) throw DimensionMismatch("matrix and subspace differ");
  const Matrix m = l.frame().transpose() * a;
  return std::sqrt(std::max(0.0, (m * m.transpose()).determinant()));
}

double section_radius(const Body& v, const Body& w, const Subspace& l, int restarts, std::uint64_t seed) {
  if (restarts < 8) throw PreconditionFailed("section_radius needs at least 8 restarts");
  if (v.dimension() != l.ambient_dim() || w.dimension() != l.ambient_dim())
    throw DimensionMismatch("bodies and subspace must share the ambient dimension");
  const Body sec = section_body(v, l);
  if (sec.ellipsoid_matrix() && w.is_euclidean_ball()) return singular_values(*sec.ellipsoid_matrix())[0];
  const Matrix& f = l.frame();
  ValueGrad num = [&w, &f](const Vector& c) {
    const Vector x = f * c;
    return std::pair<double, Vector>{w.gauge(x), f.transpose() * w.gauge_gradient(x)};
  };
  ValueGrad den = [&sec](const Vector& c) { return std::pair<double, Vector>{sec.gauge(c), sec.gauge_gradient(c)}; };
  Rng rng = make_rng(seed, 0x7ad);
  const AscentResult r = maximize_on_sphere(ratio_objective(num, den), l.dim(), {}, restarts, rng);
  return r.value;
}

double body_radius(const Body& v, const Body& w, int restarts, std::uint64_t seed) {
  return section_radius(v, w, Subspace::full(v.dimension()), restarts, seed);
}

std::vector<Vector> sample_body_points(const Body& v, std::size_t count, Rng& rng, double boundary_fraction) {
  const std::size_t n = v.dimension();
  const Vector box = bounding_box(v);
  const std::size_t boundary = static_cast<std::size_t>(std::floor(boundary_fraction * static_cast<double>(count)));
  std::vector<Vector> points;
  points.reserve(count);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (std::size_t i = 0; i < boundary; ++i) {
    Vector u = gaussian_vector(n, rng);
    points.push_back(u / v.gauge(u));
  }
  Vector x(static_cast<Eigen::Index>(n));
  std::size_t attempts = 0;
  while (points.size() < count) {
    for (std::size_t k = 0; k < n; ++k) x[static_cast<Eigen::Index>(k)] = box[static_cast<Eigen::Index>(k)] * unit(rng);
    if (v.contains(x)) points.push_back(x);
    if (++attempts > 1000 * count + 1000000) throw Saturation("rejection sampling is not accepting points");
  }
  return points;
}

namespace {

using Metric = std::function<double(const Vector&)>;

std::vector<std::size_t> farthest_point(const std::vector<Vector>& cloud, const Metric& dist, double delta,
                                        std::size_t max_points) {
  std::vector<std::size_t> chosen{0};
  std::vector<double> nearest(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) nearest[i] = dist(cloud[i] - cloud[0]);
  while (true) {
    const auto it = std::max_element(nearest.begin(), nearest.end());
    if (*it < delta) break;
    const std::size_t j = static_cast<std::size_t>(it - nearest.begin());
    chosen.push_back(j);
    if (chosen.size() > max_points) throw Saturation("net exceeds the point budget");
    for (std::size_t i = 0; i < cloud.size(); ++i) nearest[i] = std::min(nearest[i], dist(cloud[i] - cloud[j]));
  }
  return chosen;
}

std::vector<std::size_t> ordered_greedy(const std::vector<Vector>& cloud, const std::vector<std::size_t>& order,
                                        const Metric& dist, double delta, std::size_t max_points) {
  std::vector<std::size_t> chosen;
  for (std::size_t i : order) {
    bool separated = true;
    for (std::size_t j : chosen)
      if (dist(cloud[i] - cloud[j]) < delta) {
        separated = false;
        break;
      }
    if (separated) {
      chosen.push_back(i);
      if (chosen.size() > max_points) throw Saturation("packing exceeds the point budget");
    }
  }
  return chosen;
}

double coverage_fraction(const std::vector<Vector>& net, const std::vector<Vector>& probes, const Metric& dist,
                         double delta) {
  if (probes.empty()) return 1.0;
  std::size_t covered = 0;
  for (const Vector& x : probes)
    for (const Vector& c : net)
      if (dist(x - c) <= delta) {
        ++covered;
        break;
      }
  return static_cast<double>(covered) / static_cast<double>(probes.size());
}

std::vector<Vector> net_cloud(const Body& v, std::size_t candidates, Rng& rng) {
  std::vector<Vector> cloud{Vector::Zero(static_cast<Eigen::Index>(v.dimension()))};
  auto pts = sample_body_points(v, candidates, rng);
  cloud.insert(cloud.end(), pts.begin(), pts.end());
  return cloud;
}

void check_net_args(const Body& v, const Body& reference, double delta) {
  if (v.dimension() > 6) throw BadDimensions("nets are limited to n <= 6");
  if (reference.dimension() != v.dimension()) throw DimensionMismatch("reference gauge dimension differs");
  if (!(delta > 0.0)) throw PreconditionFailed("delta must be positive");
}

}  // namespace

NetReport greedy_net(const Body& v, const Body& reference, double delta, std::uint64_t seed,
                     const NetOptions& options) {
  check_net_args(v, reference, delta);
  Rng rng = make_rng(seed, 0xe7);
  const auto cloud = net_cloud(v, options.candidates, rng);
  const Metric dist = [&reference](const Vector& x) { return reference.gauge(x); };
  const auto chosen = farthest_point(cloud, dist, delta, options.max_points);
  NetReport report;
  report.delta = delta;
  for (std::size_t i : chosen) report.net_points.push_back(cloud[i]);
  report.packing_points = report.net_points;
  Rng probe_rng = make_rng(seed, 0xce47);
  const auto probes = sample_body_points(v, options.certificate_samples, probe_rng);
  report.coverage = coverage_fraction(report.net_points, probes, dist, delta);
  report.certified = report.coverage >= options.certificate_fraction;
  return report;
}

NetChain net_chain(const Body& v, const Body& reference, double delta, std::uint64_t seed, int orderings,
                   const NetOptions& options) {
  check_net_args(v, reference, delta);
  if (orderings < 1) throw PreconditionFailed("net_chain needs at least one ordering");
  Rng rng = make_rng(seed, 0xe7);
  const auto cloud = net_cloud(v, options.candidates, rng);
  const Metric dist = [&reference](const Vector& x) { return reference.gauge(x); };
  NetChain chain;
  chain.delta = delta;
  std::vector<std::size_t> best_net;
  std::size_t min_net = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> order(cloud.size());
  for (int o = 0; o < orderings; ++o) {
    std::vector<std::size_t> at_delta, at_2delta;
    if (o == 0) {
      at_delta = farthest_point(cloud, dist, delta, options.max_points);
      at_2delta = farthest_point(cloud, dist, 2.0 * delta, options.max_points);
    } else {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::shuffle(order.begin(), order.end(), rng);
      at_delta = ordered_greedy(cloud, order, dist, delta, options.max_points);
      at_2delta = ordered_greedy(cloud, order, dist, 2.0 * delta, options.max_points);
    }
    chain.packing_delta = std::max(chain.packing_delta, at_delta.size());
    chain.packing_2delta = std::max(chain.packing_2delta, at_2delta.size());
    if (at_delta.size() < min_net) {
      min_net = at_delta.size();
      best_net = at_delta;
    }
  }
  chain.net_delta = min_net;
  std::vector<Vector> net;
  for (std::size_t i : best_net) net.push_back(cloud[i]);
  Rng probe_rng = make_rng(seed, 0xce47);
  const auto probes = sample_body_points(v, options.certificate_samples, probe_rng);
  chain.certified = coverage_fraction(net, probes, dist, delta) >= options.certificate_fraction;
  return chain;
}

BrunnReport brunn_sections(const Body& v, const Subspace& l, const std::vector<Vector>& offsets, std::size_t samples,
                           std::uint64_t seed) {
  if (l.ambient_dim() != v.dimension()) throw DimensionMismatch("subspace ambient dimension differs from body");
  const Matrix& f = l.frame();
  const std::size_t s = l.dim();
  Vector box(static_cast<Eigen::Index>(s));
  for (std::size_t i = 0; i < s; ++i) box[static_cast<Eigen::Index>(i)] = v.support(f.col(static_cast<Eigen::Index>(i)));
  const double box_volume = (2.0 * box).prod();
  std::vector<Vector> shifts{Vector::Zero(static_cast<Eigen::Index>(v.dimension()))};
  for (const Vector& z : offsets) {
    if (static_cast<std::size_t>(z.size()) != v.dimension()) throw DimensionMismatch("offset length");
    shifts.push_back(z - f * (f.transpose() * z));
  }
  auto chunks = parallel_map(chunk_count(samples), [&](std::size_t c) {
    Rng rng = make_rng(mix_seed(seed, 0xb2u), c);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const std::size_t begin = c * kSampleChunk;
    const std::size_t end = std::min(samples, begin + kSampleChunk);
    std::vector<std::vector<double>> hits(shifts.size());
    Vector coords(static_cast<Eigen::Index>(s));
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t k = 0; k < s; ++k)
        coords[static_cast<Eigen::Index>(k)] = box[static_cast<Eigen::Index>(k)] * unit(rng);
      const Vector x = f * coords;
      for (std::size_t j = 0; j < shifts.size(); ++j)
        hits[j].push_back(v.contains(shifts[j] + x) ? box_volume : 0.0);
    }
    return hits;
  });
  BrunnReport report;
  for (std::size_t j = 0; j < shifts.size(); ++j) {
    std::vector<double> values;
    values.reserve(samples);
    for (const auto& c : chunks) values.insert(values.end(), c[j].begin(), c[j].end());
    const EstimateWithCI e = mean_estimate(values, seed);
    if (j == 0)
      report.central = e;
    else
      report.offsets.push_back(e);
  }
  report.holds = true;
  for (const auto& o : report.offsets)
    if (report.central.value < o.value - 2.0 * std::hypot(report.central.half_width, o.half_width))
      report.holds = false;
  return report;
}

bool brunn_section_check(const Body& v, const Subspace& l, const std::vector<Vector>& offsets, std::size_t samples,
                         std::uint64_t seed) {
  return brunn_sections(v, l, offsets, samples, seed).holds;
}

}  // namespace widthlab
