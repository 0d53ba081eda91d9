#include "widthlab/ortho_systems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "widthlab/error.hpp"

namespace widthlab {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_infinite_exponent(double p) { return std::isinf(p); }

}  // namespace

void QuadratureRule::validate() const {
  if (nodes.size() != weights.size() || weights.empty())
    throw PreconditionFailed("quadrature needs one weight per node");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw PreconditionFailed("negative quadrature weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw PreconditionFailed("quadrature weights must sum to 1");
}

OrthonormalSystem::OrthonormalSystem(std::string name, std::size_t n, Evaluator evaluator,
                                     QuadratureRule quadrature, std::vector<double> sup_norms)
    : name_(std::move(name)),
      evaluator_(std::move(evaluator)),
      quadrature_(std::move(quadrature)),
      sup_norms_(std::move(sup_norms)) {
  quadrature_.validate();
  if (n == 0) throw BadDimensions("orthonormal system needs at least one function");
  if (sup_norms_.size() != n) throw DimensionMismatch("one sup-norm per function required");
  const std::size_t nodes = quadrature_.size();
  weights_ = Eigen::Map<const Vector>(quadrature_.weights.data(), nodes);
  values_.resize(nodes, n);
  for (std::size_t i = 0; i < nodes; ++i)
    for (std::size_t k = 0; k < n; ++k) values_(i, k) = evaluator_(k, quadrature_.nodes[i]);
}

double OrthonormalSystem::evaluate(std::size_t k, std::span<const double> point) const {
  if (k >= dimension()) throw DimensionMismatch("function index out of range");
  return evaluator_(k, point);
}

Matrix OrthonormalSystem::gram() const { return values_.transpose() * weights_.asDiagonal() * values_; }

OrthonormalSystem OrthonormalSystem::select(std::span<const std::size_t> indices) const {
  std::vector<std::size_t> map(indices.begin(), indices.end());
  std::vector<double> sups;
  for (std::size_t k : map) {
    if (k >= dimension()) throw DimensionMismatch("function index out of range");
    sups.push_back(sup_norms_[k]);
  }
  auto parent = evaluator_;
  auto eval = [parent, map](std::size_t k, std::span<const double> pt) { return parent(map.at(k), pt); };
  return OrthonormalSystem(name_, map.size(), eval, quadrature_, std::move(sups));
}

OrthonormalSystem OrthonormalSystem::leading(std::size_t m) const {
  if (m == 0 || m > dimension()) throw BadDimensions("leading(m) needs 1 <= m <= n");
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  auto sub = select(idx);
  if (m < dimension()) sub.name_ = name_ + "[:" + std::to_string(m) + "]";
  return sub;
}

nlohmann::json OrthonormalSystem::to_json() const {
  return {{"name", name_},
          {"n", dimension()},
          {"quadrature", {{"nodes", quadrature_.nodes}, {"weights", quadrature_.weights}}},
          {"sup_norms", sup_norms_}};
}

OrthonormalSystem trig_system(int max_degree, std::size_t nodes) {
  if (max_degree < 0) throw PreconditionFailed("max_degree must be >= 0");
  return trig_system_of_size(2 * static_cast<std::size_t>(max_degree) + 1, nodes);
}

OrthonormalSystem trig_system_of_size(std::size_t n, std::size_t nodes) {
  if (n == 0) throw BadDimensions("trig system needs n >= 1");
  const std::size_t degree = n / 2;
  const std::size_t minimum = 4 * degree + 1;
  if (nodes == 0) nodes = std::max<std::size_t>(minimum, 128);
  if (nodes < minimum) throw PreconditionFailed("trapezoid rule needs at least 4·degree+1 nodes");

  QuadratureRule rule;
  rule.nodes.reserve(nodes);
  for (std::size_t i = 0; i < nodes; ++i) rule.nodes.push_back({kTwoPi * static_cast<double>(i) / nodes});
  rule.weights.assign(nodes, 1.0 / static_cast<double>(nodes));

  std::vector<double> sups(n, kSqrt2);
  sups[0] = 1.0;
  auto eval = [](std::size_t k, std::span<const double> pt) {
    if (k == 0) return 1.0;
    const double j = static_cast<double>((k + 1) / 2);
    return (k % 2 == 1) ? kSqrt2 * std::cos(j * pt[0]) : kSqrt2 * std::sin(j * pt[0]);
  };
  const std::string name = (n % 2 == 1) ? "trig" + std::to_string(degree) : "trig-n" + std::to_string(n);
  return OrthonormalSystem(name, n, eval, std::move(rule), std::move(sups));
}

void gauss_legendre(std::size_t count, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(count, 0.0);
  weights.assign(count, 0.0);
  const double n = static_cast<double>(count);
  for (std::size_t i = 0; i < (count + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= count; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      if (count == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = -x;
    nodes[count - 1 - i] = x;
    weights[i] = weights[count - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

namespace {

struct HarmonicIndex {
  int degree;
  int order;   // |m|
  int parity;  // 0: m = 0, 1: cos, 2: sin
};

double harmonic_norm(int l, int m) {
  // sqrt((2l+1)(l-m)!/(l+m)!) for the normalized surface measure
  return std::sqrt((2.0 * l + 1.0) * std::exp(std::lgamma(l - m + 1.0) - std::lgamma(l + m + 1.0)));
}

double harmonic_polar(int l, int m, double t) {
  return harmonic_norm(l, m) * std::assoc_legendre(static_cast<unsigned>(l), static_cast<unsigned>(m), t);
}

}  // namespace

OrthonormalSystem sphere_harmonics_system(int max_degree, std::size_t polar_nodes, std::size_t azimuth_nodes) {
  if (max_degree < 0 || max_degree > 12) throw PreconditionFailed("sphere harmonics need 0 <= max_degree <= 12");
  const std::size_t deg = static_cast<std::size_t>(max_degree);
  if (polar_nodes == 0) polar_nodes = std::max<std::size_t>(2 * deg + 2, 8);
  if (azimuth_nodes == 0) azimuth_nodes = std::max<std::size_t>(4 * deg + 4, 8);
  if (polar_nodes < deg + 1 || azimuth_nodes < 2 * deg + 1)
    throw PreconditionFailed("quadrature too coarse for products of degree 2·max_degree");

  std::vector<HarmonicIndex> index;
  for (int l = 0; l <= max_degree; ++l) {
    index.push_back({l, 0, 0});
    for (int m = 1; m <= l; ++m) {
      index.push_back({l, m, 1});
      index.push_back({l, m, 2});
    }
  }

  std::vector<double> t, wt;
  gauss_legendre(polar_nodes, t, wt);
  QuadratureRule rule;
  for (std::size_t i = 0; i < polar_nodes; ++i)
    for (std::size_t j = 0; j < azimuth_nodes; ++j) {
      rule.nodes.push_back({std::acos(t[i]), kTwoPi * static_cast<double>(j) / azimuth_nodes});
      rule.weights.push_back(0.5 * wt[i] / static_cast<double>(azimuth_nodes));
    }
  // Rounding in the Gauss–Legendre weights; renormalize to an exact probability measure.
  const double total = std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0);
  for (double& w : rule.weights) w /= total;

  // Sup-norms: the azimuthal factor peaks at 1 (times √2), the polar factor is
  // scanned on a dense grid together with the quadrature abscissae.
  std::vector<double> grid;
  grid.reserve(4001 + t.size());
  for (std::size_t i = 0; i <= 4000; ++i) grid.push_back(-1.0 + 2.0 * static_cast<double>(i) / 4000.0);
  for (double x : t) grid.push_back(x);
  std::vector<double> sups;
  for (const auto& h : index) {
    double peak = 0.0;
    for (double x : grid) peak = std::max(peak, std::abs(harmonic_polar(h.degree, h.order, x)));
    sups.push_back(h.parity == 0 ? peak : kSqrt2 * peak);
  }

  auto eval = [index](std::size_t k, std::span<const double> pt) {
    const auto& h = index.at(k);
    const double polar = harmonic_polar(h.degree, h.order, std::cos(pt[0]));
    if (h.parity == 0) return polar;
    const double phase = static_cast<double>(h.order) * pt[1];
    return kSqrt2 * polar * (h.parity == 1 ? std::cos(phase) : std::sin(phase));
  };
  return OrthonormalSystem("sphere" + std::to_string(max_degree), index.size(), eval, std::move(rule),
                           std::move(sups));
}

double conjugate_exponent(double p) {
  if (p < 1.0) throw PreconditionFailed("exponent must be >= 1");
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  if (is_infinite_exponent(p)) return 1.0;
  return p / (p - 1.0);
}

namespace {

double abs_pow(double a, double p) {
  if (p == std::floor(p) && p <= 16.0) {
    double r = 1.0;
    for (int k = static_cast<int>(p); k > 0; --k) r *= a;
    return r;
  }
  return std::pow(a, p);
}

}  // namespace

double lp_norm(const OrthonormalSystem& system, const Vector& alpha, double p) {
  if (static_cast<std::size_t>(alpha.size()) != system.dimension())
    throw DimensionMismatch("coefficient vector has length " + std::to_string(alpha.size()) + ", system has " +
                            std::to_string(system.dimension()));
  if (!(p >= 1.0)) throw PreconditionFailed("p must be >= 1");
  const Vector v = system.node_values() * alpha;
  if (is_infinite_exponent(p)) return v.cwiseAbs().maxCoeff();
  const Vector& w = system.weights();
  if (p == 2.0) return std::sqrt(w.dot(v.cwiseAbs2()));
  if (p == 1.0) return w.dot(v.cwiseAbs());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += w[i] * abs_pow(std::abs(v[i]), p);
  return std::pow(acc, 1.0 / p);
}

Vector lp_norm_gradient(const OrthonormalSystem& system, const Vector& alpha, double p) {
  if (static_cast<std::size_t>(alpha.size()) != system.dimension())
    throw DimensionMismatch("coefficient vector length mismatch");
  const Matrix& phi = system.node_values();
  const Vector v = phi * alpha;
  const Vector& w = system.weights();
  if (is_infinite_exponent(p)) {
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    const double s = v[imax] >= 0.0 ? 1.0 : -1.0;
    return s * phi.row(imax).transpose();
  }
  Vector coef(v.size());
  if (p == 1.0) {
    for (Eigen::Index i = 0; i < v.size(); ++i) coef[i] = w[i] * ((v[i] > 0.0) - (v[i] < 0.0));
    return phi.transpose() * coef;
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    const double power = abs_pow(a, p - 1.0);
    acc += w[i] * power * a;
    coef[i] = a == 0.0 ? 0.0 : w[i] * power * (v[i] > 0.0 ? 1.0 : -1.0);
  }
  if (!(acc > 0.0)) return Vector::Zero(alpha.size());
  return std::pow(acc, (1.0 - p) / p) * (phi.transpose() * coef);
}

EssentialSubsystem essential_subsystem(const OrthonormalSystem& system, double fraction, double bound_limit) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw PreconditionFailed("fraction C must lie in (0, 1)");
  const std::size_t n = system.dimension();
  const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(fraction * n - 1e-12)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto& sups = system.sup_norms();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sups[a] < sups[b]; });
  order.resize(m);
  std::sort(order.begin(), order.end());

  EssentialSubsystem out;
  out.indices = order;
  out.fraction = fraction;
  out.parent_dimension = n;
  for (std::size_t k : order) out.bound = std::max(out.bound, sups[k]);
  if (out.bound > bound_limit)
    throw CannotSatisfy("best " + std::to_string(m) + " of " + std::to_string(n) + " functions have sup-norm " +
                        std::to_string(out.bound) + " > " + std::to_string(bound_limit));
  return out;
}

}  // namespace widthlab
