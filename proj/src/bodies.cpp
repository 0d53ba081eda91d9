#include "widthlab/bodies.hpp"

#include <cmath>
#include <limits>

#include "widthlab/error.hpp"
#include "widthlab/optimize.hpp"

namespace widthlab {

std::string to_string(BodyKind kind) {
  switch (kind) {
    case BodyKind::euclidean: return "euclidean";
    case BodyKind::lp_ball: return "lp_ball";
    case BodyKind::induced: return "induced";
    case BodyKind::linear_image: return "linear_image";
    case BodyKind::section: return "section";
    case BodyKind::projection: return "projection";
    case BodyKind::polar: return "polar";
    case BodyKind::custom: return "custom";
  }
  return "custom";
}

nlohmann::json BodyDescriptor::to_json() const {
  nlohmann::json j = {{"kind", to_string(kind)}};
  if (!system.empty()) j["system"] = system;
  if (kind == BodyKind::induced || kind == BodyKind::lp_ball)
    j["p"] = std::isinf(p) ? nlohmann::json("inf") : nlohmann::json(p);
  if (!base.empty()) j["base"] = base;
  if (matrix) {
    const Matrix& a = *matrix;
    const bool diagonal = a.isDiagonal(0.0);
    if (diagonal) {
      std::vector<double> d(a.rows());
      for (Eigen::Index i = 0; i < a.rows(); ++i) d[i] = a(i, i);
      j["A_diagonal"] = d;
    } else {
      std::vector<std::vector<double>> rows(a.rows(), std::vector<double>(a.cols()));
      for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index k = 0; k < a.cols(); ++k) rows[i][k] = a(i, k);
      j["A"] = rows;
    }
  }
  return j;
}

Body::Body(std::size_t dim, Gauge gauge, BodyDescriptor descriptor, std::string label)
    : dim_(dim), gauge_(std::move(gauge)), descriptor_(std::move(descriptor)), label_(std::move(label)) {
  if (dim_ == 0) throw BadDimensions("body dimension must be >= 1");
}

Body& Body::with_gradient(Gradient g) {
  gradient_ = std::move(g);
  return *this;
}
Body& Body::with_support(Support h) {
  support_ = std::move(h);
  return *this;
}
Body& Body::with_support_point(SupportPoint sp) {
  support_point_ = std::move(sp);
  return *this;
}
Body& Body::with_ellipsoid(Matrix a) {
  ellipsoid_ = std::move(a);
  return *this;
}

Vector Body::gauge_gradient(const Vector& x) const {
  if (gradient_) return gradient_(x);
  const double h = 1e-6 * std::max(1.0, x.norm());
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = gauge_(probe);
    probe[i] = x[i] - h;
    const double down = gauge_(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

double Body::support(const Vector& y) const {
  if (support_) return support_(y);
  if (support_point_) return y.dot(support_point_(y));
  return support_by_ascent(*this, y, 4, 0);
}

Vector Body::support_point(const Vector& y) const {
  if (support_point_) return support_point_(y);
  if (!(y.norm() > 0.0)) return Vector::Zero(dim_);
  Rng rng = make_rng(0, 0x5u);
  ValueGrad num = [&y](const Vector& u) { return std::pair<double, Vector>{y.dot(u), y}; };
  ValueGrad den = [this](const Vector& u) { return std::pair<double, Vector>{gauge(u), gauge_gradient(u)}; };
  const AscentResult r = maximize_on_sphere(ratio_objective(num, den), dim_, {y}, 3, rng);
  return r.argmax / gauge(r.argmax);
}

double support_by_ascent(const Body& v, const Vector& y, int restarts, std::uint64_t seed) {
  if (static_cast<std::size_t>(y.size()) != v.dimension()) throw DimensionMismatch("support direction length");
  if (!(y.norm() > 0.0)) return 0.0;
  Rng rng = make_rng(seed, 0x5u);
  ValueGrad num = [&y](const Vector& u) { return std::pair<double, Vector>{y.dot(u), y}; };
  ValueGrad den = [&v](const Vector& u) { return std::pair<double, Vector>{v.gauge(u), v.gauge_gradient(u)}; };
  const AscentResult r = maximize_on_sphere(ratio_objective(num, den), v.dimension(), {y}, std::max(0, restarts - 1), rng);
  return std::max(0.0, r.value);
}

namespace {

double vector_lp(const Vector& x, double p) {
  if (std::isinf(p)) return x.cwiseAbs().maxCoeff();
  if (p == 1.0) return x.cwiseAbs().sum();
  if (p == 2.0) return x.norm();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) acc += std::pow(std::abs(x[i]), p);
  return std::pow(acc, 1.0 / p);
}

double sgn(double v) { return (v > 0.0) - (v < 0.0); }

/// argmax{<x, y> : ‖x‖_p <= 1}
Vector lp_support_point(const Vector& y, double p) {
  Vector x = Vector::Zero(y.size());
  if (!(y.norm() > 0.0)) return x;
  if (std::isinf(p)) {
    for (Eigen::Index i = 0; i < y.size(); ++i) x[i] = y[i] == 0.0 ? 0.0 : sgn(y[i]);
    return x;
  }
  if (p == 1.0) {
    Eigen::Index imax = 0;
    y.cwiseAbs().maxCoeff(&imax);
    x[imax] = sgn(y[imax]);
    return x;
  }
  const double q = p / (p - 1.0);
  const double norm = vector_lp(y, q);
  for (Eigen::Index i = 0; i < y.size(); ++i) x[i] = sgn(y[i]) * std::pow(std::abs(y[i]) / norm, q - 1.0);
  return x;
}

Vector lp_gradient(const Vector& x, double p) {
  Vector g = Vector::Zero(x.size());
  const double norm = vector_lp(x, p);
  if (norm == 0.0) return g;
  if (std::isinf(p)) {
    Eigen::Index imax = 0;
    x.cwiseAbs().maxCoeff(&imax);
    g[imax] = sgn(x[imax]);
    return g;
  }
  if (p == 1.0) {
    for (Eigen::Index i = 0; i < x.size(); ++i) g[i] = sgn(x[i]);
    return g;
  }
  for (Eigen::Index i = 0; i < x.size(); ++i)
    g[i] = sgn(x[i]) * std::pow(std::abs(x[i]) / norm, p - 1.0);
  return g;
}

std::string exponent_label(double p) { return std::isinf(p) ? "inf" : std::to_string(p).substr(0, 6); }

/// Symmetric square root of an SPD matrix.
Matrix spd_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

}  // namespace

Body euclidean_ball(std::size_t n) {
  BodyDescriptor d;
  d.kind = BodyKind::euclidean;
  Body b(n, [](const Vector& x) { return x.norm(); }, d, "B2^" + std::to_string(n));
  b.with_gradient([](const Vector& x) {
     const double r = x.norm();
     return r > 0.0 ? Vector(x / r) : Vector(Vector::Zero(x.size()));
   })
      .with_support([](const Vector& y) { return y.norm(); })
      .with_support_point([](const Vector& y) {
        const double r = y.norm();
        return r > 0.0 ? Vector(y / r) : Vector(Vector::Zero(y.size()));
      })
      .with_ellipsoid(Matrix::Identity(n, n));
  return b;
}

Body lp_ball(std::size_t n, double p) {
  if (!(p >= 1.0)) throw PreconditionFailed("p must be >= 1");
  if (p == 2.0) return euclidean_ball(n);
  BodyDescriptor d;
  d.kind = BodyKind::lp_ball;
  d.p = p;
  const double q = std::isinf(p) ? 1.0 : (p == 1.0 ? std::numeric_limits<double>::infinity() : p / (p - 1.0));
  Body b(n, [p](const Vector& x) { return vector_lp(x, p); }, d, "B" + exponent_label(p) + "^" + std::to_string(n));
  b.with_gradient([p](const Vector& x) { return lp_gradient(x, p); })
      .with_support([q](const Vector& y) { return vector_lp(y, q); })
      .with_support_point([p](const Vector& y) { return lp_support_point(y, p); });
  return b;
}

Body induced_ball(const OrthonormalSystem& system, double p) {
  return induced_ball(std::make_shared<const OrthonormalSystem>(system), p);
}

Body induced_ball(std::shared_ptr<const OrthonormalSystem> system, double p) {
  if (!(p >= 1.0)) throw PreconditionFailed("p must be >= 1");
  BodyDescriptor d;
  d.kind = BodyKind::induced;
  d.system = system->name();
  d.p = p;
  const std::size_t n = system->dimension();
  Body b(n, [system, p](const Vector& x) { return lp_norm(*system, x, p); }, d,
         "B(" + system->name() + "," + exponent_label(p) + ")");
  b.with_gradient([system, p](const Vector& x) { return lp_norm_gradient(*system, x, p); });
  if (p == 2.0) {
    // Orthonormality makes this the Euclidean ball.
    b.with_support([](const Vector& y) { return y.norm(); })
        .with_support_point([](const Vector& y) {
          const double r = y.norm();
          return r > 0.0 ? Vector(y / r) : Vector(Vector::Zero(y.size()));
        })
        .with_ellipsoid(Matrix::Identity(n, n));
  }
  return b;
}

Body linear_image(const Body& v, const Matrix& a) {
  if (static_cast<std::size_t>(a.rows()) != v.dimension() || a.rows() != a.cols())
    throw DimensionMismatch("linear image matrix must be n×n with n = dim V");
  varrho(a);  // throws SingularMatrix
  const Matrix inv = a.inverse();
  const Matrix inv_t = inv.transpose();
  const Matrix a_t = a.transpose();
  BodyDescriptor d;
  d.kind = BodyKind::linear_image;
  d.matrix = a;
  d.base = v.label();
  d.system = v.descriptor().system;
  d.p = v.descriptor().p;
  Body b(v.dimension(), [v, inv](const Vector& x) { return v.gauge(inv * x); }, d, "A·" + v.label());
  b.with_gradient([v, inv, inv_t](const Vector& x) { return Vector(inv_t * v.gauge_gradient(inv * x)); });
  if (v.has_exact_support()) b.with_support([v, a_t](const Vector& y) { return v.support(a_t * y); });
  if (v.has_support_point())
    b.with_support_point([v, a, a_t](const Vector& y) { return Vector(a * v.support_point(a_t * y)); });
  if (v.ellipsoid_matrix()) b.with_ellipsoid(a * *v.ellipsoid_matrix());
  return b;
}

Body section_body(const Body& v, const Subspace& l) {
  if (l.ambient_dim() != v.dimension()) throw DimensionMismatch("subspace ambient dimension differs from body");
  const Matrix f = l.frame();
  BodyDescriptor d;
  d.kind = BodyKind::section;
  d.base = v.label();
  Body b(l.dim(), [v, f](const Vector& c) { return v.gauge(f * c); }, d, v.label() + "∩L");
  b.with_gradient([v, f](const Vector& c) { return Vector(f.transpose() * v.gauge_gradient(f * c)); });
  if (v.ellipsoid_matrix()) {
    // {c : c^T F^T (E E^T)^{-1} F c <= 1} is the ellipsoid M^{-1/2} B_2^s.
    const Matrix& e = *v.ellipsoid_matrix();
    const Matrix shape_inv = f.transpose() * (e * e.transpose()).inverse() * f;
    const Matrix b_mat = spd_sqrt(shape_inv.inverse());
    b.with_ellipsoid(b_mat)
        .with_support([b_mat](const Vector& y) { return (b_mat.transpose() * y).norm(); })
        .with_support_point([b_mat](const Vector& y) {
          const Vector t = b_mat.transpose() * y;
          const double r = t.norm();
          return r > 0.0 ? Vector(b_mat * t / r) : Vector(Vector::Zero(y.size()));
        });
  }
  return b;
}

Body projection_body(const Body& v, const Subspace& l, std::size_t directions, std::uint64_t seed) {
  if (l.ambient_dim() != v.dimension()) throw DimensionMismatch("subspace ambient dimension differs from body");
  const Matrix f = l.frame();
  const std::size_t s = l.dim();
  BodyDescriptor d;
  d.kind = BodyKind::projection;
  d.base = v.label();
  if (v.ellipsoid_matrix()) {
    const Matrix proj = f.transpose() * *v.ellipsoid_matrix();  // s×n
    const Matrix shape = proj * proj.transpose();
    const Matrix shape_inv = shape.inverse();
    Body b(s, [shape_inv](const Vector& c) { return std::sqrt(std::max(0.0, c.dot(shape_inv * c))); }, d,
           "P_L " + v.label());
    b.with_gradient([shape_inv](const Vector& c) {
       const double g = std::sqrt(std::max(0.0, c.dot(shape_inv * c)));
       return g > 0.0 ? Vector(shape_inv * c / g) : Vector(Vector::Zero(c.size()));
     })
        .with_support([proj](const Vector& y) { return (proj.transpose() * y).norm(); })
        .with_ellipsoid(spd_sqrt(shape));
    return b;
  }
  // Circumscribed polytope over tabulated support values.
  Rng rng = make_rng(seed, 0x9a0);
  Matrix dirs(static_cast<Eigen::Index>(directions), static_cast<Eigen::Index>(s));
  for (std::size_t j = 0; j < directions; ++j) {
    Vector y = gaussian_vector(s, rng);
    y.normalize();
    const double h = v.support(f * y);
    dirs.row(static_cast<Eigen::Index>(j)) = (y / h).transpose();
  }
  Body b(s, [dirs](const Vector& c) { return (dirs * c).cwiseAbs().maxCoeff(); }, d, "P_L " + v.label());
  b.with_gradient([dirs](const Vector& c) {
    const Vector vals = dirs * c;
    Eigen::Index imax = 0;
    vals.cwiseAbs().maxCoeff(&imax);
    return Vector(sgn(vals[imax]) * dirs.row(imax).transpose());
  });
  return b;
}

Body polar_body(const Body& v, std::size_t table_size, std::uint64_t seed) {
  BodyDescriptor d;
  d.kind = BodyKind::polar;
  d.base = v.label();
  const std::size_t n = v.dimension();
  if (v.has_exact_support()) {
    Body b(n, [v](const Vector& y) { return v.support(y); }, d, v.label() + "°");
    if (v.has_support_point()) b.with_gradient([v](const Vector& y) { return v.support_point(y); });
    return b;
  }
  // Boundary table b_j = u_j / gauge(u_j); h(x) ≈ max_j |<x, b_j>| refined by ascent.
  Rng rng = make_rng(seed, 0x701a);
  auto table = std::make_shared<Matrix>(static_cast<Eigen::Index>(table_size), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < table_size; ++j) {
    Vector u = gaussian_vector(n, rng);
    u.normalize();
    table->row(static_cast<Eigen::Index>(j)) = (u / v.gauge(u)).transpose();
  }
  auto refine = [v, table](const Vector& x) -> std::pair<double, Vector> {
    if (!(x.norm() > 0.0)) return {0.0, Vector::Zero(x.size())};
    const Vector vals = *table * x;
    Eigen::Index jmax = 0;
    vals.cwiseAbs().maxCoeff(&jmax);
    Vector start = sgn(vals[jmax]) * table->row(jmax).transpose();
    ValueGrad num = [&x](const Vector& u) { return std::pair<double, Vector>{x.dot(u), x}; };
    ValueGrad den = [&v](const Vector& u) { return std::pair<double, Vector>{v.gauge(u), v.gauge_gradient(u)}; };
    Rng local(0);
    AscentOptions opts;
    opts.max_iterations = 80;
    opts.rel_tol = 1e-12;
    const AscentResult r = maximize_on_sphere(ratio_objective(num, den), x.size(), {start}, 0, local, opts);
    const double tab = std::abs(vals[jmax]);
    if (r.value >= tab) return {r.value, r.argmax / v.gauge(r.argmax)};
    return {tab, start};
  };
  Body b(n, [refine](const Vector& y) { return refine(y).first; }, d, v.label() + "°");
  b.with_gradient([refine](const Vector& y) { return refine(y).second; });
  return b;
}

double dual_gauge(const OrthonormalSystem& system, double p, const Vector& x, int restarts, std::uint64_t seed) {
  if (static_cast<std::size_t>(x.size()) != system.dimension()) throw DimensionMismatch("dual_gauge vector length");
  // Ascent directly on the gauge so the p = 2 shortcut is not used.
  auto sys = std::make_shared<const OrthonormalSystem>(system);
  BodyDescriptor d;
  d.kind = BodyKind::induced;
  d.system = system.name();
  d.p = p;
  Body b(system.dimension(), [sys, p](const Vector& a) { return lp_norm(*sys, a, p); }, d, "B(J,p)");
  b.with_gradient([sys, p](const Vector& a) { return lp_norm_gradient(*sys, a, p); });
  return support_by_ascent(b, x, restarts, seed);
}

Matrix truncate_multiplier(const MultiplierSpec& spec, const SpectralData& spectral, std::size_t n) {
  const std::vector<double> entries = expand_multiplier(spec, spectral, n);
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (spec.class_a && i > 0 && entries[i] > entries[i - 1])
      throw PreconditionFailed("class-A multiplier produced an increasing entry");
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = entries[i];
  }
  return m;
}

}  // namespace widthlab
