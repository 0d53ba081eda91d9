#include "widthlab/manifolds.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "widthlab/error.hpp"

namespace widthlab {

namespace {

using u128 = unsigned __int128;

u128 gcd128(u128 a, u128 b) {
  while (b != 0) {
    const u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

/// Exact rational accumulator for products of small fractions.
struct Rational {
  u128 num = 1;
  u128 den = 1;

  void times(std::uint64_t p, std::uint64_t q) {
    u128 a = p, b = q;
    const u128 g1 = gcd128(a, den);
    a /= g1;
    den /= g1;
    const u128 g2 = gcd128(num, b);
    num /= g2;
    b /= g2;
    const u128 limit = ~u128{0} / 2;
    if (a != 0 && num > limit / a) throw Error("eigenspace dimension overflows 128-bit arithmetic");
    if (b != 0 && den > limit / b) throw Error("eigenspace dimension overflows 128-bit arithmetic");
    num *= a;
    den *= b;
    const u128 g = gcd128(num, den);
    num /= g;
    den /= g;
  }
};

/// Degree of the harmonic polynomials behind the k-th eigenspace.
int degree_of(const ManifoldParams& params, int k) { return params.even_only ? 2 * k : k; }

}  // namespace

std::string ManifoldParams::name() const {
  switch (family) {
    case ManifoldFamily::sphere: return "S" + std::to_string(d);
    case ManifoldFamily::real_projective: return "P" + std::to_string(d) + "R";
    case ManifoldFamily::complex_projective: return "P" + std::to_string(d) + "C";
    case ManifoldFamily::quaternionic_projective: return "P" + std::to_string(d) + "H";
    case ManifoldFamily::cayley_plane: return "P16Cay";
  }
  return "?";
}

ManifoldParams ManifoldParams::sphere(int d) {
  if (d < 2) throw BadDimensions("S^d needs d >= 2");
  return {ManifoldFamily::sphere, d, (d - 2) / 2.0, (d - 2) / 2.0, false};
}

ManifoldParams ManifoldParams::real_projective(int d) {
  if (d < 2) throw BadDimensions("P^d(R) needs d >= 2");
  return {ManifoldFamily::real_projective, d, (d - 2) / 2.0, (d - 2) / 2.0, true};
}

ManifoldParams ManifoldParams::complex_projective(int d) {
  if (d < 4 || d % 2 != 0) throw BadDimensions("P^d(C) needs d in {4, 6, 8, ...}");
  return {ManifoldFamily::complex_projective, d, (d - 2) / 2.0, 0.0, false};
}

ManifoldParams ManifoldParams::quaternionic_projective(int d) {
  if (d < 8 || d % 4 != 0) throw BadDimensions("P^d(H) needs d in {8, 12, 16, ...}");
  return {ManifoldFamily::quaternionic_projective, d, (d - 2) / 2.0, 1.0, false};
}

ManifoldParams ManifoldParams::cayley_plane() { return {ManifoldFamily::cayley_plane, 16, 7.0, 3.0, false}; }

double eigenvalue(const ManifoldParams& params, int k) {
  if (k < 0) throw PreconditionFailed("eigenvalue index must be >= 0");
  const double deg = degree_of(params, k);
  return deg * (deg + params.alpha + params.beta + 1.0);
}

std::uint64_t eigenspace_dim(const ManifoldParams& params, int k) {
  if (k < 0) throw PreconditionFailed("eigenspace index must be >= 0");
  const std::uint64_t deg = static_cast<std::uint64_t>(degree_of(params, k));
  // 2α, 2β are integers and α+β is an integer for every family.
  const auto a2 = static_cast<std::uint64_t>(std::llround(2.0 * params.alpha));
  const auto b2 = static_cast<std::uint64_t>(std::llround(2.0 * params.beta));
  const std::uint64_t ab = (a2 + b2) / 2;

  // dim H = (2k+α+β+1)/(α+β+1) · C(k+α+β, k) · Π_{j=1..k} (α+j)/(β+j)
  Rational r;
  r.times(4 * deg + a2 + b2 + 2, a2 + b2 + 2);
  for (std::uint64_t j = 1; j <= deg; ++j) r.times(ab + j, j);
  for (std::uint64_t j = 1; j <= deg; ++j) r.times(a2 + 2 * j, b2 + 2 * j);
  if (r.den != 1) throw Error("eigenspace dimension is not an integer (inconsistent parameters)");
  if (r.num > std::numeric_limits<std::uint64_t>::max()) throw Error("eigenspace dimension overflows uint64");
  return static_cast<std::uint64_t>(r.num);
}

std::uint64_t cumulative_dim(const ManifoldParams& params, int n) {
  std::uint64_t tau = 0;
  for (int k = 0; k <= n; ++k) {
    const std::uint64_t d = eigenspace_dim(params, k);
    if (tau > std::numeric_limits<std::uint64_t>::max() - d) throw Error("cumulative dimension overflows uint64");
    tau += d;
  }
  return tau;
}

double weyl_ratio(const ManifoldParams& params, int n) {
  if (n < 1) throw PreconditionFailed("weyl_ratio needs N >= 1");
  return static_cast<double>(cumulative_dim(params, n)) / std::pow(eigenvalue(params, n), params.d / 2.0);
}

SpectralData SpectralData::build(const ManifoldParams& params, int max_degree) {
  if (max_degree < 0) throw PreconditionFailed("max_degree must be >= 0");
  SpectralData s;
  s.params = params;
  s.max_degree = max_degree;
  std::uint64_t tau = 0;
  for (int k = 0; k <= max_degree; ++k) {
    s.theta.push_back(eigenvalue(params, k));
    s.dims.push_back(eigenspace_dim(params, k));
    tau += s.dims.back();
    s.tau.push_back(tau);
  }
  return s;
}

std::string SpectralData::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "k,theta,dim,tau\n";
  for (std::size_t k = 0; k < theta.size(); ++k) os << k << ',' << theta[k] << ',' << dims[k] << ',' << tau[k] << '\n';
  return os.str();
}

MultiplierSpec sobolev_multiplier(const ManifoldParams& params, double gamma) {
  if (!(gamma > 0.0)) throw PreconditionFailed("gamma must be > 0");
  auto spec = MultiplierSpec::from_function([gamma](double t) { return std::pow(t, -gamma / 2.0); }, true,
                                            "sobolev(" + params.name() + ",gamma=" + std::to_string(gamma) + ")");
  spec.start_degree = 1;
  return spec;
}

std::vector<double> expand_multiplier(const MultiplierSpec& spec, const SpectralData& spectral, std::size_t n) {
  std::vector<double> out;
  out.reserve(n);
  if (!spec.is_function()) {
    if (spec.sequence.size() < n)
      throw SpectrumExhausted("sequence has " + std::to_string(spec.sequence.size()) + " entries, need " +
                              std::to_string(n));
    out.assign(spec.sequence.begin(), spec.sequence.begin() + static_cast<std::ptrdiff_t>(n));
    return out;
  }
  for (int k = spec.start_degree; k <= spectral.max_degree && out.size() < n; ++k) {
    const double value = spec.lambda_fn(spectral.theta[static_cast<std::size_t>(k)]);
    for (std::uint64_t j = 0; j < spectral.dims[static_cast<std::size_t>(k)] && out.size() < n; ++j)
      out.push_back(value);
  }
  if (out.size() < n)
    throw SpectrumExhausted("spectrum up to degree " + std::to_string(spectral.max_degree) + " yields only " +
                            std::to_string(out.size()) + " entries, need " + std::to_string(n));
  return out;
}

MultiplierSpec MultiplierSpec::from_function(std::function<double(double)> fn, bool class_a, std::string label) {
  MultiplierSpec s;
  s.lambda_fn = std::move(fn);
  s.class_a = class_a;
  s.label = std::move(label);
  return s;
}

MultiplierSpec MultiplierSpec::from_sequence(std::vector<double> values, bool class_a, std::string label) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) throw PreconditionFailed("multiplier entries must be positive");
    if (class_a && i > 0 && values[i] > values[i - 1])
      throw PreconditionFailed("class-A multiplier sequence must be nonincreasing");
  }
  MultiplierSpec s;
  s.sequence = std::move(values);
  s.class_a = class_a;
  s.label = std::move(label);
  return s;
}

}  // namespace widthlab
