#include "widthlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "widthlab/bodies.hpp"
#include "widthlab/error.hpp"
#include "widthlab/linalg.hpp"
#include "widthlab/manifolds.hpp"
#include "widthlab/ortho_systems.hpp"
#include "widthlab/stochastic.hpp"
#include "widthlab/widths.hpp"

namespace widthlab {

using nlohmann::json;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// ---------------------------------------------------------------- config

namespace {

const std::set<std::string> kTasks = {"expect", "volume", "radius", "widths", "verify", "scaling"};
const std::set<std::string> kFields = {"task",   "system",   "p",       "q",      "gamma",    "n",
                                       "n_values", "n_min",  "n_max",   "semiaxes", "manifold", "checks",
                                       "samples", "restarts", "seed",   "output"};

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

double exponent_field(const json& j, const std::string& field) {
  if (j.is_string() && (j == "inf" || j == "infinity")) return std::numeric_limits<double>::infinity();
  if (!j.is_number()) throw ConfigError("field '" + field + "' must be a number or \"inf\"");
  const double v = j.get<double>();
  if (!(v >= 1.0)) throw ConfigError("field '" + field + "' must be >= 1");
  return v;
}

template <class T>
T typed_field(const json& j, const std::string& field) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("field '" + field + "' has the wrong type");
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError("malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(col));
  }
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!kFields.count(key)) throw ConfigError("unknown field '" + key + "'");
  ExperimentConfig c;
  if (!j.contains("task")) throw ConfigError("missing field 'task'");
  c.task = typed_field<std::string>(j["task"], "task");
  if (!kTasks.count(c.task)) throw ConfigError("field 'task': unknown task '" + c.task + "'");
  if (!j.contains("seed")) throw ConfigError("missing field 'seed'");
  c.seed = typed_field<std::uint64_t>(j["seed"], "seed");
  if (j.contains("system")) {
    if (!j["system"].is_object() || !j["system"].contains("kind")) throw ConfigError("field 'system' needs a 'kind'");
    c.system = j["system"];
    const std::string kind = typed_field<std::string>(c.system["kind"], "system.kind");
    if (kind != "trig" && kind != "sphere") throw ConfigError("field 'system.kind' must be \"trig\" or \"sphere\"");
  }
  if (j.contains("p")) c.p = exponent_field(j["p"], "p");
  if (j.contains("q")) {
    c.q = exponent_field(j["q"], "q");
    if (!(*c.q > 1.0 && *c.q <= 2.0)) throw ConfigError("field 'q' must lie in (1, 2]");
  }
  if (j.contains("gamma")) {
    c.gamma = typed_field<double>(j["gamma"], "gamma");
    if (!(c.gamma > 0.0)) throw ConfigError("field 'gamma' must be positive");
  }
  if (j.contains("n")) c.n_values = {typed_field<int>(j["n"], "n")};
  if (j.contains("n_values")) c.n_values = typed_field<std::vector<int>>(j["n_values"], "n_values");
  for (int n : c.n_values)
    if (n < 1) throw ConfigError("field 'n_values' entries must be >= 1");
  if (j.contains("n_min")) c.n_min = typed_field<int>(j["n_min"], "n_min");
  if (j.contains("n_max")) c.n_max = typed_field<int>(j["n_max"], "n_max");
  if (c.n_min < 1 || c.n_max <= c.n_min) throw ConfigError("fields 'n_min'/'n_max' need 1 <= n_min < n_max");
  if (j.contains("semiaxes")) c.semiaxes = typed_field<std::vector<double>>(j["semiaxes"], "semiaxes");
  if (j.contains("manifold")) c.manifold = typed_field<std::string>(j["manifold"], "manifold");
  if (j.contains("checks")) c.checks = typed_field<std::vector<std::string>>(j["checks"], "checks");
  if (j.contains("samples")) {
    c.samples = typed_field<std::size_t>(j["samples"], "samples");
    if (c.samples < 1000) throw ConfigError("field 'samples' must be >= 1000");
  }
  if (j.contains("restarts")) {
    c.restarts = typed_field<int>(j["restarts"], "restarts");
    if (c.restarts < 8) throw ConfigError("field 'restarts' must be >= 8");
  }
  if (j.contains("output")) c.output = typed_field<std::string>(j["output"], "output");
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

// ---------------------------------------------------------------- reports

json VerificationReport::to_json() const {
  return {{"check", check},         {"anchor", anchor}, {"trials", trials}, {"violations", violations},
          {"worst_margin", worst_margin}, {"pass", pass}};
}

namespace {

/// Accumulates trials: margin >= 0 means the inequality held.
struct Tally {
  std::size_t trials = 0;
  std::size_t violations = 0;
  double worst = std::numeric_limits<double>::infinity();

  void add(double margin, bool ok) {
    ++trials;
    if (!ok) ++violations;
    worst = std::min(worst, margin);
  }
  void add(double margin) { add(margin, margin >= 0.0); }

  VerificationReport report(const std::string& check, const std::string& anchor) const {
    VerificationReport r;
    r.check = check;
    r.anchor = anchor;
    r.trials = trials;
    r.violations = violations;
    r.worst_margin = trials ? worst : 0.0;
    r.pass = trials > 0 && violations == 0;
    return r;
  }
};

std::shared_ptr<const OrthonormalSystem> trig_ptr(std::size_t n) {
  return std::make_shared<const OrthonormalSystem>(trig_system_of_size(n));
}

Matrix diag(std::initializer_list<double> d) {
  Vector v(static_cast<Eigen::Index>(d.size()));
  std::size_t i = 0;
  for (double x : d) v[static_cast<Eigen::Index>(i++)] = x;
  return v.asDiagonal();
}

// Each check below keeps its budget small enough for verify --all to finish
// in well under a minute on one core.

VerificationReport check_mmm_chain(std::uint64_t seed) {
  Tally t;
  NetOptions opts;
  opts.candidates = 3000;
  opts.certificate_samples = 2000;
  opts.certificate_fraction = 0.99;
  const Body ball = euclidean_ball(2);
  const std::vector<Body> bodies = {euclidean_ball(2), lp_ball(2, std::numeric_limits<double>::infinity())};
  for (const Body& v : bodies)
    for (double delta : {0.25, 0.5, 1.0})
      for (std::uint64_t s = 0; s < 3; ++s) {
        const NetChain c = net_chain(v, ball, delta, mix_seed(seed, s), 4, opts);
        const double margin = std::min(static_cast<double>(c.net_delta) - static_cast<double>(c.packing_2delta),
                                       static_cast<double>(c.packing_delta) - static_cast<double>(c.net_delta));
        t.add(margin, c.holds());
      }
  return t.report("mmm-chain", "m(2δ) ≤ n(δ) ≤ m(δ)");
}

VerificationReport check_lemma1(std::uint64_t seed) {
  Tally t;
  Rng rng = make_rng(seed, 1);
  for (std::size_t n = 2; n <= 5; ++n)
    for (int trial = 0; trial < 10; ++trial) {
      const Matrix a = random_diagonal(n, rng);
      const double rho = varrho(a);
      const double det = a.determinant();
      for (std::size_t s = 1; s <= n; ++s) {
        const Subspace l = random_subspace(n, s, rng);
        const double ratio = ellipsoid_projection_ratio(a, l);
        const double bound = std::pow(3.0, static_cast<double>(n)) * std::pow(rho, static_cast<double>(s) - n) * det;
        t.add(std::log(bound) - std::log(ratio));
      }
    }
  return t.report("lemma1-projection", "Vol_s(P(L_s) A B_2^n) ≤ 3^n ϱ_n^(s-n) det(A) Vol_s(B_2^s)");
}

VerificationReport check_lemma2a(std::uint64_t seed) {
  Tally t;
  for (std::size_t n : {3, 5}) {
    auto system = trig_ptr(n);
    const std::size_t s = (n + 1) / 2;
    for (double p : {1.5, 2.0}) {
      const Body v = induced_ball(system, p);
      const EstimateWithCI e = expectation_norm(induced_ball(system, conjugate_exponent(p)), 20000, mix_seed(seed, 7));
      for (std::uint64_t k = 0; k < 2; ++k) {
        const Subspace l = random_subspace(n, s, mix_seed(seed, 100 + k));
        const EstimateWithCI vol =
            projection_volume_ratio(v, l, euclidean_ball(s), 20000, mix_seed(seed, 200 + k), 256);
        const double lhs = std::pow(std::max(vol.lower(), 1e-300), 1.0 / static_cast<double>(n));
        const double rhs = 2.5 * e.upper();
        t.add(rhs - lhs);
      }
    }
  }
  return t.report("lemma2a", "Vol_s(P(L_s) B_(J,p)^n) ≤ (5/2)^n E[‖·‖_B_(J,p')]^n Vol_s(B_2^s)");
}

VerificationReport check_lemma2b(std::uint64_t seed) {
  Tally t;
  for (std::size_t n : {3, 5, 7, 9}) {
    auto system = trig_ptr(n);
    const Body v = induced_ball(system, 1.0);
    const std::size_t s = std::min<std::size_t>((n + 1) / 2, 4);
    const Subspace l = random_subspace(n, s, mix_seed(seed, n));
    const EstimateWithCI vol = projection_volume_ratio(v, l, euclidean_ball(s), 20000, mix_seed(seed, 50 + n), 128);
    const double root = std::pow(vol.upper(), 1.0 / static_cast<double>(n));
    t.add(8.0 - root);
  }
  return t.report("lemma2b", "Vol_s(P(L_s) B_(J,1)^n)^(1/n) ≤ C Vol_s(B_2^s)^(1/n)");
}

VerificationReport check_eq111(std::uint64_t seed) {
  Tally t;
  const Body ball = euclidean_ball(2);
  const std::vector<std::pair<Body, double>> cases = {
      {lp_ball(2, std::numeric_limits<double>::infinity()), 4.0 / std::numbers::pi},
      {linear_image(ball, diag({2.0, 1.0})), 2.0}};
  for (const auto& [v, target] : cases) {
    const EstimateWithCI sphere = mc_volume_ratio(v, ball, 200000, mix_seed(seed, 1));
    const EstimateWithCI box = hit_or_miss_volume_ratio(v, ball, 200000, mix_seed(seed, 2));
    t.add(0.05 - std::abs(sphere.value / box.value - 1.0));
    t.add(0.05 - std::abs(sphere.value / target - 1.0));
  }
  return t.report("eq111", "Vol_n(V)/Vol_n(B_2^n) = ∫_S ‖α‖_V^(-n) dμ(α)");
}

VerificationReport check_urysohn(std::uint64_t seed) {
  Tally t;
  for (std::size_t n : {3, 5, 9}) {
    auto system = trig_ptr(n);
    for (double p : {1.0, 2.0, 4.0, 8.0}) {
      if (p == 1.0 && n > 5) continue;
      const Body v = induced_ball(system, p);
      const EstimateWithCI vol = mc_volume_ratio(v, euclidean_ball(n), 40000, mix_seed(seed, n * 10 + 1));
      const EstimateWithCI e = expectation_norm(v, 40000, mix_seed(seed, n * 10 + 2));
      const double nn = static_cast<double>(n);
      const double bound = std::pow(e.value, -nn);
      const double slack = vol.half_width + nn * std::pow(e.value, -nn - 1.0) * e.half_width;
      t.add((vol.value - bound + slack) / bound);
    }
  }
  return t.report("eq333-urysohn", "Vol_n(V) ≥ E[‖·‖_V]^(-n) Vol_n(B_2^n)");
}

VerificationReport santalo_2d_report() {
  Tally t;
  const double area_cube = 4.0, area_cross = 2.0;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  t.add(pi2 - area_cube * area_cross);
  return t.report("santalo-2d", "Vol_2(B_∞^2) Vol_2(B_1^2) ≤ Vol_2(B_2^2)^2");
}

VerificationReport check_santalo(std::uint64_t seed) {
  Tally t;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  t.add((pi2 - 8.0) / pi2);
  auto system = trig_ptr(3);
  const Body ball = euclidean_ball(3);
  for (double p : {1.5, 2.0, 4.0})
    for (std::uint64_t s = 0; s < 3; ++s) {
      const std::uint64_t k = mix_seed(seed, s);
      const Body v = induced_ball(system, p);
      const Body polar = polar_body(v, 2000, k);
      const EstimateWithCI a = mc_volume_ratio(v, ball, 8000, mix_seed(k, 1));
      const EstimateWithCI b = mc_volume_ratio(polar, ball, 8000, mix_seed(k, 2));
      const double product = a.value * b.value;
      const double ci = a.value * b.half_width + b.value * a.half_width;
      t.add(1.0 + ci + 1e-6 - product);
    }
  return t.report("santalo", "Vol_n(V) Vol_n(V°) ≤ Vol_n(B_2^n)^2");
}

VerificationReport check_brunn(std::uint64_t seed) {
  Tally t;
  const auto record = [&t](const BrunnReport& r) {
    for (const auto& o : r.offsets) {
      const double slack = 2.0 * std::hypot(r.central.half_width, o.half_width);
      t.add(r.central.value - o.value + slack, r.holds);
    }
  };
  const std::array<std::size_t, 1> x_axis{0};
  const Subspace line = Subspace::coordinate(2, x_axis);
  const Vector up = Vector::Unit(2, 1);
  record(brunn_sections(euclidean_ball(2), line, {0.5 * up, 0.9 * up}, 20000, mix_seed(seed, 1)));
  record(brunn_sections(lp_ball(2, std::numeric_limits<double>::infinity()), line, {0.5 * up, 0.9 * up}, 20000,
                        mix_seed(seed, 2)));
  auto system = trig_ptr(3);
  const Body v = induced_ball(system, 4.0);
  for (std::uint64_t s = 0; s < 3; ++s) {
    const Subspace l = random_subspace(3, 2, mix_seed(seed, 10 + s));
    const Vector u = l.complement().frame().col(0);
    const Vector edge = u / v.gauge(u);
    record(brunn_sections(v, l, {0.3 * edge, 0.6 * edge, 0.9 * edge}, 20000, mix_seed(seed, 20 + s)));
  }
  return t.report("brunn-sections", "Vol_s(V ∩ (z + L_s)) ≤ Vol_s(V ∩ L_s)");
}

VerificationReport check_lemma3(std::uint64_t seed) {
  Tally t;
  for (std::size_t n : {3, 5, 9}) {
    // Full-degree trig systems satisfy Σ φ_k² ≡ n.
    auto system = std::make_shared<const OrthonormalSystem>(trig_system(static_cast<int>((n - 1) / 2)));
    for (double p : {2.0, 4.0, 8.0}) {
      const EstimateWithCI e = expectation_norm(induced_ball(system, p), 20000, mix_seed(seed, n * 100 + p));
      if (p == 2.0)
        t.add(1e-6 + e.half_width - std::abs(e.value - 1.0));
      else
        t.add(expectation_bound(p) + e.half_width - e.value);
    }
  }
  return t.report("lemma3-expectation", "E[‖·‖_B_(J,p)] ≤ 2^(1/2) π^(-1/(2p)) Γ((p+1)/2)^(1/p)");
}

VerificationReport check_duality(std::uint64_t seed) {
  Tally t;
  WidthSearchOptions opts;
  opts.outer_restarts = 64;
  opts.refine_best = 2;
  Rng rng = make_rng(seed, 3);
  std::vector<Matrix> mats = {Matrix::Identity(3, 3), diag({3.0, 2.0, 1.0})};
  for (std::size_t n : {3, 4}) mats.push_back(random_diagonal(n, rng));
  for (const Matrix& a : mats)
    for (std::size_t m = 0; m <= static_cast<std::size_t>(a.rows()); ++m) {
      const DualityReport r = duality_report(a, m, opts, mix_seed(seed, m));
      t.add(1e-2 - std::abs(r.gelfand - r.kolmogorov), r.agrees);
    }
  return t.report("duality", "d^n(u*) = d_n(u)");
}

VerificationReport check_fourier_tail(std::uint64_t seed) {
  Tally t;
  std::vector<double> seq;
  for (int k = 1; k <= 6; ++k) seq.push_back(1.0 / k);
  const MultiplierSpec spec = MultiplierSpec::from_sequence(seq, true);
  for (std::size_t m = 0; m < seq.size(); ++m) {
    const double formula = fourier_tail_sup(spec, m);
    double oracle = 0.0;
    for (std::size_t k = m; k < seq.size(); ++k) oracle = std::max(oracle, std::abs(seq[k]));
    const double numeric = fourier_tail_sup_numeric(seq, m, mix_seed(seed, m));
    t.add(0.0 - std::abs(formula - oracle), formula == oracle && std::abs(numeric - formula) <= 1e-9);
  }
  return t.report("fourier-tail", "sup ‖f - S_m f‖_2 = |λ_(m+1)|");
}

std::vector<ManifoldParams> five_families() {
  return {ManifoldParams::sphere(2), ManifoldParams::real_projective(2), ManifoldParams::complex_projective(4),
          ManifoldParams::quaternionic_projective(8), ManifoldParams::cayley_plane()};
}

VerificationReport check_weyl(std::uint64_t) {
  Tally t;
  for (const ManifoldParams& m : five_families()) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int n = 20; n <= 60; ++n) {
      const double w = weyl_ratio(m, n);
      lo = std::min(lo, w);
      hi = std::max(hi, w);
    }
    t.add(0.2 - (hi / lo - 1.0));
    double worst = std::numeric_limits<double>::infinity();
    for (int n = 10; n <= 60; ++n)
      worst = std::min(worst, 3.0 / n - std::abs(eigenvalue(m, n + 1) / eigenvalue(m, n) - 1.0));
    t.add(worst);
  }
  return t.report("weyl-ratio", "τ_N ≍ θ_N^(d/2)");
}

VerificationReport check_sobolev(std::uint64_t) {
  Tally t;
  const ManifoldParams s2 = ManifoldParams::sphere(2);
  for (double gamma : {1.0, 2.0}) {
    const ScalingFit fit = sobolev_width_order(s2, gamma, 4, 12);
    const double exact = sobolev_exact_width_slope(s2, gamma, 4, 12);
    t.add(0.05 - std::abs(exact - fit.expected));
    t.add(0.05 - std::abs(fit.slope - fit.expected));
  }
  return t.report("sobolev-slope", "d_n(W_2^γ, L_2) ≍ n^(-γ/d)");
}

RadiusCheckOptions verify_radius_options() {
  RadiusCheckOptions o;
  for (std::uint64_t s = 0; s < 4; ++s) o.train_seeds.push_back(s);
  for (std::uint64_t s = 10; s < 14; ++s) o.validate_seeds.push_back(s);
  o.subspaces = 6;
  o.expectation_samples = 20000;
  return o;
}

using CheckFn = std::function<VerificationReport(std::uint64_t)>;

const std::vector<std::pair<std::string, CheckFn>>& check_table() {
  static const std::vector<std::pair<std::string, CheckFn>> table = {
      {"mmm-chain", check_mmm_chain},
      {"lemma1-projection", check_lemma1},
      {"lemma2a", check_lemma2a},
      {"lemma2b", check_lemma2b},
      {"eq111", check_eq111},
      {"eq333-urysohn", check_urysohn},
      {"santalo", check_santalo},
      {"brunn-sections", check_brunn},
      {"lemma3-expectation", check_lemma3},
      {"thm1-radius", [](std::uint64_t s) { return radius_validity_check(false, verify_radius_options(), s); }},
      {"thm2-radius", [](std::uint64_t s) { return radius_validity_check(true, verify_radius_options(), s); }},
      {"duality", check_duality},
      {"fourier-tail", check_fourier_tail},
      {"weyl-ratio", check_weyl},
      {"sobolev-slope", check_sobolev},
  };
  return table;
}

}  // namespace

VerificationReport radius_validity_check(bool cross_section, const RadiusCheckOptions& options, std::uint64_t seed) {
  struct Config {
    std::size_t n;
    double p;
    std::optional<double> q;
  };
  std::vector<Config> grid;
  for (std::size_t n = 3; n <= 6; ++n)
    for (double p : {2.0, 4.0}) {
      if (cross_section)
        for (double q : {1.25, 1.5, 2.0}) grid.push_back({n, p, q});
      else
        grid.push_back({n, p, std::nullopt});
    }
  ExpectationTable expectations(options.expectation_samples, mix_seed(seed, 0xe));
  auto trials = [&](const std::vector<std::uint64_t>& seeds) {
    return parallel_map(grid.size() * seeds.size(), [&](std::size_t i) {
      const Config& c = grid[i / seeds.size()];
      RadiusTrialSpec spec;
      spec.n = c.n;
      spec.p = c.p;
      spec.q = c.q;
      spec.seed = mix_seed(mix_seed(seed, seeds[i % seeds.size()]), i / seeds.size());
      spec.subspaces = options.subspaces;
      spec.restarts = options.restarts;
      return run_radius_trial(spec, expectations);
    });
  };
  const std::string name = cross_section ? "thm2-radius" : "thm1-radius";
  CalibrationConstant c = calibrate(name, trials(options.train_seeds), options.safety);
  c.value *= options.constant_scale;
  Tally t;
  for (const RadiusTrialResult& r : trials(options.validate_seeds)) {
    const double bound = c.value * r.unit_bound;
    t.add(r.min_radius / bound - 1.0);
  }
  return t.report(name, cross_section
                            ? "rad(A B_(J,p)^n ∩ L_s | B_(J,q)^n) ≥ C ϱ_n (E[‖·‖_B_(J,q')] E[‖·‖_B_(J,p)])^(-n/s)"
                            : "rad(A B_(J,p)^n ∩ L_r | B_(J,1)^n) ≥ C ϱ_n E[‖·‖_B_(J,p)]^(-3/2)");
}

const std::vector<std::string>& verification_checks() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, fn] : check_table()) v.push_back(name);
    return v;
  }();
  return names;
}

VerificationReport run_check(const std::string& name, std::uint64_t seed) {
  if (name == "santalo-2d") return santalo_2d_report();
  for (const auto& [check, fn] : check_table())
    if (check == name) {
      try {
        return fn(mix_seed(seed, hash_name(name)));
      } catch (const std::exception& e) {
        VerificationReport r;
        r.check = name;
        r.anchor = e.what();
        r.violations = 1;
        r.worst_margin = -std::numeric_limits<double>::infinity();
        return r;
      }
    }
  throw ConfigError("unknown check '" + name + "'");
}

std::vector<VerificationReport> verify_all(std::uint64_t seed) {
  const auto& names = verification_checks();
  return parallel_map(names.size(), [&](std::size_t i) { return run_check(names[i], seed); });
}

// ---------------------------------------------------------------- tasks

std::string RunOutput::csv() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      const bool quote = cells[i].find_first_of(",\"\n") != std::string::npos;
      if (quote) {
        out += '"';
        for (char ch : cells[i]) {
          if (ch == '"') out += '"';
          out += ch;
        }
        out += '"';
      } else {
        out += cells[i];
      }
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

namespace {

std::shared_ptr<const OrthonormalSystem> system_from(const json& spec, std::optional<int> n_override) {
  const std::string kind = spec.at("kind").get<std::string>();
  try {
    if (kind == "sphere") {
      const int degree = n_override ? *n_override : spec.value("degree", 2);
      return std::make_shared<const OrthonormalSystem>(sphere_harmonics_system(degree));
    }
    if (n_override) return trig_ptr(static_cast<std::size_t>(*n_override));
    if (spec.contains("degree")) return std::make_shared<const OrthonormalSystem>(trig_system(spec["degree"].get<int>()));
    return trig_ptr(spec.value("n", 3));
  } catch (const json::exception&) {
    throw ConfigError("field 'system' has a malformed size");
  }
}

std::vector<std::optional<int>> sizes(const ExperimentConfig& c) {
  if (c.n_values.empty()) return {std::nullopt};
  std::vector<std::optional<int>> out;
  for (int n : c.n_values) out.emplace_back(n);
  return out;
}

bool sums_to_n(const OrthonormalSystem& s) {
  // Σ φ_k² ≡ n at every quadrature node.
  const Matrix& v = s.node_values();
  for (Eigen::Index i = 0; i < v.rows(); ++i)
    if (std::abs(v.row(i).squaredNorm() - static_cast<double>(s.dimension())) > 1e-9) return false;
  return true;
}

RunOutput task_expect(const ExperimentConfig& c) {
  RunOutput out;
  out.header = {"system", "n", "p", "estimate", "half_width", "samples", "bound", "holds"};
  json rows = json::array();
  for (const auto& size : sizes(c)) {
    const auto system = system_from(c.system, size);
    const EstimateWithCI e = expectation_norm(induced_ball(system, c.p), c.samples, c.seed);
    const bool bounded = c.p >= 2.0 && std::isfinite(c.p) && sums_to_n(*system);
    const double bound = bounded ? expectation_bound(c.p) : std::numeric_limits<double>::quiet_NaN();
    const bool holds = !bounded || e.value <= bound + e.half_width;
    out.pass = out.pass && holds;
    out.rows.push_back({system->name(), std::to_string(system->dimension()), format_double(c.p), format_double(e.value),
                        format_double(e.half_width), std::to_string(e.samples), format_double(bound),
                        holds ? "true" : "false"});
    rows.push_back({{"system", system->name()}, {"estimate", e.to_json()}, {"bound", bounded ? json(bound) : json()},
                    {"holds", holds}});
  }
  out.summary = {{"p", c.p}, {"results", rows}};
  return out;
}

RunOutput task_volume(const ExperimentConfig& c) {
  RunOutput out;
  out.header = {"system", "n", "p", "volume_ratio", "half_width", "expectation", "urysohn_bound", "holds"};
  json rows = json::array();
  for (const auto& size : sizes(c)) {
    const auto system = system_from(c.system, size);
    const std::size_t n = system->dimension();
    const Body v = induced_ball(system, c.p);
    const EstimateWithCI vol = mc_volume_ratio(v, euclidean_ball(n), c.samples, mix_seed(c.seed, 1));
    const EstimateWithCI e = expectation_norm(v, c.samples, mix_seed(c.seed, 2));
    const double nn = static_cast<double>(n);
    const double bound = std::pow(e.value, -nn);
    const double slack = vol.half_width + nn * std::pow(e.value, -nn - 1.0) * e.half_width;
    const bool holds = vol.value + slack >= bound;
    out.pass = out.pass && holds;
    out.rows.push_back({system->name(), std::to_string(n), format_double(c.p), format_double(vol.value),
                        format_double(vol.half_width), format_double(e.value), format_double(bound),
                        holds ? "true" : "false"});
    rows.push_back({{"system", system->name()}, {"volume", vol.to_json()}, {"expectation", e.to_json()},
                    {"urysohn_bound", bound}, {"holds", holds}});
  }
  out.summary = {{"p", c.p}, {"results", rows}};
  return out;
}

RunOutput task_radius(const ExperimentConfig& c) {
  RunOutput out;
  out.header = {"n", "p", "q", "varrho", "min_radius", "unit_bound", "ratio"};
  ExpectationTable table(c.samples, mix_seed(c.seed, 0xe));
  std::vector<int> ns = c.n_values.empty() ? std::vector<int>{3, 4, 5, 6} : c.n_values;
  json rows = json::array();
  for (int n : ns) {
    if (n < 2) throw ConfigError("field 'n_values': radius trials need n >= 2");
    RadiusTrialSpec spec;
    spec.n = static_cast<std::size_t>(n);
    spec.p = c.p;
    spec.q = c.q;
    spec.seed = mix_seed(c.seed, static_cast<std::uint64_t>(n));
    spec.restarts = c.restarts;
    const RadiusTrialResult r = run_radius_trial(spec, table);
    out.rows.push_back({std::to_string(n), format_double(c.p), c.q ? format_double(*c.q) : "", format_double(varrho(r.a)),
                        format_double(r.min_radius), format_double(r.unit_bound), format_double(r.ratio())});
    rows.push_back({{"n", n}, {"min_radius", r.min_radius}, {"unit_bound", r.unit_bound}, {"ratio", r.ratio()}});
  }
  out.summary = {{"p", c.p}, {"q", c.q ? json(*c.q) : json()}, {"results", rows}};
  return out;
}

RunOutput task_widths(const ExperimentConfig& c) {
  if (c.semiaxes.empty()) throw ConfigError("missing field 'semiaxes'");
  std::vector<double> axes = c.semiaxes;
  std::sort(axes.begin(), axes.end(), std::greater<>());
  const std::size_t n = axes.size();
  if (n > 5) throw ConfigError("field 'semiaxes': brute-force widths need n <= 5");
  Vector d(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) d[static_cast<Eigen::Index>(i)] = axes[i];
  const Matrix a = d.asDiagonal();
  const Body ball = euclidean_ball(n);
  const Body v = linear_image(ball, a);
  WidthSearchOptions opts;
  opts.inner_restarts = c.restarts;
  RunOutput out;
  out.header = {"m", "exact", "kolmogorov", "gelfand", "max_error"};
  json rows = json::array();
  for (std::size_t m = 0; m <= n; ++m) {
    const double exact = ellipsoid_kolmogorov_exact(axes, m);
    const WidthResult k = brute_force_kolmogorov(v, ball, m, opts, mix_seed(c.seed, m));
    const WidthResult g = brute_force_gelfand(v, ball, m, opts, mix_seed(c.seed, 100 + m));
    const double err = std::max(std::abs(k.value - exact), std::abs(g.value - exact));
    out.pass = out.pass && err <= 1e-3;
    out.rows.push_back({std::to_string(m), format_double(exact), format_double(k.value), format_double(g.value),
                        format_double(err)});
    rows.push_back({{"m", m}, {"exact", exact}, {"kolmogorov", k.to_json()}, {"gelfand", g.to_json()}});
  }
  out.summary = {{"semiaxes", axes}, {"results", rows}};
  return out;
}

ManifoldParams manifold_from(const std::string& name) {
  auto dim = [&name](std::size_t prefix) {
    try {
      return std::stoi(name.substr(prefix));
    } catch (const std::exception&) {
      throw ConfigError("field 'manifold': cannot read dimension in '" + name + "'");
    }
  };
  try {
    if (name == "Cay" || name == "OP16") return ManifoldParams::cayley_plane();
    if (name.rfind("RP", 0) == 0) return ManifoldParams::real_projective(dim(2));
    if (name.rfind("CP", 0) == 0) return ManifoldParams::complex_projective(dim(2));
    if (name.rfind("HP", 0) == 0) return ManifoldParams::quaternionic_projective(dim(2));
    if (name.rfind("S", 0) == 0) return ManifoldParams::sphere(dim(1));
  } catch (const BadDimensions& e) {
    throw ConfigError(std::string("field 'manifold': ") + e.what());
  }
  throw ConfigError("field 'manifold': unknown manifold '" + name + "'");
}

RunOutput task_scaling(const ExperimentConfig& c) {
  const ManifoldParams params = manifold_from(c.manifold);
  const ScalingFit fit = sobolev_width_order(params, c.gamma, c.n_min, c.n_max);
  const double exact_slope = sobolev_exact_width_slope(params, c.gamma, c.n_min, c.n_max);
  RunOutput out;
  out.header = {"N", "tau", "theta", "bound", "lambda_theta", "exact_width"};
  const SpectralData spectral = SpectralData::build(params, c.n_max + 1);
  const std::vector<double> a =
      expand_multiplier(sobolev_multiplier(params, c.gamma), spectral, spectral.tau[c.n_max] + 1);
  for (std::size_t i = 0; i < fit.degrees.size(); ++i) {
    const std::size_t tau = static_cast<std::size_t>(fit.n[i]);
    out.rows.push_back({std::to_string(fit.degrees[i]), std::to_string(tau),
                        format_double(eigenvalue(params, fit.degrees[i])), format_double(fit.bound[i]),
                        format_double(fit.lambda_at_theta[i]), format_double(a[tau])});
  }
  out.pass = std::abs(fit.slope - fit.expected) <= 0.05 && std::abs(exact_slope - fit.expected) <= 0.05;
  out.summary = {{"manifold", params.name()}, {"gamma", c.gamma},          {"expected_slope", fit.expected},
                 {"bound_slope", fit.slope},  {"exact_width_slope", exact_slope}, {"lambda_theta_slope", fit.theta_slope}};
  return out;
}

RunOutput reports_output(const std::vector<VerificationReport>& reports) {
  RunOutput out;
  out.header = {"check", "anchor", "trials", "violations", "worst_margin", "pass"};
  json list = json::array();
  for (const auto& r : reports) {
    out.rows.push_back({r.check, r.anchor, std::to_string(r.trials), std::to_string(r.violations),
                        format_double(r.worst_margin), r.pass ? "true" : "false"});
    list.push_back(r.to_json());
    out.pass = out.pass && r.pass;
  }
  out.summary = {{"reports", list}};
  return out;
}

RunOutput task_verify(const ExperimentConfig& c) {
  if (c.checks.empty() || (c.checks.size() == 1 && c.checks[0] == "all")) return reports_output(verify_all(c.seed));
  for (const auto& name : c.checks) {
    const auto& all = verification_checks();
    if (name != "santalo-2d" && std::find(all.begin(), all.end(), name) == all.end())
      throw ConfigError("field 'checks': unknown check '" + name + "'");
  }
  return reports_output(parallel_map(c.checks.size(), [&](std::size_t i) { return run_check(c.checks[i], c.seed); }));
}

}  // namespace

RunOutput run(const ExperimentConfig& config) {
  RunOutput out;
  if (config.task == "expect") out = task_expect(config);
  else if (config.task == "volume") out = task_volume(config);
  else if (config.task == "radius") out = task_radius(config);
  else if (config.task == "widths") out = task_widths(config);
  else if (config.task == "scaling") out = task_scaling(config);
  else if (config.task == "verify") out = task_verify(config);
  else throw ConfigError("field 'task': unknown task '" + config.task + "'");
  out.summary["task"] = config.task;
  out.summary["seed"] = config.seed;
  out.summary["pass"] = out.pass;
  return out;
}

void write_output(const RunOutput& out, const std::filesystem::path& dir, const std::string& task) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / (task + ".csv"), std::ios::binary);
    csv << out.csv();
  }
  std::ofstream js(dir / (task + ".json"), std::ios::binary);
  js << out.summary.dump(2) << '\n';
}

}  // namespace widthlab
