#include "runner.hpp"

#include <json.hpp>

#include <random>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ahmass::runner {

using nlohmann::json;

namespace {

void require_known_keys(const json& obj, const std::string& where,
                        std::initializer_list<const char*> known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) ok = true;
    if (!ok) throw ConfigError("unknown field '" + where + it.key() + "'");
  }
}

template <typename T>
void read_field(const json& obj, const std::string& where, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("field '" + where + key + "' has the wrong type");
  }
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {
      "wang",  "kottler", "gauge", "boost", "rotation", "eigen_selftest",
      "integrals_selftest"};
  return names;
}

void validate(const RunConfig& c) {
  bool known = false;
  for (const auto& s : scenario_names()) known = known || s == c.scenario;
  if (!known) throw ConfigError("unknown scenario '" + c.scenario + "'");
  if (c.dimension < 3) throw ConfigError("dimension must be >= 3");
  if (c.dimension > 6 && c.scenario != "integrals_selftest")
    throw ConfigError("dimension > 6 needs the Monte Carlo sphere rule; unsupported in the runner");
  const auto& q = c.quadrature;
  if (q.sphere_order < 4 || q.sphere_order > 64)
    throw ConfigError("quadrature.sphere_order must be in [4, 64]");
  if (q.radial_order < 4 || q.radial_order > 64)
    throw ConfigError("quadrature.radial_order must be in [4, 64]");
  if (q.kernel_radial_order < 8 || q.kernel_radial_order > 512)
    throw ConfigError("quadrature.kernel_radial_order must be in [8, 512]");
  if (q.kernel_angular_order < 8 || q.kernel_angular_order > 64)
    throw ConfigError("quadrature.kernel_angular_order must be in [8, 64]");
  if (c.cutoff.profile != "quintic" && c.cutoff.profile != "septic")
    throw ConfigError("cutoff.profile must be 'quintic' or 'septic'");
  if (c.cutoff.k_min < 3.0) throw ConfigError("cutoff.k_min must be >= 3 (inner radius + 1)");
  if (c.cutoff.k_max > 12.0)
    throw ConfigError("cutoff.k_max is capped at 12 (sinh^{n-1} rho^n cancellation)");
  if (c.cutoff.k_max < c.cutoff.k_min + 3.0)
    throw ConfigError("cutoff.k_max must be >= k_min + 3 (extrapolation needs 4 samples)");
  if (!(c.fd_step > 0.0) || c.fd_step > 1e-2)
    throw ConfigError("fd_step must be in (0, 1e-2]");
  if (c.harmonics.size() > 9) throw ConfigError("params.harmonics takes at most 9 entries");
  if (c.dimension != 3 && c.harmonics.size() > 1)
    throw ConfigError("params.harmonics beyond a constant needs dimension 3");
  if (c.zeta.kind != "radial" && c.zeta.kind != "rotation" && c.zeta.kind != "translation")
    throw ConfigError("params.zeta.kind must be radial, rotation or translation");
  if (c.m0 < 0.0) throw ConfigError("params.m0 must be >= 0");
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

BoundaryFunction boundary_from(const RunConfig& c) {
  if (c.harmonics.size() <= 1)
    return BoundaryFunction::constant(c.harmonics.size() == 1 ? c.harmonics[0] : 1.0);
  return BoundaryFunction::harmonics(c.harmonics);
}

CutoffFamily cutoffs_from(const RunConfig& c) {
  return make_cutoffs(c.cutoff.k_min, c.cutoff.k_max,
                      c.cutoff.profile == "quintic" ? CutoffProfile::Quintic
                                                    : CutoffProfile::Septic);
}

ChargeOptions options_from(const RunConfig& c) {
  ChargeOptions opt;
  opt.radial_order = c.quadrature.radial_order;
  opt.fd = FdConfig{c.fd_step, true};
  return opt;
}

VectorField zeta_from(const RunConfig& c) {
  const int n = c.dimension;
  if (c.zeta.kind == "rotation")
    return gauge_field_rotation(n, c.zeta.amplitude, c.zeta.decay, c.zeta.inner_radius, 1, 2);
  if (c.zeta.kind == "translation")
    return gauge_field_translation(n, c.zeta.amplitude, c.zeta.decay, c.zeta.inner_radius, 1);
  return gauge_field_radial(n, c.zeta.amplitude, c.zeta.decay, c.zeta.inner_radius);
}

void add_gate(RunReport& rep, const std::string& name, double value, double threshold) {
  GateResult g{name, value, threshold, std::abs(value) <= threshold};
  rep.gates_ok = rep.gates_ok && g.pass;
  rep.gates.push_back(std::move(g));
}

void add_charge(RunReport& rep, const std::string& name, ChargeResult res) {
  rep.numerics_ok = rep.numerics_ok && res.converged;
  rep.charges.push_back({name, std::move(res)});
}

// Sphere-rule moments of the boundary data against the lapse boundary traces.
Vec aspect_moments(int n, const BoundaryFunction& m, const SphereRule& rule) {
  Vec p = Vec::Zero(n + 1);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double mv = m(rule.nodes[i]) * rule.weights[i];
    p[0] += mv;
    for (int k = 0; k < n; ++k) p[k + 1] += mv * rule.nodes[i][k];
  }
  return p;
}

void run_wang(const RunConfig& c, RunReport& rep) {
  const int n = c.dimension;
  const BoundaryFunction m = boundary_from(c);
  const MetricPerturbation e = make_wang_metric(n, m);
  const SphereRule rule = sphere_rule(n, c.quadrature.sphere_order, c.rng_seed);
  const CutoffFamily cutoffs = cutoffs_from(c);
  const ChargeOptions opt = options_from(c);

  Timer t;
  MassVector mv = mass_vector(e, cutoffs, rule, opt);
  rep.timings_ms["mass_vector"] = t.ms();
  for (int mu = 0; mu <= n; ++mu)
    add_charge(rep, "p" + std::to_string(mu), mv.charges[mu]);
  rep.mass = mv.p;

  const Vec expect = aspect_moments(n, m, rule);
  const double scale = std::max(1.0, std::abs(expect[0]));
  for (int mu = 0; mu <= n; ++mu)
    add_gate(rep, "mass_p" + std::to_string(mu), (mv.p[mu] - expect[mu]) / scale,
             c.tolerances.mass_rel);
}

void run_kottler(const RunConfig& c, RunReport& rep) {
  const int n = c.dimension;
  const MetricPerturbation e = make_kottler(n, c.m0);
  const SphereRule rule = sphere_rule(n, c.quadrature.sphere_order, c.rng_seed);
  const CutoffFamily cutoffs = cutoffs_from(c);
  const ChargeOptions opt = options_from(c);

  Timer t;
  MassVector mv = mass_vector(e, cutoffs, rule, opt);
  rep.timings_ms["mass_vector"] = t.ms();
  for (int mu = 0; mu <= n; ++mu)
    add_charge(rep, "p" + std::to_string(mu), mv.charges[mu]);
  rep.mass = mv.p;

  // structural gates: constant aspect, no boost components, linearity in m0
  double mean = 0.0, sd = 0.0;
  const double r_probe = c.cutoff.k_max - 1.0;
  for (std::size_t i = 0; i < rule.size(); ++i)
    mean += kottler_recovered_aspect(e, r_probe, rule.nodes[i]);
  mean /= rule.size();
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double v = kottler_recovered_aspect(e, r_probe, rule.nodes[i]) - mean;
    sd += v * v;
  }
  sd = std::sqrt(sd / rule.size());
  add_gate(rep, "aspect_constancy", c.m0 > 0 ? sd / std::abs(mean) : 0.0,
           c.tolerances.mass_rel);
  add_gate(rep, "spatial_components", mv.p.tail(n).norm() / std::max(1e-12, mv.p[0]),
           c.tolerances.mass_rel);
  if (c.m0 > 0.0) {
    const MetricPerturbation e2 = make_kottler(n, 2.0 * c.m0);
    const TestFunction V0 = test_function(lapse_basis(n, 0));
    const double p1 = charge_surface(e, V0, r_probe + 1.0, rule, opt);
    const double p2 = charge_surface(e2, V0, r_probe + 1.0, rule, opt);
    add_gate(rep, "linearity_in_m0", p2 / p1 - 2.0, 2.0 * c.tolerances.mass_rel);
  }
}

void run_gauge(const RunConfig& c, RunReport& rep) {
  const int n = c.dimension;
  const MetricPerturbation e = make_wang_metric(n, boundary_from(c));
  const SphereRule rule = sphere_rule(n, c.quadrature.sphere_order, c.rng_seed);
  const CutoffFamily cutoffs = cutoffs_from(c);
  ChargeOptions opt = options_from(c);
  opt.form = IntegrandForm::Hessian;  // no FD derivatives of the composed field

  const ChartChange phi = gauge_change(n, zeta_from(c), c.zeta.decay);
  Timer t;
  const MetricPerturbation e2 = apply_chart_change(e, phi, opt.fd);
  MassVector before = mass_vector(e, cutoffs, rule, opt);
  MassVector after = mass_vector(e2, cutoffs, rule, opt);
  rep.timings_ms["gauge_pair"] = t.ms();
  for (int mu = 0; mu <= n; ++mu) {
    add_charge(rep, "before_p" + std::to_string(mu), before.charges[mu]);
    add_charge(rep, "after_p" + std::to_string(mu), after.charges[mu]);
  }
  rep.mass = after.p;
  const double scale = std::max(1.0, n * std::abs(before.p[0]));
  for (int mu = 0; mu <= n; ++mu)
    add_gate(rep, "gauge_invariance_p" + std::to_string(mu),
             n * (after.p[mu] - before.p[mu]) / scale, c.tolerances.mass_rel);

  // pure gauge of b itself carries no mass
  const MetricPerturbation pure = apply_chart_change(zero_perturbation(n), phi, opt.fd);
  MassVector ghost = mass_vector(pure, cutoffs, rule, opt);
  add_gate(rep, "pure_gauge_mass", ghost.p.cwiseAbs().maxCoeff() / scale,
           c.tolerances.mass_rel);
}

void run_isometry(const RunConfig& c, RunReport& rep, bool boost) {
  const int n = c.dimension;
  const MetricPerturbation e = make_wang_metric(n, boundary_from(c));
  const SphereRule rule = sphere_rule(n, c.quadrature.sphere_order, c.rng_seed);
  const CutoffFamily cutoffs = cutoffs_from(c);
  ChargeOptions opt = options_from(c);
  opt.form = IntegrandForm::Hessian;

  const ChartChange phi = boost ? isometry_change(lorentz_boost(n, 1, c.rapidity))
                                : isometry_change(lorentz_rotation(n, 1, 2, c.angle));
  Timer t;
  const MassCovarianceReport rep_cov = verify_mass_covariance(e, phi, cutoffs, rule, opt);
  rep.timings_ms["covariance"] = t.ms();
  rep.mass = rep_cov.p_after;
  add_gate(rep, boost ? "boost_mixing" : "rotation_equivariance", rep_cov.max_gap,
           boost ? c.tolerances.mix_rel : c.tolerances.mass_rel);
  if (!boost)
    add_gate(rep, "p0_invariance",
             (rep_cov.p_after[0] - rep_cov.p_before[0]) / std::max(1e-12, rep_cov.p_before[0]),
             c.tolerances.mass_rel);
}

void run_eigen_selftest(const RunConfig& c, RunReport& rep) {
  const int n = c.dimension;
  if (n != 3) throw ConfigError("eigen_selftest needs dimension 3 (harmonic boundary data)");
  const KernelQuadratureSpec spec{c.quadrature.kernel_radial_order,
                                  c.quadrature.kernel_angular_order};
  std::mt19937_64 rng(c.rng_seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> ur(0.3, 4.0);
  std::vector<Point> pts;
  for (int s = 0; s < 20; ++s) {
    Vec d(n);
    for (int i = 0; i < n; ++i) d[i] = gauss(rng);
    d.normalize();
    pts.push_back(polar_point(ur(rng), d));
  }

  Timer t;
  double worst = 0.0;
  for (int mu = 0; mu <= n; ++mu) {
    Vec coeff = Vec::Zero(4);
    coeff[mu] = 1.0;
    Eigenfunction V(n, BoundaryFunction::harmonics(coeff), spec);
    const LapseFunction L = lapse_basis(n, mu);
    for (const Point& p : pts) {
      const double expect = lapse_value(L, p);
      worst = std::max(worst, std::abs(V.value(p) - expect) / std::max(1.0, std::abs(expect)));
    }
  }
  add_gate(rep, "lapse_reproduction", worst, c.tolerances.eigen_rel);

  // FD residual of the eigen equation for a mixed harmonic
  Eigenfunction W(n,
                  BoundaryFunction::harmonics(
                      (Vec(9) << 0.5, 0.3, 0, -0.2, 0.4, 0, 0, 0.25, -0.15).finished()),
                  spec);
  double worst_res = 0.0;
  for (double r : {1.0, 2.5, 4.0, 6.0}) {
    Vec d(n);
    for (int i = 0; i < n; ++i) d[i] = gauss(rng);
    d.normalize();
    const Point p = polar_point(r, d);
    // FD Laplacian in the polar chart
    const ChartFrame f = background(p);
    const double h = 1e-3;
    Vec grad(n);
    Mat hess(n, n);
    const double f0 = W.value(p);
    for (int i = 0; i < n; ++i) {
      const double fp = W.value(shift_point(p, i, h));
      const double fm = W.value(shift_point(p, i, -h));
      grad[i] = (fp - fm) / (2.0 * h);
      hess(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) {
        const double fpp = W.value(shift_point(shift_point(p, i, h), j, h));
        const double fpm = W.value(shift_point(shift_point(p, i, h), j, -h));
        const double fmp = W.value(shift_point(shift_point(p, i, -h), j, h));
        const double fmm = W.value(shift_point(shift_point(p, i, -h), j, -h));
        hess(i, j) = hess(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
      }
    double lap = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = hess(i, j);
        for (int k = 0; k < n; ++k) v -= f.gamma[k](i, j) * grad[k];
        lap += f.b_inv(i, j) * v;
      }
    worst_res = std::max(worst_res, std::abs(lap - n * f0) / std::max(1.0, std::abs(f0)));
  }
  add_gate(rep, "eigen_residual", worst_res, c.tolerances.residual);
  add_gate(rep, "self_convergence", W.self_convergence_error(pts), 1e-8);
  rep.timings_ms["eigen_selftest"] = t.ms();
}

void run_integrals_selftest(const RunConfig& c, RunReport& rep) {
  Timer t;
  double worst_identity = 0.0, worst_quad = 0.0, worst_vanish = 0.0;
  for (int n : {3, 4, 5}) {
    worst_identity = std::max(
        worst_identity, std::abs(integral_I(n, n + 1.0) / integral_I(n, double(n)) -
                                 (n + 1.0) / (2.0 * n)));
    worst_identity = std::max(
        worst_identity, std::abs(integral_I(n, n + 2.0) / integral_I(n, double(n)) -
                                 (n + 3.0) / (4.0 * n)));
    worst_vanish = std::max(
        worst_vanish,
        std::abs(4.0 * n * (integral_J(n, 2, n + 1) - integral_J(n, 2, n + 2)) -
                 (n - 1.0) * integral_J(n, 2, n)));
    // brute-force radial quadrature oracle of I
    const int order = 200;
    const Quad1D q = gauss_legendre(order, 0.0, 0.5 * M_PI);
    for (double beta : {double(n), n + 2.0}) {
      double acc = 0.0;
      for (int i = 0; i < order; ++i) {
        const double u = q.nodes[i];
        acc += q.weights[i] * std::pow(std::tan(u), n - 2) *
               std::pow(std::cos(u), 2.0 * beta - 2.0);
      }
      worst_quad = std::max(worst_quad, std::abs(integral_I(n, beta) - sphere_area(n - 1) * acc));
    }
  }
  add_gate(rep, "gamma_identities", worst_identity, c.tolerances.selftest);
  add_gate(rep, "vanishing_identity", worst_vanish, 1e-12);
  add_gate(rep, "quadrature_crosscheck", worst_quad, 1e-8);
  rep.timings_ms["integrals_selftest"] = t.ms();
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  require_known_keys(j, "", {"dimension", "scenario", "params", "quadrature", "cutoff",
                             "fd_step", "tolerances", "output", "rng_seed"});
  RunConfig c;
  read_field(j, "", "dimension", c.dimension);
  if (!j.contains("scenario")) throw ConfigError("missing field 'scenario'");
  read_field(j, "", "scenario", c.scenario);
  read_field(j, "", "fd_step", c.fd_step);
  read_field(j, "", "rng_seed", c.rng_seed);

  if (j.contains("params")) {
    const json& p = j.at("params");
    require_known_keys(p, "params.", {"m0", "harmonics", "rapidity", "angle", "zeta"});
    read_field(p, "params.", "m0", c.m0);
    read_field(p, "params.", "rapidity", c.rapidity);
    read_field(p, "params.", "angle", c.angle);
    if (p.contains("harmonics")) {
      std::vector<double> h;
      read_field(p, "params.", "harmonics", h);
      c.harmonics = Eigen::Map<Vec>(h.data(), h.size());
    }
    if (p.contains("zeta")) {
      const json& z = p.at("zeta");
      require_known_keys(z, "params.zeta.", {"kind", "amplitude", "decay", "inner_radius"});
      read_field(z, "params.zeta.", "kind", c.zeta.kind);
      read_field(z, "params.zeta.", "amplitude", c.zeta.amplitude);
      read_field(z, "params.zeta.", "decay", c.zeta.decay);
      read_field(z, "params.zeta.", "inner_radius", c.zeta.inner_radius);
    }
  }
  if (j.contains("quadrature")) {
    const json& q = j.at("quadrature");
    require_known_keys(q, "quadrature.",
                       {"sphere_order", "radial_order", "kernel_radial_order",
                        "kernel_angular_order"});
    read_field(q, "quadrature.", "sphere_order", c.quadrature.sphere_order);
    read_field(q, "quadrature.", "radial_order", c.quadrature.radial_order);
    read_field(q, "quadrature.", "kernel_radial_order", c.quadrature.kernel_radial_order);
    read_field(q, "quadrature.", "kernel_angular_order", c.quadrature.kernel_angular_order);
  }
  if (j.contains("cutoff")) {
    const json& q = j.at("cutoff");
    require_known_keys(q, "cutoff.", {"profile", "k_min", "k_max"});
    read_field(q, "cutoff.", "profile", c.cutoff.profile);
    read_field(q, "cutoff.", "k_min", c.cutoff.k_min);
    read_field(q, "cutoff.", "k_max", c.cutoff.k_max);
  }
  if (j.contains("tolerances")) {
    const json& q = j.at("tolerances");
    require_known_keys(q, "tolerances.",
                       {"mass_rel", "mix_rel", "selftest", "eigen_rel", "residual"});
    read_field(q, "tolerances.", "mass_rel", c.tolerances.mass_rel);
    read_field(q, "tolerances.", "mix_rel", c.tolerances.mix_rel);
    read_field(q, "tolerances.", "selftest", c.tolerances.selftest);
    read_field(q, "tolerances.", "eigen_rel", c.tolerances.eigen_rel);
    read_field(q, "tolerances.", "residual", c.tolerances.residual);
  }
  if (j.contains("output")) {
    const json& q = j.at("output");
    require_known_keys(q, "output.", {"dir", "csv", "plots"});
    read_field(q, "output.", "dir", c.out_dir);
    read_field(q, "output.", "csv", c.write_csv);
    read_field(q, "output.", "plots", c.write_plots);
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

RunReport run(const RunConfig& c) {
  RunReport rep;
  rep.scenario = c.scenario;
  rep.dimension = c.dimension;
  Timer total;
  if (c.scenario == "wang") {
    run_wang(c, rep);
  } else if (c.scenario == "kottler") {
    run_kottler(c, rep);
  } else if (c.scenario == "gauge") {
    run_gauge(c, rep);
  } else if (c.scenario == "boost") {
    run_isometry(c, rep, true);
  } else if (c.scenario == "rotation") {
    run_isometry(c, rep, false);
  } else if (c.scenario == "eigen_selftest") {
    run_eigen_selftest(c, rep);
  } else if (c.scenario == "integrals_selftest") {
    run_integrals_selftest(c, rep);
  } else {
    throw ConfigError("unknown scenario '" + c.scenario + "'");
  }
  rep.timings_ms["total"] = total.ms();
  return rep;
}

std::string list_scenarios() {
  std::ostringstream os;
  os << "scenario             parameters\n";
  os << "wang                 harmonics (boundary aspect data)\n";
  os << "kottler              m0 (mass parameter)\n";
  os << "gauge                harmonics, zeta {kind, amplitude, decay, inner_radius}\n";
  os << "boost                harmonics, rapidity\n";
  os << "rotation             harmonics, angle\n";
  os << "eigen_selftest       kernel quadrature orders\n";
  os << "integrals_selftest   (none)\n";
  return os.str();
}

int exit_code(const RunReport& rep) {
  if (!rep.numerics_ok) return 3;
  return rep.gates_ok ? 0 : 1;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string charge_csv(const ChargeTable& table) {
  std::ostringstream os;
  os << "k_or_r,charge,extrapolated,error_est\n";
  for (const auto& [k, v] : table.result.samples)
    os << fmt(k) << ',' << fmt(v) << ',' << fmt(table.result.extrapolated) << ','
       << fmt(table.result.error_estimate) << '\n';
  return os.str();
}

std::string summary_json(const RunReport& rep) {
  json j;
  j["scenario"] = rep.scenario;
  j["dimension"] = rep.dimension;
  j["all_gates_pass"] = rep.gates_ok;
  j["numerics_converged"] = rep.numerics_ok;
  if (rep.mass) {
    std::vector<double> m(rep.mass->data(), rep.mass->data() + rep.mass->size());
    j["mass_vector"] = m;
  }
  json charges = json::object();
  for (const auto& t : rep.charges) {
    json c;
    c["extrapolated"] = t.result.extrapolated;
    c["error_estimate"] = t.result.error_estimate;
    c["rate"] = t.result.rate;
    c["converged"] = t.result.converged;
    json samples = json::array();
    for (const auto& [k, v] : t.result.samples) samples.push_back({k, v});
    c["samples"] = samples;
    if (!t.result.diagnostics.empty()) c["diagnostics"] = t.result.diagnostics;
    charges[t.name] = c;
  }
  j["charges"] = charges;
  json gates = json::object();
  for (const auto& g : rep.gates)
    gates[g.name] = {{"value", g.value}, {"threshold", g.threshold}, {"pass", g.pass}};
  j["gates"] = gates;
  j["timings_ms"] = rep.timings_ms;
  return j.dump(2) + "\n";
}

std::string charge_svg(const ChargeTable& table) {
  const auto& s = table.result.samples;
  const int W = 480, H = 300, ml = 60, mr = 20, mt = 20, mb = 40;
  double klo = s.front().first, khi = s.back().first;
  double vlo = table.result.extrapolated, vhi = table.result.extrapolated;
  for (const auto& [k, v] : s) {
    vlo = std::min(vlo, v);
    vhi = std::max(vhi, v);
  }
  if (vhi - vlo < 1e-12) {
    vhi += 1.0;
    vlo -= 1.0;
  }
  const double pad = 0.08 * (vhi - vlo);
  vlo -= pad;
  vhi += pad;
  auto X = [&](double k) { return ml + (k - klo) / std::max(1e-12, khi - klo) * (W - ml - mr); };
  auto Y = [&](double v) { return H - mb - (v - vlo) / (vhi - vlo) * (H - mt - mb); };
  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
     << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr << "' y2='"
     << H - mb << "' stroke='black'/>\n";
  os << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << H - mb
     << "' stroke='black'/>\n";
  // extrapolated limit
  os << "<line x1='" << ml << "' y1='" << Y(table.result.extrapolated) << "' x2='"
     << W - mr << "' y2='" << Y(table.result.extrapolated)
     << "' stroke='#888' stroke-dasharray='6 3'/>\n";
  os << "<polyline fill='none' stroke='#1f77b4' stroke-width='1.5' points='";
  for (const auto& [k, v] : s) os << X(k) << ',' << Y(v) << ' ';
  os << "'/>\n";
  for (const auto& [k, v] : s)
    os << "<circle cx='" << X(k) << "' cy='" << Y(v) << "' r='3' fill='#1f77b4'/>\n";
  os << "<text x='" << (W / 2) << "' y='" << (H - 8)
     << "' text-anchor='middle' font-size='12'>k</text>\n";
  os << "<text x='" << (W / 2) << "' y='14' text-anchor='middle' font-size='12'>"
     << table.name << " (limit " << table.result.extrapolated << ")</text>\n";
  os << "</svg>\n";
  return os.str();
}

void write_outputs(const RunReport& rep, const RunConfig& c) {
  namespace fs = std::filesystem;
  fs::create_directories(c.out_dir);
  {
    std::ofstream out(fs::path(c.out_dir) / "summary.json");
    out << summary_json(rep);
  }
  for (const auto& t : rep.charges) {
    if (c.write_csv) {
      std::ofstream out(fs::path(c.out_dir) / ("charge_" + t.name + ".csv"));
      out << charge_csv(t);
    }
    if (c.write_plots && !t.result.samples.empty()) {
      std::ofstream out(fs::path(c.out_dir) / ("charge_" + t.name + ".svg"));
      out << charge_svg(t);
    }
  }
}

}  // namespace ahmass::runner
