#include "ahmass/charges.hpp"

#include <cmath>

namespace ahmass {

namespace {

void profile_eval(CutoffProfile profile, double t, double& chi, double& dchi,
                  double& ddchi) {
  if (t <= 0.0) {
    chi = 1.0;
    dchi = 0.0;
    ddchi = 0.0;
    return;
  }
  if (t >= 1.0) {
    chi = 0.0;
    dchi = 0.0;
    ddchi = 0.0;
    return;
  }
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t, t6 = t5 * t;
  switch (profile) {
    case CutoffProfile::Quintic:
      chi = 1.0 - (6.0 * t5 - 15.0 * t4 + 10.0 * t3);
      dchi = -(30.0 * t4 - 60.0 * t3 + 30.0 * t2);
      ddchi = -(120.0 * t3 - 180.0 * t2 + 60.0 * t);
      return;
    case CutoffProfile::Septic:
      chi = 1.0 - (35.0 * t4 - 84.0 * t5 + 70.0 * t6 - 20.0 * t6 * t);
      dchi = -(140.0 * t3 - 420.0 * t4 + 420.0 * t5 - 140.0 * t6);
      ddchi = -(420.0 * t2 - 1680.0 * t3 + 2100.0 * t4 - 840.0 * t5);
      return;
  }
}

}  // namespace

void CutoffFamily::eval(double r, double k, double& chi, double& dchi,
                        double& ddchi) const {
  profile_eval(profile, r - k, chi, dchi, ddchi);
}

CutoffFamily make_cutoffs(double k_min, double k_max, CutoffProfile profile) {
  if (!(k_min > 0.0) || k_max < k_min)
    throw std::invalid_argument("make_cutoffs: need 0 < k_min <= k_max");
  CutoffFamily c;
  c.profile = profile;
  for (double k = k_min; k <= k_max + 1e-9; k += 1.0) c.schedule.push_back(k);
  return c;
}

double cutoff_radial_identity(const CutoffFamily& cutoffs, int n, int quad_order) {
  const Quad1D q = gauss_legendre(quad_order, 0.0, 1.0);
  double acc = 0.0;
  for (int i = 0; i < quad_order; ++i) {
    double chi, d1, d2;
    profile_eval(cutoffs.profile, q.nodes[i], chi, d1, d2);
    acc += q.weights[i] * (-n * d1 + d2);
  }
  return acc;
}

// ---------------------------------------------------------------------------

ExponentialFit fit_exponential_decay(
    const std::vector<std::pair<double, double>>& samples) {
  ExponentialFit fit;
  const int m = static_cast<int>(samples.size());
  if (m < 4) return fit;

  auto sse_for = [&](double gamma, double* limit, double* amp) {
    // Linear least squares in (p, a) for fixed gamma.
    double s11 = m, s1e = 0, see = 0, s1p = 0, sep = 0;
    for (const auto& [k, v] : samples) {
      const double E = std::exp(-gamma * k);
      s1e += E;
      see += E * E;
      s1p += v;
      sep += E * v;
    }
    const double det = s11 * see - s1e * s1e;
    if (std::abs(det) < 1e-300) return std::numeric_limits<double>::infinity();
    const double p = (see * s1p - s1e * sep) / det;
    const double a = (s11 * sep - s1e * s1p) / det;
    double sse = 0;
    for (const auto& [k, v] : samples) {
      const double r = v - p - a * std::exp(-gamma * k);
      sse += r * r;
    }
    if (limit) *limit = p;
    if (amp) *amp = a;
    return sse;
  };

  const double glo = 0.05, ghi = 6.0;
  double best_g = glo, best_sse = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 240; ++i) {
    const double g = glo * std::pow(ghi / glo, i / 240.0);
    const double s = sse_for(g, nullptr, nullptr);
    if (s < best_sse) {
      best_sse = s;
      best_g = g;
    }
  }
  // Golden-section refinement around the best grid node.
  double lo = best_g / 1.05, hi = best_g * 1.05;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = sse_for(x1, nullptr, nullptr), f2 = sse_for(x2, nullptr, nullptr);
  for (int it = 0; it < 40; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = sse_for(x1, nullptr, nullptr);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = sse_for(x2, nullptr, nullptr);
    }
  }
  const double g = 0.5 * (lo + hi);
  fit.rate = g;
  fit.rms = std::sqrt(sse_for(g, &fit.limit, &fit.amplitude) / m);
  const bool interior = g > glo * 1.01 && g < ghi * 0.99;
  fit.ok = interior && std::isfinite(fit.limit) && std::isfinite(fit.amplitude);
  return fit;
}

namespace {

ChargeResult assemble_result(std::vector<std::pair<double, double>> samples) {
  ChargeResult res;
  res.samples = std::move(samples);
  const int m = static_cast<int>(res.samples.size());
  double vmax = 0.0, spread = 0.0;
  for (const auto& [k, v] : res.samples) vmax = std::max(vmax, std::abs(v));
  for (int i = 1; i < m; ++i)
    spread = std::max(spread, std::abs(res.samples[i].second - res.samples[0].second));

  const double last = res.samples.back().second;
  if (m < 4 || spread < 1e-13 * std::max(1.0, vmax)) {
    res.extrapolated = last;
    res.error_estimate = m >= 2 ? std::abs(last - res.samples[m - 2].second) : 0.0;
    res.converged = true;
    res.diagnostics = m < 4 ? "too few samples for a fit; reporting last sample"
                            : "samples constant to 1e-13; reporting last sample";
    return res;
  }

  // Sequences that have flattened into quadrature noise count as converged.
  const double tail_move = std::max(std::abs(last - res.samples[m - 2].second),
                                    std::abs(last - res.samples[m - 3].second));
  const bool at_noise_floor = tail_move <= 1e-8 * std::max(1.0, std::abs(last));

  const ExponentialFit fit = fit_exponential_decay(res.samples);
  if (!fit.ok) {
    res.extrapolated = last;
    res.error_estimate = std::abs(last - res.samples[m - 2].second);
    res.converged = at_noise_floor;
    res.diagnostics = at_noise_floor
                          ? "tail flat at the quadrature noise floor"
                          : "exponential fit ill-conditioned; reporting last sample";
    return res;
  }
  res.extrapolated = fit.limit;
  res.rate = fit.rate;
  res.error_estimate = std::max(std::abs(last - fit.limit), fit.rms);
  // Residuals against the fitted limit must be shrinking towards the tail.
  const double r_last = std::abs(res.samples[m - 1].second - fit.limit);
  const double r_prev = std::abs(res.samples[m - 3].second - fit.limit);
  res.converged = std::isfinite(fit.limit) &&
                  (r_last <= r_prev + 1e-12 * vmax || at_noise_floor);
  if (!res.converged) res.diagnostics = "tail residuals are not decreasing";
  return res;
}

struct PointData {
  Point p{Chart::Polar, Vec()};
  ChartFrame frame;
  double r = 0.0;
  Vec theta;
  double V = 0.0;
  Vec dV;      // covector
  Vec gradV;   // vector b^{-1} dV
};

PointData point_data(const TestFunction& V, double r, const Vec& theta) {
  PointData d;
  d.p = polar_point(r, theta);
  d.frame = background(d.p);
  d.r = r;
  d.theta = theta;
  const auto [val, grad] = V.eval(d.p);
  d.V = val;
  d.dV = grad;
  d.gradV = d.frame.b_inv * grad;
  return d;
}

// U(b, V, e, chi) against the covector grad_chi (formula applies -D chi).
double standard_integrand(const Jet1& jet, const PointData& d, const Vec& grad_chi) {
  const int n = static_cast<int>(d.theta.size());
  const Vec mgrad_vec = -(d.frame.b_inv * grad_chi);  // (-D chi)^sharp
  double tr_e = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) tr_e += d.frame.b_inv(i, j) * jet.e(i, j);
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    double div_j = 0.0, dtr_j = 0.0;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        div_j += d.frame.b_inv(i, k) * jet.De[i](k, j);
        dtr_j += d.frame.b_inv(i, k) * jet.De[j](i, k);
      }
    acc += d.V * (div_j - dtr_j) * mgrad_vec[j];
    acc += tr_e * d.dV[j] * mgrad_vec[j];
  }
  acc -= d.gradV.dot(jet.e * mgrad_vec);
  return acc;
}

// V b(e, Hess chi) + 2 e(DV, Dchi) - tr(e) (2 b(DV, Dchi) + V Lap chi);
// radial cutoff: Hess chi = chi'' dr (x) dr + coth(r) chi' (b - dr (x) dr).
double hessian_integrand(const Mat& e, const PointData& d, double chi1, double chi2) {
  const int n = static_cast<int>(d.theta.size());
  const double coth = 1.0 / std::tanh(d.r);
  const Mat P = d.theta * d.theta.transpose();
  const Mat hess_chi = chi2 * P + coth * chi1 * (d.frame.b - P);
  const double lap_chi = chi2 + (n - 1.0) * coth * chi1;
  const Mat e_up = d.frame.b_inv * e * d.frame.b_inv;  // e^{kl}
  double tr_e = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) tr_e += d.frame.b_inv(i, j) * e(i, j);
  double acc = d.V * (e_up.cwiseProduct(hess_chi)).sum();
  acc += 2.0 * chi1 * d.gradV.dot(e * d.theta);
  acc -= tr_e * (2.0 * chi1 * d.dV.dot(d.theta) + d.V * lap_chi);
  return acc;
}

IntegrandForm pick_form(const TestFunction& V, const ChargeOptions& opt) {
  if (opt.form) return *opt.form;
  return V.kind == TestFunction::Kind::Eigen ? IntegrandForm::Hessian
                                             : IntegrandForm::Standard;
}

double annulus_quadrature(const MetricPerturbation& e, const TestFunction& V,
                          const CutoffFamily& cutoffs, double k, const SphereRule& rule,
                          const ChargeOptions& opt, IntegrandForm form) {
  const int n = rule.dim;
  const Quad1D radial = gauss_legendre(opt.radial_order, k, k + 1.0);
  double acc = 0.0;
  for (int q = 0; q < opt.radial_order; ++q) {
    const double r = radial.nodes[q];
    double chi, chi1, chi2;
    cutoffs.eval(r, k, chi, chi1, chi2);
    const double vol = std::pow(std::sinh(r), n - 1) * radial.weights[q];
    for (std::size_t a = 0; a < rule.size(); ++a) {
      const PointData d = point_data(V, r, rule.nodes[a]);
      double u;
      if (form == IntegrandForm::Hessian) {
        u = hessian_integrand(perturbation_components(e, d.p), d, chi1, chi2);
      } else {
        const Jet1 jet = perturbation_jet1(e, d.p, opt.fd);
        u = standard_integrand(jet, d, Vec(chi1 * d.theta));
      }
      acc += rule.weights[a] * vol * u;
    }
  }
  return acc;
}

void check_schedule(const MetricPerturbation& e, const CutoffFamily& cutoffs) {
  if (cutoffs.schedule.empty())
    throw std::invalid_argument("charge: empty cutoff schedule");
  if (cutoffs.schedule.front() < e.inner_radius + 1.0 - 1e-9)
    throw std::invalid_argument("charge: k_min must be >= inner_radius + 1");
}

}  // namespace

TestFunction test_function(const LapseFunction& V) {
  TestFunction t;
  t.kind = TestFunction::Kind::Lapse;
  t.lapse = V;
  t.eval = [V](const Point& p) {
    const LapseData d = lapse_eval(V, p);
    return std::make_pair(d.value, d.gradient);
  };
  return t;
}

TestFunction test_function(std::shared_ptr<const Eigenfunction> V) {
  TestFunction t;
  t.kind = TestFunction::Kind::Eigen;
  t.eigen = V;
  t.eval = [V](const Point& p) { return V->value_gradient(p); };
  return t;
}

TestFunction radial_test_function(std::function<double(double)> value,
                                  std::function<double(double)> derivative) {
  TestFunction t;
  t.kind = TestFunction::Kind::Generic;
  t.eval = [value, derivative](const Point& p) {
    const double r = radial_distance(p);
    const double v = value(r);
    Vec grad;
    if (p.chart == Chart::Polar) {
      grad = derivative(r) * p.coords.tail(p.dim());  // dr_i = theta_i in z coords
    } else {
      // dr via the chain rule through the polar chart
      const Point q = convert(p, Chart::Polar);
      const Vec dr_polar = Vec(q.coords.tail(q.dim()));
      const Mat jac = chart_jacobian(p, Chart::Polar);  // d(z)/d(p.chart)
      grad = derivative(r) * Vec(jac.transpose() * dr_polar);
    }
    return std::make_pair(v, grad);
  };
  return t;
}

double charge_integrand_standard(const MetricPerturbation& e, const TestFunction& V,
                                 const Vec& grad_chi, const Point& p,
                                 const FdConfig& fd) {
  const Point q = p.chart == Chart::Polar ? p : convert(p, Chart::Polar);
  PointData d = point_data(V, q.coords[0], Vec(q.coords.tail(q.dim())));
  Vec gchi = grad_chi;
  if (p.chart != Chart::Polar) {
    const Mat jac = chart_jacobian(q, p.chart);  // d(p.chart)/d(polar)
    gchi = jac.transpose() * grad_chi;
  }
  ChargeOptions opt;
  opt.fd = fd;
  const Jet1 jet = perturbation_jet1(e, d.p, fd);
  return standard_integrand(jet, d, gchi);
}

double charge_integrand_hessian(const MetricPerturbation& e, const TestFunction& V,
                                double chi1, double chi2, const Point& p) {
  const Point q = p.chart == Chart::Polar ? p : convert(p, Chart::Polar);
  const PointData d = point_data(V, q.coords[0], Vec(q.coords.tail(q.dim())));
  return hessian_integrand(perturbation_components(e, d.p), d, chi1, chi2);
}

double charge_annulus(const MetricPerturbation& e, const TestFunction& V,
                      const CutoffFamily& cutoffs, double k, const SphereRule& rule,
                      const ChargeOptions& opt) {
  return annulus_quadrature(e, V, cutoffs, k, rule, opt, pick_form(V, opt));
}

ChargeResult charge_adm(const MetricPerturbation& e, const TestFunction& V,
                        const CutoffFamily& cutoffs, const SphereRule& rule,
                        const ChargeOptions& opt) {
  check_schedule(e, cutoffs);
  const IntegrandForm form = pick_form(V, opt);
  std::vector<std::pair<double, double>> samples;
  samples.reserve(cutoffs.schedule.size());
  for (double k : cutoffs.schedule)
    samples.emplace_back(k, annulus_quadrature(e, V, cutoffs, k, rule, opt, form));
  return assemble_result(std::move(samples));
}

double charge_surface(const MetricPerturbation& e, const TestFunction& V, double r,
                      const SphereRule& rule, const ChargeOptions& opt) {
  const int n = rule.dim;
  const double vol = std::pow(std::sinh(r), n - 1);
  double acc = 0.0;
  for (std::size_t a = 0; a < rule.size(); ++a) {
    const PointData d = point_data(V, r, rule.nodes[a]);
    const Jet1 jet = perturbation_jet1(e, d.p, opt.fd);
    // nu = dr (unit outward); reuse the standard integrand with -grad_chi = dr.
    const double u = standard_integrand(jet, d, Vec(-d.theta));
    acc += rule.weights[a] * vol * u;
  }
  return acc;
}

ChargeResult charge_ricci(const MetricPerturbation& e, const TestFunction& V,
                          const CutoffFamily& cutoffs, const SphereRule& rule,
                          const ChargeOptions& opt) {
  check_schedule(e, cutoffs);
  if (V.kind == TestFunction::Kind::Generic)
    throw std::invalid_argument("charge_ricci: test function must be a lapse or eigenfunction");
  const int n = rule.dim;
  std::vector<std::pair<double, double>> samples;
  for (double k : cutoffs.schedule) {
    const Quad1D radial = gauss_legendre(opt.radial_order, k, k + 1.0);
    double acc = 0.0;
    for (int q = 0; q < opt.radial_order; ++q) {
      const double r = radial.nodes[q];
      double chi, chi1, chi2;
      cutoffs.eval(r, k, chi, chi1, chi2);
      const double vol = std::pow(std::sinh(r), n - 1) * radial.weights[q];
      for (std::size_t a = 0; a < rule.size(); ++a) {
        const PointData d = point_data(V, r, rule.nodes[a]);
        Mat G = einstein_linear(e, d.p, opt.fd);
        if (opt.ricci_exact_scalar) {
          // shared jet keeps the quadratic remainder free of FD noise
          const ScalPair sp = scal_both(e, d.p, opt.fd);
          const double corr = sp.exact + n * (n - 1.0) - sp.linear;
          G -= 0.5 * corr * d.frame.b;
        }
        // G(X, -D chi) with X = grad V
        acc += rule.weights[a] * vol * (-chi1) * d.gradV.dot(G * d.theta);
      }
    }
    samples.emplace_back(k, acc);
  }
  return assemble_result(std::move(samples));
}

MassVector mass_vector(const MetricPerturbation& e, const CutoffFamily& cutoffs,
                       const SphereRule& rule, const ChargeOptions& opt) {
  const int n = rule.dim;
  MassVector mv;
  mv.p = Vec::Zero(n + 1);
  mv.converged = true;
  for (int mu = 0; mu <= n; ++mu) {
    ChargeResult res = charge_adm(e, test_function(lapse_basis(n, mu)), cutoffs, rule, opt);
    mv.p[mu] = res.extrapolated / n;
    mv.converged = mv.converged && res.converged;
    mv.charges.push_back(std::move(res));
  }
  return mv;
}

AspectProjection mass_aspect_project(const MetricPerturbation& e,
                                     const std::vector<BoundaryFunction>& test_data,
                                     const CutoffFamily& cutoffs, const SphereRule& rule,
                                     const KernelQuadratureSpec& kernel_spec,
                                     const ChargeOptions& opt) {
  const int n = rule.dim;
  AspectProjection out;
  for (const BoundaryFunction& v : test_data) {
    auto V = std::make_shared<Eigenfunction>(n, v, kernel_spec);
    ChargeResult res = charge_adm(e, test_function(std::move(V)), cutoffs, rule, opt);
    out.coefficients.push_back(res.extrapolated / n);
    out.charges.push_back(std::move(res));
  }
  return out;
}

}  // namespace ahmass
