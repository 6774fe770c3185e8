#pragma once

// Cutoff families, charge integrands, quadrature over annuli and geodesic
// spheres, the ADM-style / surface / Ricci charge functionals, and the mass
// vector / mass-aspect projections.
//
// Charge quadrature works in the Polar chart: annulus [k, k+1] x S^{n-1}
// with Gauss nodes in r and a SphereRule in the angle, volume element
// sinh^{n-1}(r) dr dmu^sigma.

#include "ahmass/eigenfunctions.hpp"
#include "ahmass/geometry.hpp"
#include "ahmass/quadrature.hpp"
#include "ahmass/tensorcalc.hpp"

#include <memory>
#include <optional>
#include <string>

namespace ahmass {

enum class CutoffProfile { Quintic, Septic };

// chi(t) = 1 on t <= 0, 0 on t >= 1, C^2 across both ends; the family is
// chi_k(r) = chi(r - k) over the schedule of k values.
struct CutoffFamily {
  CutoffProfile profile = CutoffProfile::Quintic;
  std::vector<double> schedule;

  void eval(double r, double k, double& chi, double& dchi, double& ddchi) const;
};

CutoffFamily make_cutoffs(double k_min, double k_max,
                          CutoffProfile profile = CutoffProfile::Quintic);

// int (-n chi' + chi'') dr over the transition interval; equals n exactly.
double cutoff_radial_identity(const CutoffFamily& cutoffs, int n, int quad_order = 32);

// ---------------------------------------------------------------------------

struct ChargeResult {
  std::vector<std::pair<double, double>> samples;  // (k or r, value)
  double extrapolated = 0.0;
  double error_estimate = 0.0;
  double rate = 0.0;  // fitted decay rate gamma in p_k ~ p + a e^{-gamma k}
  bool converged = false;
  std::string diagnostics;
};

struct ExponentialFit {
  double limit = 0.0, amplitude = 0.0, rate = 0.0, rms = 0.0;
  bool ok = false;
};
// Least-squares fit p_k = p + a e^{-gamma k} with gamma > 0.
ExponentialFit fit_exponential_decay(const std::vector<std::pair<double, double>>& samples);

// ---------------------------------------------------------------------------

// Test functions for the charge functionals: lapse functions (Hess V = V b),
// eigenfunctions (Delta V = n V), or generic decaying radial functions.
struct TestFunction {
  enum class Kind { Lapse, Eigen, Generic };
  Kind kind = Kind::Generic;
  // value and covector dV at p, components in p's chart
  std::function<std::pair<double, Vec>(const Point&)> eval;
  LapseFunction lapse{Vec()};
  std::shared_ptr<const Eigenfunction> eigen;
};

TestFunction test_function(const LapseFunction& V);
TestFunction test_function(std::shared_ptr<const Eigenfunction> V);
// V(r) with derivative dV/dr (e.g. e^{-2r} decaying test data).
TestFunction radial_test_function(std::function<double(double)> value,
                                  std::function<double(double)> derivative);

enum class IntegrandForm { Standard, Hessian };

struct ChargeOptions {
  FdConfig fd{};
  int radial_order = 16;
  std::optional<IntegrandForm> form;  // default: Hessian for Eigen, else Standard
  bool ricci_exact_scalar = false;    // add the exact scalar-trace correction
};

// Pointwise integrands. grad_chi is the covector D chi at p (the formulas
// apply it with the minus sign of -D chi themselves).
double charge_integrand_standard(const MetricPerturbation& e, const TestFunction& V,
                                 const Vec& grad_chi, const Point& p,
                                 const FdConfig& fd = {});
// Radial-cutoff variant of the integration-by-parts (Hessian) form; needs no
// derivatives of e. chi1 = chi'(r-k), chi2 = chi''(r-k).
double charge_integrand_hessian(const MetricPerturbation& e, const TestFunction& V,
                                double chi1, double chi2, const Point& p);

// One annulus of the cutoff charge, int over supp(D chi_k).
double charge_annulus(const MetricPerturbation& e, const TestFunction& V,
                      const CutoffFamily& cutoffs, double k, const SphereRule& rule,
                      const ChargeOptions& opt = {});

ChargeResult charge_adm(const MetricPerturbation& e, const TestFunction& V,
                        const CutoffFamily& cutoffs, const SphereRule& rule,
                        const ChargeOptions& opt = {});

double charge_surface(const MetricPerturbation& e, const TestFunction& V, double r,
                      const SphereRule& rule, const ChargeOptions& opt = {});

// Ricci charge with the conformal Killing field X = grad V (V a lapse) or
// X = DV (V an eigenfunction).
ChargeResult charge_ricci(const MetricPerturbation& e, const TestFunction& V,
                          const CutoffFamily& cutoffs, const SphereRule& rule,
                          const ChargeOptions& opt = {});

struct MassVector {
  Vec p;  // (p^0, ..., p^n)
  std::vector<ChargeResult> charges;
  bool converged = false;

  double spatial_norm() const { return p.tail(p.size() - 1).norm(); }
  bool future_timelike() const { return p[0] > spatial_norm(); }
};

MassVector mass_vector(const MetricPerturbation& e, const CutoffFamily& cutoffs,
                       const SphereRule& rule, const ChargeOptions& opt = {});

// Coefficients P(e, v_alpha)/n for eigenfunction test data v_alpha; for Wang
// metrics these are the sphere projections int m v_alpha dmu^sigma.
struct AspectProjection {
  std::vector<double> coefficients;
  std::vector<ChargeResult> charges;
};
AspectProjection mass_aspect_project(const MetricPerturbation& e,
                                     const std::vector<BoundaryFunction>& test_data,
                                     const CutoffFamily& cutoffs, const SphereRule& rule,
                                     const KernelQuadratureSpec& kernel_spec = {},
                                     const ChargeOptions& opt = {});

}  // namespace ahmass
