#pragma once

// Benchmark metric constructions (Wang-type data, a reparametrized static
// spherically symmetric family), chart changes Phi = B o exp(zeta), the
// Bartnik cancellation field, and the covariance experiments.

#include "ahmass/charges.hpp"

namespace ahmass {

// Wang-type perturbation e = rho^{n-2} ebar with
// ebar_ij = m(x/|x|)/(n-1) (delta_ij - x_i x_j/|x|^2); exact derivatives
// supplied when the boundary data has an analytic gradient.
MetricPerturbation make_wang_metric(int n, const BoundaryFunction& m,
                                    double inner_radius = 0.5);

// Static spherically symmetric benchmark: the radial coordinate is
// reparametrized so that e is exactly transversal over b. Throws
// std::runtime_error if the construction fails (horizon inside the working
// region or non-convergent reparametrization).
MetricPerturbation make_kottler(int n, double m0, double inner_radius = 2.0);
// Mass aspect value recovered from a spherically symmetric e at radius r.
double kottler_recovered_aspect(const MetricPerturbation& e, double r, const Vec& theta);

// ---------------------------------------------------------------------------

struct ChartChange {
  LorentzMap B;
  VectorField zeta;   // Ball-chart components; zeta.v may be null (pure isometry)
  double decay = 2.0; // decay order of |zeta|_b
};

ChartChange isometry_change(const LorentzMap& B);
ChartChange gauge_change(int n, const VectorField& zeta, double decay);
ChartChange compose(const ChartChange& outer_applied_second, const ChartChange& inner);

// Smooth decaying fields amplitude * e^{-tau r} * ramp_{[r0, r0+1]}(r) * (unit
// direction): radial, fixed coordinate direction, and a rotational profile.
VectorField gauge_field_radial(int n, double amplitude, double tau, double r0);
VectorField gauge_field_translation(int n, double amplitude, double tau, double r0, int axis);
VectorField gauge_field_rotation(int n, double amplitude, double tau, double r0,
                                 int axis_i, int axis_j);
// Ambient view of a ball-chart vector field (for pullbacks / exp maps).
AmbientField ambient_field(const VectorField& zeta);
// Jacobian of x -> B(x) in p's chart coordinates.
Mat isometry_jacobian(const LorentzMap& B, const Point& p);

// e2 with b + e2 = Phi_*(b + e1), evaluated by exact composition of dB and
// the analytic pullback difference, with FD Jacobians and a Newton inversion
// of exp(zeta). Throws std::domain_error if the needed preimages leave the
// valid region of e1.
MetricPerturbation apply_chart_change(const MetricPerturbation& e1,
                                      const ChartChange& phi, const FdConfig& fd = {});

// Sampled injectivity check of Phi on the annulus (Jacobian determinant and
// pairwise separation of mapped sample points).
bool chart_change_injective(const ChartChange& phi, int n, double r_lo, double r_hi,
                            int samples = 64);

// ---------------------------------------------------------------------------

struct BartnikData {
  Mat S;               // antisymmetric S_ij
  Vec W;               // covector W_i = S_ij (-D chi_k)^j
  double div_W;        // FD covariant divergence of W
  double expected;     // U(b, V, L_zeta b, chi_k) + 2 T(zeta, -D chi_k)
  double residual;     // |div_W - expected|
};

BartnikData bartnik_field(const VectorField& zeta, const TestFunction& V,
                          const CutoffFamily& cutoffs, double k, const Point& p,
                          const FdConfig& fd = {});

// ---------------------------------------------------------------------------

struct CovarianceReport {
  double p_before = 0, p_after = 0, p_transformed = 0;
  double rel_gap = 0;  // |p_after - p_transformed| / max(1, |p_after|)
  ChargeResult after, transformed;
};

CovarianceReport verify_covariance(const MetricPerturbation& e, const ChartChange& phi,
                                   const TestFunction& V, const CutoffFamily& cutoffs,
                                   const SphereRule& rule, const ChargeOptions& opt = {});

struct MassCovarianceReport {
  Vec p_before, p_after, p_expected;  // p_expected = B p_before
  double max_gap = 0;                 // max_mu |after - expected| / scale
  double scale = 1;
};

MassCovarianceReport verify_mass_covariance(const MetricPerturbation& e,
                                            const ChartChange& phi,
                                            const CutoffFamily& cutoffs,
                                            const SphereRule& rule,
                                            const ChargeOptions& opt = {});

}  // namespace ahmass
