#pragma once

// Tensor fields on H^n, covariant differentiation with respect to the
// background metric b, and the perturbative expansion of the scalar curvature
// and the modified Einstein tensor around b.
//
// All indices are raised and lowered with b unless an operation says
// otherwise. Rank-3 objects T[k](i,j) carry the derivative index first:
// De[k](i,j) = (D_k e)_{ij}. Rank-4: DDe[a][b](i,j) = (D_a D_b e)_{ij}.

#include "ahmass/geometry.hpp"

#include <functional>
#include <optional>
#include <string>

namespace ahmass {

using Tensor3 = std::vector<Mat>;
using Tensor4 = std::vector<std::vector<Mat>>;

struct FdConfig {
  double step = 1e-5;      // scaled by max(1, |coords|) at the point
  bool richardson = true;  // Richardson-extrapolated central differences
};

// A vector field by its contravariant components in a fixed chart.
struct VectorField {
  Chart chart = Chart::Ball;
  std::function<Vec(const Point&)> v;
};

// The field x -> e(x): a symmetric 2-tensor in a declared chart, with decay
// metadata and optional exact first coordinate derivatives.
struct MetricPerturbation {
  Chart chart = Chart::Ball;
  std::function<Mat(const Point&)> e;
  // optional: de(p)[k](i,j) = partial_k e_ij (plain coordinate partials)
  std::function<Tensor3(const Point&)> de;
  double decay_order = 0.0;   // tau
  bool wang = false;
  double inner_radius = 0.0;  // field valid for r >= inner_radius
  double equivalence_constant = 1.0;  // recorded C with C^{-1} b <= g <= C b
};

MetricPerturbation zero_perturbation(int n);

// Components of e at p, in p's chart.
Mat perturbation_components(const MetricPerturbation& mp, const Point& p);

struct Jet1 {
  Mat e;
  Tensor3 De;  // covariant
};
struct Jet2 {
  Mat e;
  Tensor3 De;
  Tensor4 DDe;
};

// Jets in p's chart. FD happens in p's chart coordinates, so call these with
// Polar points at large radius (Ball coordinates crowd against the boundary).
Jet1 perturbation_jet1(const MetricPerturbation& mp, const Point& p, const FdConfig& fd = {});
Jet2 perturbation_jet2(const MetricPerturbation& mp, const Point& p, const FdConfig& fd = {});

// Empirical uniform-equivalence constant over sample points.
double record_equivalence_constant(const MetricPerturbation& mp,
                                   const std::vector<Point>& samples);

// ---------------------------------------------------------------------------
// Generic covariant differentiation (FD backed).

struct NotPositiveDefinite : std::runtime_error {
  double eigenvalue;
  explicit NotPositiveDefinite(double ev)
      : std::runtime_error("metric b + e is not positive definite (eigenvalue " +
                           std::to_string(ev) + ")"),
        eigenvalue(ev) {}
};

// Coordinate shift of a point along direction i of its own chart (Polar
// shifts the normal coordinates z = r theta).
Point shift_point(const Point& p, int i, double dt);
double fd_scale(const Point& p);

Vec fd_partials(const std::function<double(const Point&)>& f, const Point& p,
                const FdConfig& fd = {});
// D_k f = partial_k f for scalars; result[k].
Vec cov_derivative_scalar(const std::function<double(const Point&)>& f,
                          const Point& p, const FdConfig& fd = {});
// result(k, i) = D_k w_i for a covector field w.
Mat cov_derivative_covector(const std::function<Vec(const Point&)>& w,
                            const Point& p, const FdConfig& fd = {});
// result(k, i) = D_k v^i for a vector field v given in p's chart.
Mat cov_derivative_vector(const std::function<Vec(const Point&)>& v,
                          const Point& p, const FdConfig& fd = {});
// result[k](i,j) = D_k T_ij for a symmetric covariant 2-tensor field.
Tensor3 cov_derivative_sym2(const std::function<Mat(const Point&)>& T,
                            const Point& p, const FdConfig& fd = {});

// ---------------------------------------------------------------------------
// Operations of the perturbative expansion.

// f with g^{-1} = b^{-1} + f, exact dense inverse. The one-argument form
// takes b-orthonormal components (b = I).
Mat inverse_correction(const Mat& e);
Mat inverse_correction(const Mat& e, const Mat& b);

// Difference tensor Gamma^k_{ij} between the Levi-Civita connections of
// g = b + e and b; returns Gamma[k](i,j).
Tensor3 christoffel(const MetricPerturbation& mp, const Point& p, const FdConfig& fd = {});

double scal_linear(const MetricPerturbation& mp, const Point& p, const FdConfig& fd = {});
double scal_exact(const MetricPerturbation& mp, const Point& p, const FdConfig& fd = {});
Mat einstein_linear(const MetricPerturbation& mp, const Point& p, const FdConfig& fd = {});

// Exact and linearized scalar curvature from one shared jet, so their
// difference (the quadratic remainder) is free of independent FD noise.
struct ScalPair {
  double exact = 0, linear = 0;
};
ScalPair scal_both(const MetricPerturbation& mp, const Point& p, const FdConfig& fd = {});

// Shared contractions (same index patterns everywhere, so the algebraic
// trace identity between einstein_linear and scal_linear is exact).
struct ScalarContractions {
  double tr_e = 0, div_div_e = 0, lap_tr_e = 0;
};
ScalarContractions scalar_contractions(const Jet2& jet, const ChartFrame& frame);

// (L_zeta b)_ij at p; zeta given in p's chart components.
Mat lie_derivative_b(const std::function<Vec(const Point&)>& zeta, const Point& p,
                     const FdConfig& fd = {});

struct ConformalKillingData {
  Vec field;                  // X^mu components in p's chart
  Mat covariant_derivative;   // D_k X^i = V delta (exact)
  double divergence;          // n V^mu
};
ConformalKillingData conformal_killing(int mu, const Point& p);

}  // namespace ahmass
