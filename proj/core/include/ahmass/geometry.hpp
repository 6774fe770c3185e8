#pragma once

// Models of hyperbolic space H^n (n >= 3): ball, upper half-space, upper unit
// hyperboloid in Minkowski R^{n,1}, and geodesic polar coordinates. Provides
// chart conversions, the conformal factor rho, exponential/logarithm maps,
// orthochronous Lorentz isometries with their action on the lapse space,
// lapse functions (solutions of Hess V = V b), the left-invariant orthonormal
// frame of the hyperboloid, and pullbacks of b along exp-of-vector-field maps.
//
// Conventions:
//  - Ball chart: x in R^n, |x| < 1, b = rho^{-2} delta, rho = (1-|x|^2)/2.
//  - HalfSpace chart: y in R^n, y^1 > 0, b = (y^1)^{-2} delta.
//  - Hyperboloid chart: X in R^{n+1}, eta(X,X) = -1, X^0 > 0,
//    eta = diag(-1, 1, ..., 1).
//  - Polar chart: a Point stores (r, theta) with theta a unit vector in R^n.
//    Tensor components "in the Polar chart" are taken with respect to the
//    geodesic normal coordinates z = r * theta, which form a genuine chart
//    away from the origin (and extend smoothly through it).

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <vector>

namespace ahmass {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Dimension {
  int n;
  explicit Dimension(int n_) : n(n_) {
    if (n < 3) throw std::invalid_argument("Dimension: n must be >= 3");
  }
};

enum class Chart { Ball, HalfSpace, Hyperboloid, Polar };

const char* chart_name(Chart c);

struct Point {
  Chart chart;
  Vec coords;  // Ball/HalfSpace: n entries; Hyperboloid: n+1; Polar: (r, theta[0..n-1])

  int dim() const;
};

// Factories validate the chart-specific domain constraints and throw
// std::domain_error on violation. Hyperboloid points with |eta(X,X)+1| drift
// above 1e-13 are renormalized; beyond 1e-6 they are rejected.
Point ball_point(const Vec& x);
Point half_space_point(const Vec& y);
Point hyperboloid_point(const Vec& X);
Point polar_point(double r, const Vec& theta);

// Minkowski product eta(X, Y) = -X^0 Y^0 + sum_i X^i Y^i.
double minkowski(const Vec& X, const Vec& Y);

// Conformal defining function; identical across charts.
double rho(const Point& p);

// Geodesic distance to the origin.
double radial_distance(const Point& p);

Point convert(const Point& p, Chart target);

// Normal coordinates z = r * theta of a Polar point, and back.
Vec polar_z(const Point& p);
Point polar_from_z(const Vec& z);

// ---------------------------------------------------------------------------
// Background geometry of b in an n-dimensional chart (Ball/HalfSpace/Polar).

struct ChartFrame {
  Mat b;                   // b_ij
  Mat b_inv;               // b^ij
  std::vector<Mat> gamma;  // gamma[k](i,j) = Gamma^k_{ij} of b
};

// Polar frames require r >= 0.02 (below, convert to Ball instead).
ChartFrame background(const Point& p);

// Jacobian d(target coords)/d(p's coords), n x n, for Ball/HalfSpace/Polar.
Mat chart_jacobian(const Point& p, Chart target);

// Component transforms between n-dimensional charts at the same geometric
// point. `jac` is d(new)/d(old) as returned by chart_jacobian.
Vec push_vector(const Mat& jac, const Vec& v);               // contravariant
Vec pull_covector(const Mat& jac, const Vec& w);             // w_new = jac^{-T} w_old
Mat pull_bilinear(const Mat& jac, const Mat& t);             // t_new = jac^{-T} t jac^{-1}

// Ambient derivative matrices between Ball and the hyperboloid embedding.
Mat ball_to_hyperboloid_jacobian(const Vec& x);              // (n+1) x n
Mat hyperboloid_to_ball_jacobian(const Vec& X);              // n x (n+1)

// ---------------------------------------------------------------------------
// Hyperboloid geometry.

struct TangentVector {
  Point base;      // Hyperboloid chart
  Vec components;  // n+1 ambient components, eta(components, base) = 0
};

TangentVector tangent(const Point& X, const Vec& xi);  // validates tangency (1e-9)
double tangent_norm(const TangentVector& xi);

double distance(const Point& X, const Point& Y);  // any charts

Point exp_map(const Point& X, const TangentVector& xi);
TangentVector log_map(const Point& X, const Point& Y);

// Series/closed-form scalars of the exponential map: c(t) = cosh(sqrt(t)),
// s(t) = sinh(sqrt(t))/sqrt(t), and the pullback coefficients
// q1(t) = (1 - s^2)/(4t), q2(t) = (1 - c s)/(2t), all analytic at t = 0.
double exp_c(double t);
double exp_s(double t);
double pullback_q1(double t);
double pullback_q2(double t);
// f(u) of the logarithm rewrite xi = f(u) (U - u X), u = eta(U,U)/2.
double log_f(double u);

// Left-invariant orthonormal frame (I^1, ..., I^n) at X.
std::vector<TangentVector> invariant_frame(const Point& X);

// ---------------------------------------------------------------------------
// Lorentz isometries.

struct LorentzMap {
  Mat matrix;        // B in O_up(n,1), (n+1) x (n+1)
  Mat lapse_action;  // A = B^T acting on lapse coefficient vectors
};

LorentzMap lorentz_identity(int n);
// Rotation in the (spatial) plane of axes i, j (1-based spatial indices).
LorentzMap lorentz_rotation(int n, int axis_i, int axis_j, double angle);
// Boost of given rapidity along spatial axis (1-based).
LorentzMap lorentz_boost(int n, int axis, double rapidity);
// Validates B^T eta B = eta to 1e-12 and B^0_0 > 0; rejects otherwise.
LorentzMap lorentz_from_matrix(const Mat& B);
LorentzMap compose(const LorentzMap& B1, const LorentzMap& B2);  // B1 * B2
LorentzMap inverse(const LorentzMap& B);

Point apply(const LorentzMap& B, const Point& p);  // result in p's chart

// ---------------------------------------------------------------------------
// Lapse functions V = sum_mu a_mu V^mu, the solutions of Hess V = V b.

struct LapseFunction {
  Vec coeffs;  // (a_0, ..., a_n)

  int n() const { return static_cast<int>(coeffs.size()) - 1; }
};

LapseFunction lapse_basis(int n, int mu);
LapseFunction act_lapse(const LorentzMap& B, const LapseFunction& V);  // V o B

struct LapseData {
  double value;
  Vec gradient;  // coordinate components of dV (covector)
  Mat hessian;   // covariant Hessian components (Hess V)_{ij}
};

double lapse_value(const LapseFunction& V, const Point& p);  // any chart
// Analytic value/gradient/Hessian in Ball, Polar and HalfSpace charts.
LapseData lapse_eval(const LapseFunction& V, const Point& p);

// ---------------------------------------------------------------------------
// Pullback of b along Phi_zeta(x) = exp_x(zeta(x)).

// A vector field given by its ambient components on the hyperboloid.
using AmbientField = std::function<Vec(const Point&)>;

struct PullbackOptions {
  double fd_step = 1e-5;
  double injectivity_guard = 5.0;  // |zeta| above this sets the warning flag
};

// Components of Phi_zeta^* b at p in p's chart (Ball or Polar).
Mat pullback_metric(const AmbientField& zeta, const Point& p,
                    const PullbackOptions& opts = {}, bool* warned = nullptr);
// Phi_zeta^* b - b, computed without forming b (stable for small zeta).
Mat pullback_difference(const AmbientField& zeta, const Point& p,
                        const PullbackOptions& opts = {}, bool* warned = nullptr);

}  // namespace ahmass
