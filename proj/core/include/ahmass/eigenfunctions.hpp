#pragma once

// The asymptotic Dirichlet problem  Delta V = n V  solved by the explicit
// half-space Poisson kernel, the Gamma/Beta integral closed forms it rests
// on, and the Hessian-deficit kernels of the solution.
//
// Half-space conventions: y = (y^1, ybar), the kernel acts by
//   V(y) = (1/y^1) int v(ybar + y^1 w) (1 + |w|^2)^{-n} dw  over R^{n-1},
// where v is the plane density induced by the boundary data v0 on S_1(0).

#include "ahmass/geometry.hpp"
#include "ahmass/quadrature.hpp"

#include <functional>
#include <memory>

namespace ahmass {

// I_{n,beta} = int_{R^{n-1}} (1+|w|^2)^{-beta} dw; requires beta > n/2.
double integral_I(int n, double beta);
// J_{n,alpha,beta} = int_{R^{n-1}} |w^1|^alpha (1+|w|^2)^{-beta} dw;
// requires beta > (n-2)/2 and alpha in (-1, 2 beta - n + 1).
double integral_J(int n, double alpha, double beta);

// Boundary data on the sphere at infinity.
class BoundaryFunction {
 public:
  static BoundaryFunction constant(double c);
  static BoundaryFunction callback(std::function<double(const Vec&)> f);
  // Real spherical harmonics up to degree 2 for n = 3. Coefficients order:
  // {1; u1, u2, u3; u1 u2, u1 u3, u2 u3, u1^2 - u2^2, 3 u3^2 - 1}.
  static BoundaryFunction harmonics(const Vec& coeffs);

  double operator()(const Vec& unit) const;
  bool has_gradient() const;      // analytic gradient available
  Vec ambient_gradient(const Vec& unit) const;  // gradient of the extension
  Vec tangential_gradient(const Vec& unit) const;

 private:
  enum class Kind { Constant, Callback, Harmonics } kind_ = Kind::Constant;
  double c_ = 0.0;
  std::function<double(const Vec&)> f_;
  Vec coeffs_;
};

struct KernelQuadratureSpec {
  int radial_order = 64;   // Gauss nodes in u after |w| = tan(u)
  int angular_order = 16;  // product-rule order on S^{n-2}
};

// Plane density v(ybar) = (1+|ybar|^2)/(2 I_{n,n}) v0(stereographic image).
double boundary_density(int n, const BoundaryFunction& v0, const Vec& ybar);

// Leading coefficient of y^1 (Hess V - V b)_{ij} (tangential block) at the
// boundary point over ybar; vanishes identically for lapse boundary data.
Mat asymptotic_deficit(int n, const BoundaryFunction& v0, const Vec& ybar);
double asymptotic_deficit_prefactor(int n);

// A solution handle for Delta V = n V with rho V -> v0 at the boundary.
class Eigenfunction {
 public:
  Eigenfunction(int n, BoundaryFunction v0, KernelQuadratureSpec spec = {});

  int n() const { return n_; }
  const BoundaryFunction& boundary() const { return v0_; }
  const KernelQuadratureSpec& quadrature() const { return spec_; }

  double value(const Point& p) const;
  // Value and the covector dV in p's chart components.
  std::pair<double, Vec> value_gradient(const Point& p) const;
  // Hess V - V b, half-space coordinate components; p must be HalfSpace.
  Mat hessian_deficit_kernel(const Point& p) const;
  // Same tensor, transformed to p's chart.
  Mat hessian_deficit_at(const Point& p) const;

  // Max |V_spec - V_doubled| / max(1, |V|) over the given points; the
  // documented self-convergence diagnostic. Throws std::runtime_error from
  // require_converged if above tol.
  double self_convergence_error(const std::vector<Point>& pts) const;
  void require_converged(const std::vector<Point>& pts, double tol = 1e-8) const;

 private:
  int n_;
  BoundaryFunction v0_;
  KernelQuadratureSpec spec_;
  Quad1D radial_;
  SphereRule angular_;

  struct Moments;
  Moments moments(double y1, const Vec& ybar) const;
  friend struct EigenfunctionTestAccess;
};

}  // namespace ahmass
