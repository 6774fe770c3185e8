#include "ahmass/eigenfunctions.hpp"

#include <doctest.h>

#include "test_util.hpp"

using namespace ahmass;
using namespace ahmass::testutil;

namespace {

// Brute-force radial quadrature of I_{n,beta} (tan substitution), independent
// of the Gamma closed form.
double brute_I(int n, double beta, int order = 200) {
  const Quad1D q = gauss_legendre(order, 0.0, 0.5 * M_PI);
  double acc = 0.0;
  for (int i = 0; i < order; ++i) {
    const double u = q.nodes[i];
    const double t = std::tan(u);
    acc += q.weights[i] * std::pow(t, n - 2) * std::pow(std::cos(u), 2.0 * beta - 2.0);
  }
  return sphere_area(n - 1) * acc;
}

// Brute-force 2D quadrature of J_{n,alpha,beta} via the axial reduction
// w = (w1, wtilde), |wtilde| = s.
double brute_J(int n, double alpha, double beta, int order = 200) {
  const Quad1D q = gauss_legendre(order, 0.0, 0.5 * M_PI);
  double acc = 0.0;
  for (int i = 0; i < order; ++i) {
    const double w1 = std::tan(q.nodes[i]);
    const double jw = 1.0 + w1 * w1;  // sec^2 du
    double inner = 0.0;
    for (int j = 0; j < order; ++j) {
      const double s = std::tan(q.nodes[j]);
      const double js = 1.0 + s * s;
      inner += q.weights[j] * std::pow(s, n - 3) * js *
               std::pow(1.0 + w1 * w1 + s * s, -beta);
    }
    acc += q.weights[i] * std::pow(w1, alpha) * jw * inner;
  }
  return 2.0 * sphere_area(n - 2) * acc;  // both signs of w1
}

Point interior_point(std::mt19937_64& g, int n, double r_lo, double r_hi) {
  return random_polar_point(g, n, r_lo, r_hi);
}

}  // namespace

TEST_CASE("integral_I closed form") {
  CHECK(integral_I(3, 3.0) == doctest::Approx(M_PI / 2.0).epsilon(1e-12));
  for (int n : {3, 4, 5}) {
    CHECK(integral_I(n, n + 1.0) / integral_I(n, double(n)) ==
          doctest::Approx((n + 1.0) / (2.0 * n)).epsilon(1e-12));
    CHECK(integral_I(n, n + 2.0) / integral_I(n, double(n)) ==
          doctest::Approx((n + 3.0) / (4.0 * n)).epsilon(1e-12));
    for (double beta : {double(n), n + 0.5, n + 2.0})
      CHECK(std::abs(integral_I(n, beta) - brute_I(n, beta)) < 1e-8);
  }
  CHECK_THROWS_AS(integral_I(3, 1.5), std::domain_error);
  CHECK_THROWS_AS(integral_I(4, 1.99), std::domain_error);
}

TEST_CASE("integral_J closed form") {
  // J_= for n = 3 equals pi/8
  const double Jeq3 = 4.0 * 3 * integral_J(3, 4, 5) - integral_J(3, 2, 3);
  CHECK(Jeq3 == doctest::Approx(M_PI / 8.0).epsilon(1e-12));
  for (int n : {3, 4, 5}) {
    const double vanish = 4.0 * n * (integral_J(n, 2, n + 1) - integral_J(n, 2, n + 2)) -
                          (n - 1.0) * integral_J(n, 2, n);
    CHECK(std::abs(vanish) < 1e-12);
    // closed form J_= matches the Gamma expression of the paper-level value
    const double Jeq = 4.0 * n * integral_J(n, 4, n + 2) - integral_J(n, 2, n);
    const double expect = std::pow(M_PI, 0.5 * (n - 1)) *
                          std::tgamma(0.5 * (n - 1)) / std::tgamma(double(n)) *
                          (n - 2.0) / (n + 1.0);
    CHECK(Jeq == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK(std::abs(integral_J(3, 2, 3) - brute_J(3, 2, 3)) < 1e-8);
  CHECK(std::abs(integral_J(4, 2, 4) - brute_J(4, 2, 4)) < 1e-8);
  CHECK(std::abs(integral_J(5, 4, 7) - brute_J(5, 4, 7)) < 1e-8);
  CHECK_THROWS_AS(integral_J(3, 2, 0.4), std::domain_error);
  CHECK_THROWS_AS(integral_J(3, -1.0, 3), std::domain_error);
  CHECK_THROWS_AS(integral_J(3, 5.0, 3), std::domain_error);  // alpha >= 2b - n + 1
}

TEST_CASE("boundary density") {
  const int n = 3;
  const Vec zero2 = Vec::Zero(2);
  CHECK(boundary_density(n, BoundaryFunction::constant(1.0), zero2) ==
        doctest::Approx(1.0 / M_PI).epsilon(1e-12));
  // the stereographic argument at ybar = 0 is (1, 0, 0)
  auto x1 = BoundaryFunction::callback([](const Vec& u) { return u[0]; });
  CHECK(boundary_density(n, x1, zero2) == doctest::Approx(1.0 / M_PI).epsilon(1e-12));
  auto x2 = BoundaryFunction::callback([](const Vec& u) { return u[1]; });
  CHECK(std::abs(boundary_density(n, x2, zero2)) < 1e-14);
  // v(ybar)/(1+|ybar|^2) stays within the sup bound
  auto g = rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int s = 0; s < 30; ++s) {
    Vec y(2);
    y << u(g), u(g);
    const double v = boundary_density(n, x1, y);
    CHECK(std::abs(v) / (1.0 + y.squaredNorm()) <= 1.0 / (2.0 * integral_I(n, n)) + 1e-12);
  }
}

TEST_CASE("eigenfunction solve reproduces lapse functions") {
  const int n = 3;
  auto g = rng(7);

  SUBCASE("v0 = 1 gives V^0") {
    Eigenfunction V(n, BoundaryFunction::constant(1.0));
    for (int s = 0; s < 20; ++s) {
      const Point p = interior_point(g, n, 0.3, 4.0);
      const double expect = lapse_value(lapse_basis(n, 0), p);
      CHECK(std::abs(V.value(p) - expect) < 1e-6 * std::abs(expect));
    }
  }
  SUBCASE("v0 = x^i gives V^i, with gradients") {
    for (int i = 1; i <= n; ++i) {
      Vec c = Vec::Zero(4);
      c[i] = 1.0;
      Eigenfunction V(n, BoundaryFunction::harmonics(c));
      const LapseFunction L = lapse_basis(n, i);
      for (int s = 0; s < 7; ++s) {
        const Point p = interior_point(g, n, 0.3, 4.0);
        const auto [val, grad] = V.value_gradient(p);
        const LapseData ld = lapse_eval(L, p);
        CHECK(std::abs(val - ld.value) < 1e-6 * std::max(1.0, std::abs(ld.value)));
        CHECK((grad - ld.gradient).cwiseAbs().maxCoeff() <
              1e-5 * std::max(1.0, ld.gradient.cwiseAbs().maxCoeff()));
      }
    }
  }
  SUBCASE("positivity for nonnegative boundary data") {
    Eigenfunction V(n, BoundaryFunction::harmonics((Vec(4) << 1, 0, 0, 0.9).finished()));
    for (int s = 0; s < 25; ++s) {
      CHECK(V.value(interior_point(g, n, 0.2, 5.0)) > 0.0);
    }
  }
  SUBCASE("linearity in the boundary data") {
    Eigenfunction Va(n, BoundaryFunction::harmonics((Vec(4) << 1, 0, 0, 0).finished()));
    Eigenfunction Vb(n, BoundaryFunction::harmonics((Vec(4) << 0, 0.5, -0.25, 0).finished()));
    Eigenfunction Vab(n, BoundaryFunction::harmonics((Vec(4) << 1, 0.5, -0.25, 0).finished()));
    for (int s = 0; s < 10; ++s) {
      const Point p = interior_point(g, n, 0.3, 4.0);
      const double lhs = Vab.value(p);
      const double rhs = Va.value(p) + Vb.value(p);
      CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(lhs)));
    }
  }
  SUBCASE("maximum principle bound on a grid") {
    const Vec c = (Vec(9) << 0.3, 0.2, -0.4, 0.1, 0.5, 0, -0.3, 0.2, 0.1).finished();
    const BoundaryFunction v0 = BoundaryFunction::harmonics(c);
    Eigenfunction V(n, v0);
    double sup_v0 = 0.0;
    for (int s = 0; s < 400; ++s) sup_v0 = std::max(sup_v0, std::abs(v0(random_direction(g, n))));
    for (int s = 0; s < 40; ++s) {
      const Point p = interior_point(g, n, 0.2, 6.0);
      const double rhoV0 = rho(p) * lapse_value(lapse_basis(n, 0), p);
      CHECK(std::abs(rho(p) * V.value(p)) <= sup_v0 * rhoV0 * (1.0 + 1e-6));
    }
  }
}

TEST_CASE("eigen-equation FD residual") {
  const int n = 3;
  auto g = rng(11);
  const Vec c = (Vec(9) << 0.5, 0.3, 0, -0.2, 0.4, 0, 0, 0.25, -0.15).finished();
  Eigenfunction V(n, BoundaryFunction::harmonics(c));
  auto f = [&](const Point& q) { return V.value(q); };
  for (double r : {1.0, 2.0, 3.5, 5.0, 6.0}) {
    const Point p = polar_point(r, random_direction(g, n));
    const double lap = fd_laplacian(f, p, 1e-3);
    const double val = V.value(p);
    CHECK(std::abs(lap - n * val) <= 1e-4 * std::max(1.0, std::abs(val)));
  }
}

TEST_CASE("kernel normalization and self-convergence") {
  const int n = 3;
  // int (1+|w|^2)^{-n} dw equals I_{n,n}: evaluate V for the boundary data
  // that makes the plane density exactly 1 (v0 = stereographic weight).
  auto v0 = BoundaryFunction::callback([n](const Vec& u) {
    // v(z) = (1+|z|^2)/(2 I) * v0(image) == 1 iff v0(image) = 2I/(1+|z|^2);
    // on the sphere, 1/(1+|z|^2) = (1+u[0])/2 under the stereographic map.
    return integral_I(n, n) * (1.0 + u[0]);
  });
  Eigenfunction V(n, v0);
  // with v == 1, V(y) = I_{n,n}/y^1 exactly
  Vec y = Vec::Zero(n);
  y[0] = 1.7;
  const Point p = half_space_point(y);
  CHECK(std::abs(V.value(p) * 1.7 - integral_I(n, n)) < 1e-9);

  auto g = rng(13);
  std::vector<Point> pts;
  for (int s = 0; s < 5; ++s) pts.push_back(interior_point(g, n, 0.5, 5.0));
  Eigenfunction W(n, BoundaryFunction::harmonics((Vec(9) << 0.3, 0.2, -0.4, 0.1, 0.5, 0, -0.3, 0.2, 0.1).finished()));
  CHECK(W.self_convergence_error(pts) < 1e-8);
  CHECK_NOTHROW(W.require_converged(pts));
}

TEST_CASE("hessian deficit kernel") {
  const int n = 3;
  auto g = rng(17);

  SUBCASE("vanishes for lapse boundary data") {
    for (int mu = 0; mu <= n; ++mu) {
      Vec c = Vec::Zero(4);
      c[mu == 0 ? 0 : mu] = 1.0;
      Eigenfunction V(n, BoundaryFunction::harmonics(c));
      Vec y(n);
      y << 0.9, 0.3, -0.4;
      const Mat T = V.hessian_deficit_kernel(half_space_point(y));
      CHECK(T.cwiseAbs().maxCoeff() < 1e-8);
    }
  }

  const Vec c = (Vec(9) << 0, 0, 0, 0, 1.0, 0, 0, 0.6, -0.4).finished();  // pure l=2
  Eigenfunction V(n, BoundaryFunction::harmonics(c));

  SUBCASE("cross-check against the FD Hessian of solve") {
    for (int s = 0; s < 3; ++s) {
      Vec y(n);
      y << 0.6 + 0.3 * s, 0.25 * s - 0.2, 0.1;
      const Point p = half_space_point(y);
      const Mat T = V.hessian_deficit_kernel(p);
      auto f = [&](const Point& q) { return V.value(q); };
      const Mat hess = fd_hessian(f, p, 1e-3 * y[0]);
      const ChartFrame fr = background(p);
      const Mat T_fd = hess - V.value(p) * fr.b;
      CHECK((T - T_fd).cwiseAbs().maxCoeff() <
            1e-4 * std::max(1.0, T.cwiseAbs().maxCoeff()));
    }
  }

  SUBCASE("rho-weighted norm bounded along a radial ray") {
    const Vec th = random_direction(g, n);
    double worst = 0.0;
    for (double r = 3.0; r <= 7.0 + 1e-9; r += 0.5) {
      const Point p = polar_point(r, th);
      const Point y = convert(p, Chart::HalfSpace);
      const Mat T = V.hessian_deficit_kernel(y);
      const double y1 = y.coords[0];
      const double norm_b = y1 * y1 * T.norm();  // |T|_b with b = delta / (y^1)^2
      worst = std::max(worst, norm_b / rho(p));
    }
    CHECK(worst < 20.0);
  }
}

TEST_CASE("asymptotic deficit") {
  const int n = 3;
  CHECK(asymptotic_deficit_prefactor(3) == doctest::Approx(M_PI / 4.0).epsilon(1e-14));

  SUBCASE("lapse data gives zero") {
    Vec y0(2);
    y0 << 0.4, -0.3;
    for (int mu = 0; mu <= n; ++mu) {
      Vec c = Vec::Zero(4);
      c[mu] = 1.0;
      const Mat A = asymptotic_deficit(n, BoundaryFunction::harmonics(c), y0);
      CHECK(A.cwiseAbs().maxCoeff() < 1e-6);
    }
  }

  SUBCASE("kernel limit recovers the leading coefficient") {
    const Vec c = (Vec(9) << 0, 0, 0, 0, 1.0, 0, 0.5, 0, -0.7).finished();
    const BoundaryFunction v0 = BoundaryFunction::harmonics(c);
    Eigenfunction V(n, v0, KernelQuadratureSpec{96, 24});
    Vec y0(2);
    y0 << 0.3, -0.2;
    const Mat A = asymptotic_deficit(n, v0, y0);
    // Richardson in y^1 on y^1 * T_tangential
    auto sample = [&](double y1) {
      Vec y(n);
      y[0] = y1;
      y.tail(2) = y0;
      const Mat T = V.hessian_deficit_kernel(half_space_point(y));
      return Mat(y1 * T.bottomRightCorner(n - 1, n - 1));
    };
    const Mat s1 = sample(0.1), s2 = sample(0.05), s3 = sample(0.025);
    const Mat rich = 2.0 * s3 - s2;  // kills the O(y^1) correction
    CHECK((rich - A).cwiseAbs().maxCoeff() < 0.02 * A.cwiseAbs().maxCoeff());
    // plain samples converge monotonically towards A
    CHECK((s2 - A).cwiseAbs().maxCoeff() < (s1 - A).cwiseAbs().maxCoeff());
    // (1,1) and (1,i) leading terms vanish at order 1/y^1
    Vec y(n);
    y[0] = 0.025;
    y.tail(2) = y0;
    const Mat T = V.hessian_deficit_kernel(half_space_point(y));
    CHECK(std::abs(0.025 * T(0, 0)) < 0.05 * A.cwiseAbs().maxCoeff());
    CHECK(std::abs(0.025 * T(0, 1)) < 0.05 * A.cwiseAbs().maxCoeff());
  }
}
