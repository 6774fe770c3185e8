#include "ahmass/tensorcalc.hpp"

#include <doctest.h>

#include "ahmass/chartlab.hpp"
#include "test_util.hpp"

using namespace ahmass;
using namespace ahmass::testutil;

namespace {

// C^4 compactly supported radial bump on r in (center-1, center+1).
double bump(double r, double center) {
  const double t = r - center;
  if (std::abs(t) >= 1.0) return 0.0;
  const double u = 1.0 - t * t;
  return u * u * u * u * u;
}

// Smooth compactly supported perturbation in the ball chart.
MetricPerturbation bump_perturbation(int n, double center = 2.0, double amp = 0.05) {
  MetricPerturbation mp;
  mp.chart = Chart::Ball;
  mp.e = [n, center, amp](const Point& p) {
    const double r = radial_distance(p);
    const Vec& x = p.coords;
    Mat m = Mat::Zero(n, n);
    const double f = amp * bump(r, center);
    for (int i = 0; i < n; ++i) {
      m(i, i) = f * (1.0 + 0.3 * i);
      for (int j = 0; j < n; ++j) m(i, j) += 0.5 * f * x[i] * x[j];
    }
    return m;
  };
  return mp;
}

// Compactly supported smooth vector field; components in the chart of the
// point it is evaluated at.
std::function<Vec(const Point&)> bump_field(int n, double center = 2.0) {
  return [n, center](const Point& p) {
    const double r = radial_distance(p);
    const double rh = rho(p);
    Vec c(n);
    for (int i = 0; i < n; ++i) c[i] = 0.2 + 0.1 * i;
    const Vec v_ball = bump(r, center) * rh * c;
    if (p.chart == Chart::Ball) return v_ball;
    const Point pb = convert(p, Chart::Ball);
    return Vec(chart_jacobian(pb, p.chart) * v_ball);
  };
}

}  // namespace

TEST_CASE("inverse_correction") {
  const int n = 3;
  SUBCASE("e = 0 gives f = 0") {
    CHECK(inverse_correction(Mat(Mat::Zero(n, n))).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("diagonal perturbation") {
    Mat e = Mat::Zero(n, n);
    e(0, 0) = 0.25;
    const Mat f = inverse_correction(e);
    CHECK(f(0, 0) == doctest::Approx(-0.25 / 1.25).epsilon(1e-14));
    CHECK(std::abs(f(1, 1)) + std::abs(f(2, 2)) == 0.0);
  }
  SUBCASE("eqEF fixed point and norm bound") {
    auto g = rng(3);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int s = 0; s < 40; ++s) {
      Mat a = Mat::Random(n, n);
      Mat sym = 0.5 * (a + a.transpose());
      // scale eigenvalues into (-0.5, 0.5)
      Eigen::SelfAdjointEigenSolver<Mat> es(sym);
      const double scale = 0.49 / std::max(1e-12, es.eigenvalues().cwiseAbs().maxCoeff());
      Mat e = sym * scale * std::abs(u(g)) * 2.0;
      const Mat f = inverse_correction(e);
      // F = -E - E F as a matrix identity
      CHECK((f + e + e * f).cwiseAbs().maxCoeff() < 1e-13);
      // (I+E)(I+F) = I
      CHECK(((Mat::Identity(n, n) + e) * (Mat::Identity(n, n) + f) -
             Mat::Identity(n, n))
                .cwiseAbs()
                .maxCoeff() < 1e-13);
      CHECK(f.norm() <= 2.0 * e.norm() + 1e-12);
    }
  }
  SUBCASE("non positive definite input carries the eigenvalue") {
    Mat e = Mat::Zero(n, n);
    e(1, 1) = -1.5;
    try {
      inverse_correction(e);
      FAIL("expected NotPositiveDefinite");
    } catch (const NotPositiveDefinite& err) {
      CHECK(err.eigenvalue == doctest::Approx(-0.5));
    }
  }
}

TEST_CASE("covariant derivative basics") {
  const int n = 3;
  auto g = rng(5);
  SUBCASE("derivative of a constant vanishes") {
    const Point p = random_polar_point(g, n, 0.5, 4.0);
    const Vec d = cov_derivative_scalar([](const Point&) { return 1.0; }, p);
    CHECK(d.cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("D b = 0") {
    for (int s = 0; s < 10; ++s) {
      const Point p = (s % 2 == 0) ? random_polar_point(g, n, 0.5, 4.0)
                                   : random_ball_point(g, n, 0.5, 2.0);
      const ChartFrame f = background(p);
      const Tensor3 Db =
          cov_derivative_sym2([](const Point& q) { return background(q).b; }, p);
      for (int k = 0; k < n; ++k)
        CHECK(Db[k].cwiseAbs().maxCoeff() < 1e-6 * f.b.cwiseAbs().maxCoeff());
    }
  }
  SUBCASE("D applied to dV^0 gives Hess V^0 = V^0 b") {
    const LapseFunction V = lapse_basis(n, 0);
    for (int s = 0; s < 10; ++s) {
      const Point p = random_polar_point(g, n, 0.5, 4.0);
      const ChartFrame f = background(p);
      const Mat DdV = cov_derivative_covector(
          [&](const Point& q) { return lapse_eval(V, q).gradient; }, p);
      const Mat expect = lapse_value(V, p) * f.b;
      CHECK((DdV - expect).cwiseAbs().maxCoeff() < 1e-6 * expect.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("christoffel difference tensor") {
  const int n = 3;
  auto g = rng(9);
  SUBCASE("vanishes for e = 0") {
    const Tensor3 gam = christoffel(zero_perturbation(n), random_polar_point(g, n, 1, 4));
    for (int k = 0; k < n; ++k) CHECK(gam[k].cwiseAbs().maxCoeff() < 1e-12);
  }
  const MetricPerturbation mp = bump_perturbation(n);
  SUBCASE("symmetry in the lower indices") {
    for (int s = 0; s < 5; ++s) {
      const Point p = random_polar_point(g, n, 1.3, 2.7);
      const Tensor3 gam = christoffel(mp, p);
      for (int k = 0; k < n; ++k)
        CHECK((gam[k] - gam[k].transpose()).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SUBCASE("full connection annihilates g (FD oracle)") {
    for (int s = 0; s < 5; ++s) {
      const Point p = random_polar_point(g, n, 1.3, 2.7);
      const ChartFrame f = background(p);
      const Tensor3 gam = christoffel(mp, p);
      auto g_field = [&](const Point& q) {
        return Mat(background(q).b + perturbation_components(mp, q));
      };
      const Tensor3 Dg = cov_derivative_sym2(g_field, p);
      const Mat gm = g_field(p);
      for (int k = 0; k < n; ++k) {
        Mat nabla = Dg[k];
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l)
              nabla(i, j) -= gam[l](k, i) * gm(l, j) + gam[l](k, j) * gm(i, l);
        CHECK(nabla.cwiseAbs().maxCoeff() < 1e-5 * std::max(1.0, gm.cwiseAbs().maxCoeff()));
      }
    }
  }
}

TEST_CASE("scal_linear") {
  const int n = 3;
  auto g = rng(13);
  SUBCASE("zero for e = 0") {
    CHECK(std::abs(scal_linear(zero_perturbation(n), random_polar_point(g, n, 1, 4))) <
          1e-10);
  }
  SUBCASE("annihilates Lie derivatives of b (diffeo invariance)") {
    auto zeta = bump_field(n);
    MetricPerturbation lz;
    lz.chart = Chart::Ball;
    // three stacked FD levels: balance the steps so roundoff does not
    // dominate (eps/h from the inner level is divided by h^2 outside)
    const FdConfig inner{1e-3, true};
    lz.e = [&](const Point& q) { return lie_derivative_b(zeta, q, inner); };
    for (int s = 0; s < 4; ++s) {
      const Point p = random_polar_point(g, n, 1.3, 2.7);
      CHECK(std::abs(scal_linear(lz, p, FdConfig{1e-3, true})) < 1e-4);
    }
  }
  SUBCASE("conformal direction, term by term") {
    // e = V^0 b: tr e = n V^0, div div e = n V^0, Lap tr e = n^2 V^0,
    // so scal_linear = (n-1) n V^0 + n V^0 - n^2 V^0 = 0.
    MetricPerturbation conf;
    conf.chart = Chart::Ball;
    conf.e = [n](const Point& q) {
      return Mat(lapse_value(lapse_basis(n, 0), q) * background(q).b);
    };
    for (int s = 0; s < 4; ++s) {
      const Point p = random_polar_point(g, n, 0.8, 3.0);
      const double V0 = lapse_value(lapse_basis(n, 0), p);
      const Jet2 jet = perturbation_jet2(conf, p, FdConfig{});
      const ScalarContractions sc = scalar_contractions(jet, background(p));
      CHECK(sc.tr_e == doctest::Approx(n * V0).epsilon(1e-8));
      CHECK(sc.div_div_e == doctest::Approx(n * V0).epsilon(1e-4));
      CHECK(sc.lap_tr_e == doctest::Approx(n * n * V0).epsilon(1e-4));
      CHECK(std::abs(scal_linear(conf, p)) < 1e-4 * std::max(1.0, n * n * V0));
    }
  }
}

TEST_CASE("scal_exact") {
  const int n = 3;
  auto g = rng(17);
  SUBCASE("background value -n(n-1)") {
    for (int s = 0; s < 4; ++s) {
      const Point p = random_polar_point(g, n, 1.0, 5.0);
      CHECK(scal_exact(zero_perturbation(n), p) == doctest::Approx(-6.0).epsilon(1e-9));
    }
  }
  SUBCASE("Wang data decays at the stronger rate") {
    const MetricPerturbation e = make_wang_metric(n, BoundaryFunction::constant(1.0));
    // log-log slope of scal_exact + n(n-1) against rho over r in [4, 8]
    std::vector<double> lr, lv;
    const Vec th = random_direction(g, n);
    for (double r = 4.0; r <= 8.0 + 1e-9; r += 1.0) {
      const Point p = polar_point(r, th);
      const double v = std::abs(scal_exact(e, p) + n * (n - 1.0));
      lr.push_back(std::log(rho(p)));
      lv.push_back(std::log(v));
    }
    // least squares slope
    double mx = 0, my = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lr.size(); ++i) {
      mx += lr[i];
      my += lv[i];
    }
    mx /= lr.size();
    my /= lr.size();
    for (std::size_t i = 0; i < lr.size(); ++i) {
      sxx += (lr[i] - mx) * (lr[i] - mx);
      sxy += (lr[i] - mx) * (lv[i] - my);
    }
    CHECK(sxy / sxx >= n + 0.8);
  }
  SUBCASE("remainder is quadratic in the perturbation") {
    const MetricPerturbation e = bump_perturbation(n, 2.0, 0.2);
    const Point p = polar_point(2.2, random_direction(g, n));
    const double lin = scal_linear(e, p);
    std::vector<double> lt, lrem;
    for (double t : {1.0, 0.5, 0.25, 0.125}) {
      MetricPerturbation te;
      te.chart = e.chart;
      te.e = [&, t](const Point& q) { return Mat(t * e.e(q)); };
      const double rem = scal_exact(te, p) + n * (n - 1.0) - t * lin;
      lt.push_back(std::log(t));
      lrem.push_back(std::log(std::abs(rem)));
      CHECK(std::abs(rem) / (t * t) < 10.0 * std::abs(lin) + 1.0);  // bounded ratio
    }
    double mx = 0, my = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lt.size(); ++i) {
      mx += lt[i];
      my += lrem[i];
    }
    mx /= lt.size();
    my /= lt.size();
    for (std::size_t i = 0; i < lt.size(); ++i) {
      sxx += (lt[i] - mx) * (lt[i] - mx);
      sxy += (lt[i] - mx) * (lrem[i] - my);
    }
    CHECK(sxy / sxx >= 1.9);
  }
}

TEST_CASE("einstein_linear") {
  const int n = 3;
  auto g = rng(19);
  SUBCASE("zero for e = 0") {
    const Mat E = einstein_linear(zero_perturbation(n), random_polar_point(g, n, 1, 4));
    CHECK(E.cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("trace identity against scal_linear") {
    const MetricPerturbation mp = bump_perturbation(n);
    const MetricPerturbation wang =
        make_wang_metric(n, BoundaryFunction::harmonics((Vec(4) << 1, 0.5, 0, 0).finished()));
    int samples = 0;
    for (int s = 0; s < 50; ++s) {
      const bool use_wang = s % 2 == 0;
      const Point p = use_wang ? random_polar_point(g, n, 3.0, 7.0)
                               : random_polar_point(g, n, 1.2, 2.8);
      const MetricPerturbation& e = use_wang ? wang : mp;
      const ChartFrame f = background(p);
      const Mat E = einstein_linear(e, p);
      const double tr = (f.b_inv * E).trace();
      const double sl = scal_linear(e, p);
      CHECK(std::abs(tr + 0.5 * (n - 2.0) * sl) <
            1e-6 * std::max(1.0, std::abs(sl)));
      ++samples;
    }
    CHECK(samples == 50);
  }
  SUBCASE("linearized Bianchi: divergence vanishes") {
    const MetricPerturbation mp = bump_perturbation(n);
    for (int s = 0; s < 3; ++s) {
      const Point p = random_polar_point(g, n, 1.4, 2.6);
      const ChartFrame f = background(p);
      auto Efield = [&](const Point& q) { return einstein_linear(mp, q, FdConfig{}); };
      const Tensor3 DE = cov_derivative_sym2(Efield, p, FdConfig{1e-4, true});
      const Mat E = Efield(p);
      double scale = std::max(1e-8, E.cwiseAbs().maxCoeff());
      for (int j = 0; j < n; ++j) {
        double div = 0.0;
        for (int k = 0; k < n; ++k)
          for (int i = 0; i < n; ++i) div += f.b_inv(k, i) * DE[k](i, j);
        CHECK(std::abs(div) < 1e-3 * std::max(1.0, scale));
      }
    }
  }
}

TEST_CASE("lie_derivative_b") {
  const int n = 3;
  auto g = rng(23);
  SUBCASE("zero field") {
    const Mat L = lie_derivative_b([n](const Point&) { return Vec(Vec::Zero(n)); },
                                   random_polar_point(g, n, 1, 3));
    CHECK(L.cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("rotation Killing field") {
    // generator of a rotation in the (1,2) plane: ball components (-x2, x1, 0)
    auto killing = [n](const Point& p) {
      const Point q = convert(p, Chart::Ball);
      Vec v = Vec::Zero(n);
      v[0] = -q.coords[1];
      v[1] = q.coords[0];
      if (p.chart == Chart::Ball) return v;
      const Mat jac = chart_jacobian(q, p.chart);  // d(p.chart)/d(ball)
      return Vec(jac * v);
    };
    for (int s = 0; s < 6; ++s) {
      const Point p = random_ball_point(g, n, 0.5, 3.0);
      const ChartFrame f = background(p);
      const Mat L = lie_derivative_b(killing, p);
      CHECK(L.cwiseAbs().maxCoeff() < 1e-6 * f.b.cwiseAbs().maxCoeff());
    }
  }
  SUBCASE("gradient of V^0") {
    const LapseFunction V = lapse_basis(n, 0);
    for (int s = 0; s < 6; ++s) {
      const Point p = random_polar_point(g, n, 0.5, 3.0);
      const ChartFrame f = background(p);
      auto gradV = [&](const Point& q) {
        return Vec(background(q).b_inv * lapse_eval(V, q).gradient);
      };
      const Mat L = lie_derivative_b(gradV, p);
      const Mat expect = 2.0 * lapse_value(V, p) * f.b;
      CHECK((L - expect).cwiseAbs().maxCoeff() < 1e-6 * expect.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("conformal Killing fields") {
  const int n = 3;
  auto g = rng(29);
  SUBCASE("X^0 vanishes at the origin") {
    Vec tiny = Vec::Zero(n);
    tiny[0] = 1e-12;
    const ConformalKillingData d = conformal_killing(0, ball_point(tiny));
    CHECK(d.field.cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("divergence equals n V") {
    for (int s = 0; s < 50; ++s) {
      const Point p = random_polar_point(g, n, 0.5, 5.0);
      for (int mu = 0; mu <= n; ++mu) {
        const ConformalKillingData d = conformal_killing(mu, p);
        const double V = lapse_value(lapse_basis(n, mu), p);
        CHECK(d.divergence == doctest::Approx(n * V).epsilon(1e-10));
        // FD check of the divergence
        auto field = [&](const Point& q) { return conformal_killing(mu, q).field; };
        const Mat Dv = cov_derivative_vector(field, p);
        CHECK(Dv.trace() == doctest::Approx(n * V).epsilon(1e-6));
      }
    }
  }
  SUBCASE("rho-weighted norm is bounded") {
    for (double r = 1.0; r <= 10.0; r += 1.0) {
      const Point p = polar_point(r, random_direction(g, n));
      const ChartFrame f = background(p);
      for (int mu = 0; mu <= n; ++mu) {
        const ConformalKillingData d = conformal_killing(mu, p);
        const double norm = std::sqrt(d.field.dot(f.b * d.field));
        CHECK(norm * rho(p) < 2.0);
      }
    }
  }
}

TEST_CASE("FD agrees with exact derivative callbacks") {
  const int n = 3;
  auto g = rng(31);
  const MetricPerturbation wang =
      make_wang_metric(n, BoundaryFunction::harmonics((Vec(4) << 1, 0.5, -0.3, 0.2).finished()));
  MetricPerturbation wang_fd = wang;
  wang_fd.de = nullptr;  // force the FD path
  for (int s = 0; s < 6; ++s) {
    const Point p = random_polar_point(g, n, 2.0, 6.0);
    const Jet1 exact = perturbation_jet1(wang, p);
    const Jet1 numeric = perturbation_jet1(wang_fd, p);
    double scale = 0.0;
    for (int k = 0; k < n; ++k) scale = std::max(scale, exact.De[k].cwiseAbs().maxCoeff());
    for (int k = 0; k < n; ++k)
      CHECK((exact.De[k] - numeric.De[k]).cwiseAbs().maxCoeff() <
            1e-6 * std::max(1.0, scale));
  }
}

TEST_CASE("equivalence constant recording") {
  const int n = 3;
  auto g = rng(37);
  const MetricPerturbation e = make_wang_metric(n, BoundaryFunction::constant(1.0));
  std::vector<Point> pts;
  for (int s = 0; s < 20; ++s) pts.push_back(random_polar_point(g, n, 1.0, 8.0));
  const double C = record_equivalence_constant(e, pts);
  CHECK(C >= 1.0);
  CHECK(C < 2.0);  // Wang m = 1 is a small perturbation on r >= 1
}
