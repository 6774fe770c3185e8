#include "ahmass/chartlab.hpp"

#include <cmath>
#include <random>

namespace ahmass {

namespace {

Mat wang_ebar(int n, const BoundaryFunction& m, const Vec& xhat) {
  const Mat pi = Mat::Identity(n, n) - xhat * xhat.transpose();
  return Mat((m(xhat) / (n - 1.0)) * pi);
}

}  // namespace

MetricPerturbation make_wang_metric(int n, const BoundaryFunction& m,
                                    double inner_radius) {
  MetricPerturbation mp;
  mp.chart = Chart::Ball;
  mp.wang = true;
  mp.decay_order = n;
  mp.inner_radius = inner_radius;
  mp.e = [n, m](const Point& p) {
    const Vec& x = p.coords;
    const double a = x.norm();
    if (a == 0.0) return Mat(Mat::Zero(n, n));
    const double rh = 0.5 * (1.0 - a * a);
    return Mat(std::pow(rh, n - 2) * wang_ebar(n, m, Vec(x / a)));
  };
  if (m.has_gradient()) {
    mp.de = [n, m](const Point& p) {
      const Vec& x = p.coords;
      const double a = x.norm();
      const Vec xhat = x / a;
      const double rh = 0.5 * (1.0 - a * a);
      const double rp = std::pow(rh, n - 2);
      const Mat pi = Mat::Identity(n, n) - xhat * xhat.transpose();
      const double mv = m(xhat);
      const Vec tg = m.tangential_gradient(xhat);
      Tensor3 de(n, Mat::Zero(n, n));
      for (int k = 0; k < n; ++k) {
        // d_k rho^{n-2} = -(n-2) rho^{n-3} x_k
        const double drho = -(n - 2.0) * std::pow(rh, n - 3) * x[k];
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const double dpi = -((((i == k) ? 1.0 : 0.0) - xhat[i] * xhat[k]) * xhat[j] +
                                 xhat[i] * (((j == k) ? 1.0 : 0.0) - xhat[j] * xhat[k])) /
                               a;
            double v = drho * (mv / (n - 1.0)) * pi(i, j);
            v += rp * (tg[k] / a) * pi(i, j) / (n - 1.0);
            v += rp * (mv / (n - 1.0)) * dpi;
            de[k](i, j) = v;
          }
      }
      return de;
    };
  }
  return mp;
}

// ---------------------------------------------------------------------------
// Static spherically symmetric benchmark.
//
// Radial-area coordinates: g = dt^2-free spatial slice
//   g = dw^2 / (1 + w^2 - 2 m0 w^{2-n}) + w^2 sigma,   b = dw^2/(1+w^2) + w^2 sigma.
// Reparametrize w = w(r) with dr = dw / sqrt(1 + w^2 - 2 m0 w^{2-n}) and the
// normalization r(w) - arcsinh(w) -> 0, so g = dr^2 + w(r)^2 sigma and
// e = (w(r)^2 - sinh^2 r) sigma is transversal over b = dr^2 + sinh^2 r sigma.

namespace {

struct KottlerModel {
  int n;
  double m0;

  double radicand(double t) const { return 1.0 + t * t - 2.0 * m0 * std::pow(t, 2 - n); }

  // g0(t) - gm(t) = (1+t^2)^{-1/2} - radicand^{-1/2}, in cancellation-free form.
  double g_diff(double t) const {
    const double A = 1.0 + t * t;
    const double B = radicand(t);
    if (B <= 0.0) throw std::runtime_error("kottler: horizon inside the working region");
    const double sA = std::sqrt(A), sB = std::sqrt(B);
    return -2.0 * m0 * std::pow(t, 2 - n) / (sA * sB * (sA + sB));
  }

  // D(t0) = int_{t0}^infty g_diff(t) dt  (negative for m0 > 0).
  double tail(double t0) const {
    static const Quad1D q = gauss_legendre(48, 0.0, 1.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      const double u = q.nodes[i];
      if (u == 0.0) continue;
      const double t = t0 / u;
      acc += q.weights[i] * g_diff(t) * t0 / (u * u);
    }
    return acc;
  }

  // arcsinh(s + d) - arcsinh(s), cancellation-free in d.
  static double asinh_diff(double s, double d) {
    const double a = std::sqrt(1.0 + s * s);
    const double b = std::sqrt(1.0 + (s + d) * (s + d));
    return std::log1p((d + (2.0 * s * d + d * d) / (a + b)) / (s + a));
  }

  // Offset d(r) = w(r) - sinh(r), solved directly for conditioning.
  double offset(double r) const {
    const double s = std::sinh(r);
    double d = -tail(s) * std::sqrt(std::max(1e-300, radicand(s)));
    for (int it = 0; it < 30; ++it) {
      const double F = asinh_diff(s, d) + tail(s + d);
      const double Fp = 1.0 / std::sqrt(radicand(s + d));
      const double step = F / Fp;
      d -= step;
      if (std::abs(step) < 1e-14 * (1.0 + std::abs(d))) return d;
    }
    throw std::runtime_error("kottler: radial reparametrization did not converge");
  }

  // psi(r) = (w^2 - sinh^2 r)/sinh^2 r and its r-derivative.
  void psi(double r, double& value, double& deriv) const {
    const double s = std::sinh(r), c = std::cosh(r);
    const double d = offset(r);
    const double w = s + d;
    value = d * (w + s) / (s * s);
    // w'(r) = sqrt(radicand(w)) = c sqrt(1 + eps), stable via eps.
    const double eps = (2.0 * s * d + d * d - 2.0 * m0 * std::pow(w, 2 - n)) / (c * c);
    const double wp = c * std::sqrt(1.0 + eps);
    const double dp = c * (eps / (std::sqrt(1.0 + eps) + 1.0));  // w' - cosh
    deriv = (dp * (w + s) + d * (wp + c)) / (s * s) - 2.0 * value * c / s;
  }
};

}  // namespace

MetricPerturbation make_kottler(int n, double m0, double inner_radius) {
  if (m0 < 0.0) throw std::invalid_argument("make_kottler: m0 >= 0");
  auto model = std::make_shared<KottlerModel>(KottlerModel{n, m0});
  // Fail fast if the horizon intrudes.
  if (m0 > 0.0) {
    const double s0 = std::sinh(std::max(0.25, inner_radius - 0.25));
    if (model->radicand(s0) <= 0.0)
      throw std::runtime_error("kottler: horizon inside the working region");
    model->offset(std::max(0.5, inner_radius));
  }

  MetricPerturbation mp;
  mp.chart = Chart::Ball;
  mp.wang = false;
  mp.decay_order = n;
  mp.inner_radius = inner_radius;
  mp.e = [n, m0, model](const Point& p) {
    if (m0 == 0.0) return Mat(Mat::Zero(n, n));
    const Vec& x = p.coords;
    const double a = x.norm();
    const double r = std::log1p(2.0 * a / (1.0 - a));
    const double rh = 0.5 * (1.0 - a * a);
    double ps, psd;
    model->psi(r, ps, psd);
    const Vec xhat = x / a;
    const Mat pi = Mat::Identity(n, n) - xhat * xhat.transpose();
    return Mat((ps / (rh * rh)) * pi);
  };
  mp.de = [n, m0, model](const Point& p) {
    Tensor3 de(n, Mat::Zero(n, n));
    if (m0 == 0.0) return de;
    const Vec& x = p.coords;
    const double a = x.norm();
    const double r = std::log1p(2.0 * a / (1.0 - a));
    const double rh = 0.5 * (1.0 - a * a);
    double ps, psd;
    model->psi(r, ps, psd);
    const Vec xhat = x / a;
    const Mat pi = Mat::Identity(n, n) - xhat * xhat.transpose();
    for (int k = 0; k < n; ++k) {
      const double dr_k = xhat[k] / rh;
      const double dinvrho2 = 2.0 * x[k] / (rh * rh * rh);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double dpi = -((((i == k) ? 1.0 : 0.0) - xhat[i] * xhat[k]) * xhat[j] +
                               xhat[i] * (((j == k) ? 1.0 : 0.0) - xhat[j] * xhat[k])) /
                             a;
          de[k](i, j) = psd * dr_k * pi(i, j) / (rh * rh) + ps * dinvrho2 * pi(i, j) +
                        (ps / (rh * rh)) * dpi;
        }
    }
    return de;
  };
  return mp;
}

double kottler_recovered_aspect(const MetricPerturbation& e, double r, const Vec& theta) {
  const int n = static_cast<int>(theta.size());
  const Point p = polar_point(r, theta);
  const ChartFrame f = background(p);
  const Mat ec = perturbation_components(e, p);
  // m = (n-1)tr_b(e) rho^{-n} for transversal spherical data
  double tr = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) tr += f.b_inv(i, j) * ec(i, j);
  return tr / std::pow(rho(p), n);
}

// ---------------------------------------------------------------------------

ChartChange isometry_change(const LorentzMap& B) {
  ChartChange c;
  c.B = B;
  c.zeta = VectorField{Chart::Ball, nullptr};
  return c;
}

ChartChange gauge_change(int n, const VectorField& zeta, double decay) {
  ChartChange c;
  c.B = lorentz_identity(n);
  c.zeta = zeta;
  c.decay = decay;
  return c;
}

namespace {

// C^2 ramp: 0 below r0, 1 above r0 + 1.
double ramp(double r, double r0) {
  const double t = r - r0;
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

VectorField profiled_field(int n, double amplitude, double tau, double r0,
                           std::function<Vec(const Vec&, double)> direction) {
  VectorField f;
  f.chart = Chart::Ball;
  f.v = [n, amplitude, tau, r0, direction](const Point& p) {
    const Vec& x = p.coords;
    const double a = x.norm();
    if (a == 0.0) return Vec(Vec::Zero(n));
    const double r = std::log1p(2.0 * a / (1.0 - a));
    const double rh = 0.5 * (1.0 - a * a);
    const double amp = amplitude * std::exp(-tau * r) * ramp(r, r0);
    // rho * (unit euclidean direction) has unit b-norm
    return Vec(amp * rh * direction(Vec(x / a), a));
  };
  return f;
}

}  // namespace

VectorField gauge_field_radial(int n, double amplitude, double tau, double r0) {
  return profiled_field(n, amplitude, tau, r0,
                        [](const Vec& xhat, double) { return xhat; });
}

VectorField gauge_field_translation(int n, double amplitude, double tau, double r0,
                                    int axis) {
  if (axis < 1 || axis > n) throw std::invalid_argument("gauge_field_translation: axis");
  return profiled_field(n, amplitude, tau, r0, [n, axis](const Vec&, double) {
    Vec d = Vec::Zero(n);
    d[axis - 1] = 1.0;
    return d;
  });
}

VectorField gauge_field_rotation(int n, double amplitude, double tau, double r0,
                                 int axis_i, int axis_j) {
  if (axis_i < 1 || axis_i > n || axis_j < 1 || axis_j > n || axis_i == axis_j)
    throw std::invalid_argument("gauge_field_rotation: axes");
  return profiled_field(n, amplitude, tau, r0, [n, axis_i, axis_j](const Vec& xhat, double) {
    Vec d = Vec::Zero(n);
    d[axis_i - 1] = -xhat[axis_j - 1];
    d[axis_j - 1] = xhat[axis_i - 1];
    return d;
  });
}

AmbientField ambient_field(const VectorField& zeta) {
  if (zeta.chart != Chart::Ball)
    throw std::invalid_argument("ambient_field: ball-chart fields only");
  return [zeta](const Point& X) {
    const Point xb = convert(X, Chart::Ball);
    return Vec(ball_to_hyperboloid_jacobian(xb.coords) * zeta.v(xb));
  };
}

Mat isometry_jacobian(const LorentzMap& B, const Point& p) {
  const Point pb = convert(p, Chart::Ball);
  const Point qb = convert(apply(B, pb), Chart::Ball);
  Mat jac = hyperboloid_to_ball_jacobian(convert(qb, Chart::Hyperboloid).coords) *
            B.matrix * ball_to_hyperboloid_jacobian(pb.coords);
  if (p.chart == Chart::Ball) return jac;
  // conjugate with the chart jacobians at both ends
  const Mat j_in = chart_jacobian(p, Chart::Ball);   // d(ball)/d(p.chart) at p
  const Point q = convert(qb, p.chart);
  const Mat j_out = chart_jacobian(q, Chart::Ball);  // d(ball)/d(p.chart) at image
  return Mat(j_out.fullPivLu().solve(jac * j_in));
}

// ---------------------------------------------------------------------------

namespace {

// Ball coordinates of exp_x(zeta(x)).
Vec phi0_ball(const VectorField& zeta, const Vec& x) {
  const Point xb = ball_point(x);
  const Point X = convert(xb, Chart::Hyperboloid);
  const Vec xi = ball_to_hyperboloid_jacobian(x) * zeta.v(xb);
  const Point Y = exp_map(X, TangentVector{X, xi});
  return convert(Y, Chart::Ball).coords;
}

Vec newton_invert_phi0(const VectorField& zeta, const Vec& target, double h) {
  Vec x = target;
  const int n = static_cast<int>(target.size());
  for (int it = 0; it < 40; ++it) {
    const Vec F = phi0_ball(zeta, x) - target;
    if (F.cwiseAbs().maxCoeff() < 1e-14) return x;
    Mat J(n, n);
    for (int j = 0; j < n; ++j) {
      Vec xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      J.col(j) = (phi0_ball(zeta, xp) - phi0_ball(zeta, xm)) / (2.0 * h);
    }
    const Vec step = J.fullPivLu().solve(F);
    x -= step;
    if (step.cwiseAbs().maxCoeff() < 1e-15) return x;
  }
  const Vec F = phi0_ball(zeta, x) - target;
  if (F.cwiseAbs().maxCoeff() < 1e-11) return x;
  throw std::runtime_error("apply_chart_change: Newton inversion of exp(zeta) failed");
}

}  // namespace

MetricPerturbation apply_chart_change(const MetricPerturbation& e1,
                                      const ChartChange& phi, const FdConfig& fd) {
  const LorentzMap Binv = inverse(phi.B);
  const bool pure_isometry = !phi.zeta.v;
  const double boost_shift = std::acosh(std::max(1.0, phi.B.matrix(0, 0)));

  MetricPerturbation mp;
  mp.chart = Chart::Ball;
  mp.wang = false;
  mp.decay_order = pure_isometry ? e1.decay_order : std::min(e1.decay_order, phi.decay);
  mp.inner_radius = e1.inner_radius + boost_shift + (pure_isometry ? 0.0 : 0.5);
  mp.equivalence_constant = e1.equivalence_constant;

  mp.e = [e1, phi, Binv, fd, pure_isometry](const Point& p) {
    const int n = p.dim();
    const Vec pprime = convert(apply(Binv, p), Chart::Ball).coords;
    Vec q = pprime;
    Mat core;
    if (pure_isometry) {
      core = perturbation_components(e1, ball_point(q));
    } else {
      q = newton_invert_phi0(phi.zeta, pprime, fd.step);
      const Point qb = ball_point(q);
      const Mat diff = pullback_difference(ambient_field(phi.zeta), qb,
                                           PullbackOptions{fd.step, 5.0});
      const Mat inner = perturbation_components(e1, qb) - diff;
      // FD Jacobian of Phi0 at q (Richardson).
      Mat M(n, n);
      const double h = fd.step;
      for (int j = 0; j < n; ++j) {
        Vec xp = q, xm = q;
        xp[j] += h;
        xm[j] -= h;
        Vec d1 = (phi0_ball(phi.zeta, xp) - phi0_ball(phi.zeta, xm)) / (2.0 * h);
        if (fd.richardson) {
          Vec xp2 = q, xm2 = q;
          xp2[j] += 0.5 * h;
          xm2[j] -= 0.5 * h;
          const Vec d2 = (phi0_ball(phi.zeta, xp2) - phi0_ball(phi.zeta, xm2)) / h;
          d1 = (4.0 * d2 - d1) / 3.0;
        }
        M.col(j) = d1;
      }
      const Mat Minv = M.fullPivLu().inverse();
      core = Minv.transpose() * inner * Minv;
    }
    const Mat JBi = isometry_jacobian(Binv, p);  // d(B^{ -1} x)/dx at p
    return Mat(JBi.transpose() * core * JBi);
  };
  return mp;
}

bool chart_change_injective(const ChartChange& phi, int n, double r_lo, double r_hi,
                            int samples) {
  std::mt19937_64 rng(20240817);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(r_lo, r_hi);
  std::vector<Vec> images;
  std::vector<Vec> sources;
  for (int s = 0; s < samples; ++s) {
    Vec dir(n);
    for (int i = 0; i < n; ++i) dir[i] = gauss(rng);
    dir.normalize();
    const double r = unif(rng);
    const Point p = polar_point(r, dir);
    const Vec x = convert(p, Chart::Ball).coords;
    Vec y = phi.zeta.v ? phi0_ball(phi.zeta, x) : x;
    const Point img = apply(phi.B, ball_point(y));
    // Jacobian determinant must stay positive.
    if (phi.zeta.v) {
      Mat J(n, n);
      const double h = 1e-5;
      for (int j = 0; j < n; ++j) {
        Vec xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        J.col(j) = (phi0_ball(phi.zeta, xp) - phi0_ball(phi.zeta, xm)) / (2.0 * h);
      }
      if (J.determinant() <= 0.0) return false;
    }
    sources.push_back(x);
    images.push_back(convert(img, Chart::Ball).coords);
  }
  for (std::size_t a = 0; a < images.size(); ++a)
    for (std::size_t b = a + 1; b < images.size(); ++b) {
      const double din = distance(ball_point(sources[a]), ball_point(sources[b]));
      const double dout = distance(ball_point(images[a]), ball_point(images[b]));
      if (din > 1e-6 && dout < 1e-9) return false;
    }
  return true;
}

ChartChange compose(const ChartChange& outer, const ChartChange& inner) {
  // (B2 o exp(z2)) o (B1 o exp(z1)) applied as maps; only the pure-gauge /
  // pure-isometry combinations used by the experiments are supported exactly.
  if (outer.zeta.v && inner.B.matrix != Mat(Mat::Identity(inner.B.matrix.rows(),
                                                          inner.B.matrix.cols())))
    throw std::invalid_argument("compose(ChartChange): unsupported combination");
  ChartChange c;
  c.B = compose(outer.B, inner.B);
  c.decay = std::min(outer.decay, inner.decay);
  if (!outer.zeta.v) {
    c.zeta = inner.zeta;
    return c;
  }
  if (!inner.zeta.v) {
    c.zeta = outer.zeta;
    return c;
  }
  throw std::invalid_argument("compose(ChartChange): two gauge fields not supported");
}

// ---------------------------------------------------------------------------

BartnikData bartnik_field(const VectorField& zeta, const TestFunction& V,
                          const CutoffFamily& cutoffs, double k, const Point& p0,
                          const FdConfig& fd) {
  if (V.kind == TestFunction::Kind::Generic)
    throw std::invalid_argument("bartnik_field: V must be a lapse or eigenfunction");
  const Point p = p0.chart == Chart::Polar ? p0 : convert(p0, Chart::Polar);
  const int n = p.dim();

  auto zeta_here = [&](const Point& q) {
    if (zeta.chart == q.chart) return zeta.v(q);
    const Point qd = convert(q, zeta.chart);
    const Mat jac = chart_jacobian(qd, q.chart);  // d(q.chart)/d(zeta.chart)
    return Vec(jac * zeta.v(qd));
  };

  auto S_at = [&](const Point& q) -> Mat {
    const ChartFrame f = background(q);
    const auto [val, dV] = V.eval(q);
    const Vec z = zeta_here(q);
    const Vec z_low = f.b * z;
    const Mat Dz = cov_derivative_vector(zeta_here, q, fd);  // (k,i) = D_k z^i
    Mat Dz_low(n, n);  // (i,j) = D_i z_j
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = 0.0;
        for (int l = 0; l < n; ++l) v += f.b(j, l) * Dz(i, l);
        Dz_low(i, j) = v;
      }
    Mat S(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        S(i, j) = (Dz_low(i, j) - Dz_low(j, i)) * val + 2.0 * z_low[i] * dV[j] -
                  2.0 * z_low[j] * dV[i];
    return S;
  };

  auto W_at = [&](const Point& q) -> Vec {
    const double r = radial_distance(q);
    double chi, chi1, chi2;
    cutoffs.eval(r, k, chi, chi1, chi2);
    const Vec theta = q.coords.tail(n);
    return Vec(S_at(q) * (-chi1 * theta));  // (-D chi)^sharp = -chi' theta
  };

  BartnikData out;
  out.S = S_at(p);
  out.W = W_at(p);

  const ChartFrame f = background(p);
  const Mat DW = cov_derivative_covector(W_at, p, fd);
  out.div_W = (f.b_inv.cwiseProduct(DW)).sum();

  // expected = U(b, V, L_zeta b, chi_k) + 2 zeta^i T_ij (-D chi)^j
  MetricPerturbation lzb;
  lzb.chart = p.chart;
  lzb.e = [&](const Point& q) { return lie_derivative_b(zeta_here, q, fd); };
  double chi, chi1, chi2;
  cutoffs.eval(radial_distance(p), k, chi, chi1, chi2);
  const Vec theta = p.coords.tail(n);
  double expected =
      charge_integrand_standard(lzb, V, Vec(chi1 * theta), p, fd);
  if (V.kind == TestFunction::Kind::Eigen) {
    const Mat T = V.eigen->hessian_deficit_at(p);
    expected += 2.0 * zeta_here(p).dot(T * Vec(-chi1 * theta));
  }
  out.expected = expected;
  out.residual = std::abs(out.div_W - expected);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// V o B as a test function (value and covector transform through B).
TestFunction compose_with_isometry(const TestFunction& V, const LorentzMap& B) {
  if (V.kind == TestFunction::Kind::Lapse) return test_function(act_lapse(B, V.lapse));
  TestFunction t;
  t.kind = V.kind;
  t.eigen = V.eigen;
  const TestFunction base = V;
  t.eval = [base, B](const Point& p) {
    const Point q = apply(B, p);
    auto [val, grad] = base.eval(q);
    const Mat J = isometry_jacobian(B, p);
    return std::make_pair(val, Vec(J.transpose() * grad));
  };
  return t;
}

}  // namespace

CovarianceReport verify_covariance(const MetricPerturbation& e, const ChartChange& phi,
                                   const TestFunction& V, const CutoffFamily& cutoffs,
                                   const SphereRule& rule, const ChargeOptions& opt) {
  CovarianceReport rep;
  const ChargeResult before = charge_adm(e, V, cutoffs, rule, opt);
  rep.p_before = before.extrapolated;
  const MetricPerturbation e2 = apply_chart_change(e, phi, opt.fd);
  rep.after = charge_adm(e2, V, cutoffs, rule, opt);
  rep.p_after = rep.after.extrapolated;
  rep.transformed = charge_adm(e, compose_with_isometry(V, phi.B), cutoffs, rule, opt);
  rep.p_transformed = rep.transformed.extrapolated;
  rep.rel_gap = std::abs(rep.p_after - rep.p_transformed) /
                std::max(1.0, std::abs(rep.p_after));
  return rep;
}

MassCovarianceReport verify_mass_covariance(const MetricPerturbation& e,
                                            const ChartChange& phi,
                                            const CutoffFamily& cutoffs,
                                            const SphereRule& rule,
                                            const ChargeOptions& opt) {
  const int n = rule.dim;
  MassCovarianceReport rep;
  rep.p_before = mass_vector(e, cutoffs, rule, opt).p;
  const MetricPerturbation e2 = apply_chart_change(e, phi, opt.fd);
  rep.p_after = mass_vector(e2, cutoffs, rule, opt).p;
  rep.p_expected = phi.B.matrix * rep.p_before;
  rep.scale = std::max(1e-12, rep.p_before.cwiseAbs().maxCoeff());
  rep.max_gap = (rep.p_after - rep.p_expected).cwiseAbs().maxCoeff() / rep.scale;
  return rep;
}

}  // namespace ahmass
