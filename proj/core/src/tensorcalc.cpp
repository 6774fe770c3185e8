#include "ahmass/tensorcalc.hpp"

#include <cmath>

namespace ahmass {

namespace {

Tensor3 zero3(int n) { return Tensor3(n, Mat::Zero(n, n)); }
Tensor4 zero4(int n) { return Tensor4(n, Tensor3(n, Mat::Zero(n, n))); }

template <typename F>
auto richardson_central(const F& eval, const Point& p, int i, double h, bool rich)
    -> decltype(eval(p)) {
  using R = decltype(eval(p));
  const R fp = eval(shift_point(p, i, h));
  const R fm = eval(shift_point(p, i, -h));
  const R d1 = (fp - fm) / (2.0 * h);
  if (!rich) return d1;
  const R gp = eval(shift_point(p, i, 0.5 * h));
  const R gm = eval(shift_point(p, i, -0.5 * h));
  const R d2 = (gp - gm) / h;
  return R((4.0 * d2 - d1) / 3.0);
}

// Scalar variant (Eigen types and double cannot share the template above).
double richardson_scalar(const std::function<double(const Point&)>& f, const Point& p,
                         int i, double h, bool rich) {
  const double d1 = (f(shift_point(p, i, h)) - f(shift_point(p, i, -h))) / (2.0 * h);
  if (!rich) return d1;
  const double d2 =
      (f(shift_point(p, i, 0.5 * h)) - f(shift_point(p, i, -0.5 * h))) / h;
  return (4.0 * d2 - d1) / 3.0;
}

void check_inner_radius(const MetricPerturbation& mp, const Point& p) {
  if (mp.inner_radius > 0.0 && radial_distance(p) < mp.inner_radius - 1e-6)
    throw std::domain_error("perturbation evaluated inside its inner radius");
}

// Covariant derivative of exact coordinate partials.
Tensor3 covariant_from_partials(const Tensor3& partials, const Mat& e,
                                const ChartFrame& f) {
  const int n = static_cast<int>(partials.size());
  Tensor3 De = zero3(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = partials[k](i, j);
        for (int l = 0; l < n; ++l)
          v -= f.gamma[l](k, i) * e(l, j) + f.gamma[l](k, j) * e(i, l);
        De[k](i, j) = v;
      }
  return De;
}

// Rank-3 transform with all indices covariant; jac = d(declared)/d(work).
Tensor3 transform_rank3(const Tensor3& t, const Mat& jac) {
  const int n = static_cast<int>(jac.rows());
  Tensor3 out = zero3(n);
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = 0.0;
        for (int c = 0; c < n; ++c)
          for (int ii = 0; ii < n; ++ii)
            for (int jj = 0; jj < n; ++jj)
              v += t[c](ii, jj) * jac(c, a) * jac(ii, i) * jac(jj, j);
        out[a](i, j) = v;
      }
  return out;
}

// Covariant De of mp at q, in q's chart.
Tensor3 covariant_De(const MetricPerturbation& mp, const Point& q, const FdConfig& fd) {
  const int n = q.dim();
  if (mp.de) {
    const Point qd = convert(q, mp.chart);
    const Tensor3 De_decl =
        covariant_from_partials(mp.de(qd), mp.e(qd), background(qd));
    if (q.chart == mp.chart) return De_decl;
    return transform_rank3(De_decl, chart_jacobian(q, mp.chart));
  }
  auto field = [&](const Point& s) { return perturbation_components(mp, s); };
  const ChartFrame f = background(q);
  const Mat e = field(q);
  const double h = fd.step * fd_scale(q);
  Tensor3 partials(n);
  for (int k = 0; k < n; ++k)
    partials[k] = richardson_central(field, q, k, h, fd.richardson);
  return covariant_from_partials(partials, e, f);
}

}  // namespace

MetricPerturbation zero_perturbation(int n) {
  MetricPerturbation mp;
  mp.chart = Chart::Ball;
  mp.e = [n](const Point&) { return Mat::Zero(n, n); };
  mp.de = [n](const Point&) { return zero3(n); };
  return mp;
}

Mat perturbation_components(const MetricPerturbation& mp, const Point& p) {
  check_inner_radius(mp, p);
  if (p.chart == mp.chart) return mp.e(p);
  const Point pd = convert(p, mp.chart);
  const Mat jac = chart_jacobian(p, mp.chart);  // d(declared)/d(p.chart)
  return Mat(jac.transpose() * mp.e(pd) * jac);
}

Point shift_point(const Point& p, int i, double dt) {
  if (p.chart == Chart::Polar) {
    Vec z = polar_z(p);
    z[i] += dt;
    return polar_from_z(z);
  }
  if (p.chart == Chart::Hyperboloid)
    throw std::invalid_argument("shift_point: hyperboloid is not a coordinate chart");
  Vec c = p.coords;
  c[i] += dt;
  return p.chart == Chart::Ball ? ball_point(c) : half_space_point(c);
}

double fd_scale(const Point& p) {
  const Vec c = p.chart == Chart::Polar ? polar_z(p) : p.coords;
  return std::max(1.0, c.cwiseAbs().maxCoeff());
}

Jet1 perturbation_jet1(const MetricPerturbation& mp, const Point& p, const FdConfig& fd) {
  Jet1 jet;
  jet.e = perturbation_components(mp, p);
  jet.De = covariant_De(mp, p, fd);
  return jet;
}

Jet2 perturbation_jet2(const MetricPerturbation& mp, const Point& p, const FdConfig& fd) {
  const int n = p.dim();
  Jet2 jet;
  jet.e = perturbation_components(mp, p);
  jet.De = covariant_De(mp, p, fd);
  jet.DDe = zero4(n);

  const ChartFrame f = background(p);
  auto De_field = [&](const Point& q) -> Tensor3 { return covariant_De(mp, q, fd); };
  const double h = fd.step * fd_scale(p);
  for (int a = 0; a < n; ++a) {
    // partial_a of the De field (component-wise Richardson).
    Tensor3 dp = zero3(n);
    {
      const Tensor3 fp = De_field(shift_point(p, a, h));
      const Tensor3 fm = De_field(shift_point(p, a, -h));
      for (int b = 0; b < n; ++b) dp[b] = (fp[b] - fm[b]) / (2.0 * h);
      if (fd.richardson) {
        const Tensor3 gp = De_field(shift_point(p, a, 0.5 * h));
        const Tensor3 gm = De_field(shift_point(p, a, -0.5 * h));
        for (int b = 0; b < n; ++b)
          dp[b] = (4.0 * (gp[b] - gm[b]) / h - dp[b]) / 3.0;
      }
    }
    for (int b = 0; b < n; ++b)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double v = dp[b](i, j);
          for (int l = 0; l < n; ++l)
            v -= f.gamma[l](a, b) * jet.De[l](i, j) +
                 f.gamma[l](a, i) * jet.De[b](l, j) +
                 f.gamma[l](a, j) * jet.De[b](i, l);
          jet.DDe[a][b](i, j) = v;
        }
  }
  return jet;
}

double record_equivalence_constant(const MetricPerturbation& mp,
                                   const std::vector<Point>& samples) {
  double c = 1.0;
  for (const Point& p : samples) {
    const ChartFrame f = background(p);
    const Mat g = f.b + perturbation_components(mp, p);
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(g, f.b);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    if (lmin <= 0.0) throw NotPositiveDefinite(lmin);
    c = std::max({c, lmax, 1.0 / lmin});
  }
  return c;
}

Vec fd_partials(const std::function<double(const Point&)>& f, const Point& p,
                const FdConfig& fd) {
  const int n = p.dim();
  const double h = fd.step * fd_scale(p);
  Vec out(n);
  for (int k = 0; k < n; ++k) out[k] = richardson_scalar(f, p, k, h, fd.richardson);
  return out;
}

Vec cov_derivative_scalar(const std::function<double(const Point&)>& f,
                          const Point& p, const FdConfig& fd) {
  return fd_partials(f, p, fd);
}

Mat cov_derivative_covector(const std::function<Vec(const Point&)>& w,
                            const Point& p, const FdConfig& fd) {
  const int n = p.dim();
  const ChartFrame f = background(p);
  const Vec w0 = w(p);
  const double h = fd.step * fd_scale(p);
  Mat out(n, n);
  for (int k = 0; k < n; ++k) {
    const Vec dk = richardson_central(w, p, k, h, fd.richardson);
    for (int i = 0; i < n; ++i) {
      double v = dk[i];
      for (int l = 0; l < n; ++l) v -= f.gamma[l](k, i) * w0[l];
      out(k, i) = v;
    }
  }
  return out;
}

Mat cov_derivative_vector(const std::function<Vec(const Point&)>& v,
                          const Point& p, const FdConfig& fd) {
  const int n = p.dim();
  const ChartFrame f = background(p);
  const Vec v0 = v(p);
  const double h = fd.step * fd_scale(p);
  Mat out(n, n);
  for (int k = 0; k < n; ++k) {
    const Vec dk = richardson_central(v, p, k, h, fd.richardson);
    for (int i = 0; i < n; ++i) {
      double val = dk[i];
      for (int l = 0; l < n; ++l) val += f.gamma[i](k, l) * v0[l];
      out(k, i) = val;
    }
  }
  return out;
}

Tensor3 cov_derivative_sym2(const std::function<Mat(const Point&)>& T,
                            const Point& p, const FdConfig& fd) {
  const int n = p.dim();
  const ChartFrame f = background(p);
  const Mat t0 = T(p);
  const double h = fd.step * fd_scale(p);
  Tensor3 partials(n);
  for (int k = 0; k < n; ++k)
    partials[k] = richardson_central(T, p, k, h, fd.richardson);
  return covariant_from_partials(partials, t0, f);
}

Mat inverse_correction(const Mat& e) {
  return inverse_correction(e, Mat::Identity(e.rows(), e.cols()));
}

Mat inverse_correction(const Mat& e, const Mat& b) {
  const Mat g = b + e;
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(g, b);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin <= 0.0) throw NotPositiveDefinite(lmin);
  // f = -(I + b^{-1}e)^{-1} b^{-1} e b^{-1}: the product form keeps f
  // accurate when |e| << |b| (no subtraction of near-equal inverses).
  const Mat binv = b.llt().solve(Mat::Identity(e.rows(), e.cols()));
  const Mat E = binv * e;
  const Mat f = -(Mat::Identity(e.rows(), e.cols()) + E).fullPivLu().solve(E * binv);
  return Mat(0.5 * (f + f.transpose()));
}

namespace {

Tensor3 christoffel_from(const Jet1& jet, const Mat& ginv) {
  const int n = static_cast<int>(jet.De.size());
  Tensor3 gam = zero3(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = 0.0;
        for (int l = 0; l < n; ++l)
          v += ginv(k, l) *
               (jet.De[i](l, j) + jet.De[j](i, l) - jet.De[l](i, j));
        gam[k](i, j) = 0.5 * v;
      }
  return gam;
}

// Jets expressed in a b-orthonormal frame (b = identity). Chart components
// mix O(1) and O(e^{2r}) magnitudes in the z chart; the curvature assemblies
// subtract near-equal large contractions there and lose the tiny remainders,
// so all expansion algebra happens in this frame.
struct OrthoJet {
  Mat e;
  Tensor3 De;
  Tensor4 DDe;
  Mat S;     // b^{-1/2}: T_ortho = S T_chart S per covariant index
  Mat Sinv;  // b^{1/2}
};

OrthoJet orthonormalize(const Jet2& jet, const ChartFrame& frame) {
  const int n = static_cast<int>(jet.De.size());
  Eigen::SelfAdjointEigenSolver<Mat> es(frame.b);
  const Mat S = es.operatorInverseSqrt();
  OrthoJet o;
  o.S = S;
  o.Sinv = es.operatorSqrt();
  o.e = S * jet.e * S;
  o.De = zero3(n);
  o.DDe = zero4(n);
  Tensor3 half = zero3(n);
  for (int a = 0; a < n; ++a) half[a] = S * jet.De[a] * S;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) o.De[a] += S(a, b) * half[b];
  Tensor4 half4 = zero4(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) half4[a][b] = S * jet.DDe[a][b] * S;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int ap = 0; ap < n; ++ap)
        for (int bp = 0; bp < n; ++bp)
          o.DDe[a][b] += S(a, ap) * S(b, bp) * half4[ap][bp];
  return o;
}

struct ExpansionData {
  OrthoJet jet;
  Mat ginv;      // g^{ij} in the orthonormal frame
  Tensor3 gam;   // Gamma^k_{ij}
  Tensor4 dgam;  // D_a Gamma^k_{ij}, dgam[a][k](i,j)
};

ExpansionData expansion_data(const MetricPerturbation& mp, const Point& p,
                             const FdConfig& fd, bool need_dgamma) {
  ExpansionData d;
  d.jet = orthonormalize(perturbation_jet2(mp, p, fd), background(p));
  const int n = p.dim();
  d.ginv = Mat::Identity(n, n) + inverse_correction(d.jet.e);
  Jet1 j1{d.jet.e, d.jet.De};
  d.gam = christoffel_from(j1, d.ginv);
  if (!need_dgamma) return d;

  // D_a Gamma^k_{ij} = 1/2 (D_a g^{km}) S_mij + 1/2 g^{km} D_a S_mij,
  // with S_mij = D_i e_mj + D_j e_im - D_m e_ij and
  // D_a g^{km} = -g^{kp} g^{mq} D_a e_pq.
  d.dgam = zero4(n);
  Tensor3 dginv = zero3(n);  // dginv[a](k,m) = D_a g^{km}
  for (int a = 0; a < n; ++a)
    dginv[a] = -(d.ginv * d.jet.De[a] * d.ginv);
  for (int a = 0; a < n; ++a)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double v = 0.0;
          for (int m = 0; m < n; ++m) {
            const double S =
                d.jet.De[i](m, j) + d.jet.De[j](i, m) - d.jet.De[m](i, j);
            const double dS = d.jet.DDe[a][i](m, j) + d.jet.DDe[a][j](i, m) -
                              d.jet.DDe[a][m](i, j);
            v += dginv[a](k, m) * S + d.ginv(k, m) * dS;
          }
          d.dgam[a][k](i, j) = 0.5 * v;
        }
  return d;
}

// b = identity contractions of an orthonormal jet.
ScalarContractions ortho_contractions(const OrthoJet& jet) {
  const int n = static_cast<int>(jet.De.size());
  ScalarContractions sc;
  sc.tr_e = jet.e.trace();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      sc.div_div_e += jet.DDe[a][b](b, a);
      sc.lap_tr_e += jet.DDe[a][a](b, b);
    }
  return sc;
}

}  // namespace

Tensor3 christoffel(const MetricPerturbation& mp, const Point& p, const FdConfig& fd) {
  const ChartFrame frame = background(p);
  const Jet1 jet = perturbation_jet1(mp, p, fd);
  const Mat f = inverse_correction(jet.e, frame.b);
  return christoffel_from(jet, Mat(frame.b_inv + f));
}

ScalarContractions scalar_contractions(const Jet2& jet, const ChartFrame& frame) {
  const int n = static_cast<int>(jet.De.size());
  ScalarContractions sc;
  sc.tr_e = (frame.b_inv * jet.e).trace();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          sc.div_div_e += frame.b_inv(a, d) * frame.b_inv(b, c) * jet.DDe[a][b](c, d);
          sc.lap_tr_e += frame.b_inv(a, b) * frame.b_inv(c, d) * jet.DDe[a][b](c, d);
        }
  return sc;
}

namespace {

double scal_linear_from(const OrthoJet& jet, int n) {
  const ScalarContractions sc = ortho_contractions(jet);
  return (n - 1.0) * sc.tr_e + sc.div_div_e - sc.lap_tr_e;
}

double scal_exact_from(const ExpansionData& d, int n) {
  // g^{ij} Ric_ij with Ric = -(n-1) b; orthonormal frame, so
  // tr(g^{-1} b) = n + tr(f).
  double scal = -(n - 1.0) * d.ginv.trace();
  // g^{jl} (D_i Gamma^i_{jl} - D_l Gamma^i_{ji} + Gamma^i_{ip} Gamma^p_{jl}
  //         - Gamma^i_{lp} Gamma^p_{ji})
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      double term = 0.0;
      for (int i = 0; i < n; ++i) {
        term += d.dgam[i][i](j, l) - d.dgam[l][i](j, i);
        for (int q = 0; q < n; ++q)
          term += d.gam[i](i, q) * d.gam[q](j, l) - d.gam[i](l, q) * d.gam[q](j, i);
      }
      scal += d.ginv(j, l) * term;
    }
  return scal;
}

}  // namespace

double scal_linear(const MetricPerturbation& mp, const Point& p, const FdConfig& fd) {
  return scal_linear_from(
      orthonormalize(perturbation_jet2(mp, p, fd), background(p)), p.dim());
}

double scal_exact(const MetricPerturbation& mp, const Point& p, const FdConfig& fd) {
  return scal_exact_from(expansion_data(mp, p, fd, true), p.dim());
}

ScalPair scal_both(const MetricPerturbation& mp, const Point& p, const FdConfig& fd) {
  const ExpansionData d = expansion_data(mp, p, fd, true);
  ScalPair out;
  out.exact = scal_exact_from(d, p.dim());
  out.linear = scal_linear_from(d.jet, p.dim());
  return out;
}

Mat einstein_linear(const MetricPerturbation& mp, const Point& p, const FdConfig& fd) {
  const int n = p.dim();
  const OrthoJet jet = orthonormalize(perturbation_jet2(mp, p, fd), background(p));
  const ScalarContractions sc = ortho_contractions(jet);

  Mat kernel = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = 0.0;
      for (int k = 0; k < n; ++k)
        v += jet.DDe[k][i](j, k) + jet.DDe[k][j](i, k) - jet.DDe[k][k](i, j) -
             jet.DDe[i][j](k, k);
      kernel(i, j) = 0.5 * v;
    }
  const double scal_lin = sc.div_div_e - sc.lap_tr_e + (n - 1.0) * sc.tr_e;
  const Mat E = kernel - 0.5 * scal_lin * Mat::Identity(n, n) + (n - 1.0) * jet.e;
  return Mat(jet.Sinv * E * jet.Sinv);  // back to chart components
}

Mat lie_derivative_b(const std::function<Vec(const Point&)>& zeta, const Point& p,
                     const FdConfig& fd) {
  const int n = p.dim();
  const ChartFrame f = background(p);
  const Mat Dv = cov_derivative_vector(zeta, p, fd);  // (k, i) = D_k v^i
  Mat out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = 0.0;
      for (int k = 0; k < n; ++k) v += f.b(j, k) * Dv(i, k) + f.b(i, k) * Dv(j, k);
      out(i, j) = v;
    }
  return out;
}

ConformalKillingData conformal_killing(int mu, const Point& p) {
  const int n = p.dim();
  const LapseFunction V = lapse_basis(n, mu);
  const LapseData ld = lapse_eval(V, p);
  const ChartFrame f = background(p);
  ConformalKillingData out;
  out.field = f.b_inv * ld.gradient;
  out.covariant_derivative = ld.value * Mat::Identity(n, n);
  out.divergence = n * ld.value;
  return out;
}

}  // namespace ahmass
