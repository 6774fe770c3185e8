#include "ahmass/eigenfunctions.hpp"

#include <cmath>

namespace ahmass {

double integral_I(int n, double beta) {
  if (beta <= 0.5 * n)
    throw std::domain_error("integral_I: divergent, needs beta > n/2");
  return std::pow(M_PI, 0.5 * (n - 1)) * std::tgamma(beta - 0.5 * (n - 1)) /
         std::tgamma(beta);
}

double integral_J(int n, double alpha, double beta) {
  if (beta <= 0.5 * (n - 2) || alpha <= -1.0 || alpha >= 2.0 * beta - n + 1.0)
    throw std::domain_error("integral_J: parameters outside the convergence range");
  return std::pow(M_PI, 0.5 * (n - 2)) * std::tgamma(0.5 * (alpha + 1.0)) *
         std::tgamma(beta - 0.5 * (n + alpha - 1.0)) / std::tgamma(beta);
}

// ---------------------------------------------------------------------------

BoundaryFunction BoundaryFunction::constant(double c) {
  BoundaryFunction b;
  b.kind_ = Kind::Constant;
  b.c_ = c;
  return b;
}

BoundaryFunction BoundaryFunction::callback(std::function<double(const Vec&)> f) {
  BoundaryFunction b;
  b.kind_ = Kind::Callback;
  b.f_ = std::move(f);
  return b;
}

BoundaryFunction BoundaryFunction::harmonics(const Vec& coeffs) {
  if (coeffs.size() > 9)
    throw std::invalid_argument("BoundaryFunction::harmonics: at most 9 coefficients (l <= 2)");
  BoundaryFunction b;
  b.kind_ = Kind::Harmonics;
  b.coeffs_ = Vec::Zero(9);
  b.coeffs_.head(coeffs.size()) = coeffs;
  return b;
}

double BoundaryFunction::operator()(const Vec& u) const {
  switch (kind_) {
    case Kind::Constant:
      return c_;
    case Kind::Callback:
      return f_(u);
    case Kind::Harmonics: {
      if (u.size() != 3)
        throw std::invalid_argument("harmonics boundary data is n = 3 only");
      const double x = u[0], y = u[1], z = u[2];
      const double basis[9] = {1.0, x, y, z, x * y, x * z, y * z,
                               x * x - y * y, 3.0 * z * z - 1.0};
      double v = 0.0;
      for (int i = 0; i < 9; ++i) v += coeffs_[i] * basis[i];
      return v;
    }
  }
  return 0.0;
}

bool BoundaryFunction::has_gradient() const { return kind_ != Kind::Callback; }

Vec BoundaryFunction::ambient_gradient(const Vec& u) const {
  switch (kind_) {
    case Kind::Constant:
      return Vec::Zero(u.size());
    case Kind::Harmonics: {
      const double x = u[0], y = u[1], z = u[2];
      Vec g = Vec::Zero(3);
      const double* c = coeffs_.data();
      g[0] = c[1] + c[4] * y + c[5] * z + 2.0 * c[7] * x;
      g[1] = c[2] + c[4] * x + c[6] * z - 2.0 * c[7] * y;
      g[2] = c[3] + c[5] * x + c[6] * y + 6.0 * c[8] * z;
      return g;
    }
    case Kind::Callback:
      throw std::logic_error("BoundaryFunction: callback data has no analytic gradient");
  }
  return Vec();
}

Vec BoundaryFunction::tangential_gradient(const Vec& u) const {
  const Vec g = ambient_gradient(u);
  return Vec(g - u.dot(g) * u);
}

// ---------------------------------------------------------------------------

namespace {

// Stereographic image on S^{n-1} of the boundary plane point ybar, i.e. the
// limit of the half-space -> ball map as y^1 -> 0.
Vec stereographic_image(const Vec& ybar) {
  const int n = static_cast<int>(ybar.size()) + 1;
  const double q = 1.0 + ybar.squaredNorm();
  Vec u(n);
  u[0] = (1.0 - ybar.squaredNorm()) / q;
  u.tail(n - 1) = 2.0 * ybar / q;
  return u;
}

}  // namespace

double boundary_density(int n, const BoundaryFunction& v0, const Vec& ybar) {
  return (1.0 + ybar.squaredNorm()) / (2.0 * integral_I(n, n)) *
         v0(stereographic_image(ybar));
}

double asymptotic_deficit_prefactor(int n) {
  return std::pow(M_PI, 0.5 * (n - 1)) * std::tgamma(0.5 * (n - 1)) /
         (2.0 * std::tgamma(static_cast<double>(n)));
}

Mat asymptotic_deficit(int n, const BoundaryFunction& v0, const Vec& ybar) {
  const int m = n - 1;
  if (ybar.size() != m) throw std::invalid_argument("asymptotic_deficit: ybar size");
  // FD Hessian of the plane density (analytic and smooth in ybar).
  const double h = 1e-4 * std::max(1.0, ybar.cwiseAbs().maxCoeff());
  Mat hess(m, m);
  auto f = [&](const Vec& y) { return boundary_density(n, v0, y); };
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j <= i; ++j) {
      double v;
      if (i == j) {
        Vec yp = ybar, ym = ybar;
        yp[i] += h;
        ym[i] -= h;
        v = (f(yp) - 2.0 * f(ybar) + f(ym)) / (h * h);
      } else {
        Vec ypp = ybar, ypm = ybar, ymp = ybar, ymm = ybar;
        ypp[i] += h; ypp[j] += h;
        ypm[i] += h; ypm[j] -= h;
        ymp[i] -= h; ymp[j] += h;
        ymm[i] -= h; ymm[j] -= h;
        v = (f(ypp) - f(ypm) - f(ymp) + f(ymm)) / (4.0 * h * h);
      }
      hess(i, j) = v;
      hess(j, i) = v;
    }
  }
  const double lap = hess.trace();
  return Mat(asymptotic_deficit_prefactor(n) *
             ((n - 1.0) * hess - lap * Mat::Identity(m, m)));
}

// ---------------------------------------------------------------------------

struct Eigenfunction::Moments {
  double s_n = 0, s_n1 = 0, s_n2 = 0;    // scalar kernels K_n, K_{n+1}, K_{n+2}
  Vec v_n1, v_n2;                        // w^i-weighted
  Mat m_n2;                              // w^i w^j-weighted K_{n+2}
};

Eigenfunction::Eigenfunction(int n, BoundaryFunction v0, KernelQuadratureSpec spec)
    : n_(n), v0_(std::move(v0)), spec_(spec) {
  if (n < 3) throw std::invalid_argument("Eigenfunction: n >= 3");
  if (spec_.radial_order < 8 || spec_.angular_order < 8)
    throw std::invalid_argument("Eigenfunction: quadrature orders must be >= 8");
  radial_ = gauss_legendre(spec_.radial_order, 0.0, 0.5 * M_PI);
  angular_ = sphere_rule(n - 1, spec_.angular_order);
}

Eigenfunction::Moments Eigenfunction::moments(double y1, const Vec& ybar) const {
  const int m = n_ - 1;
  Moments mo;
  mo.v_n1 = Vec::Zero(m);
  mo.v_n2 = Vec::Zero(m);
  mo.m_n2 = Mat::Zero(m, m);
  for (std::size_t a = 0; a < angular_.size(); ++a) {
    const Vec& th = angular_.nodes[a];
    const double wa = angular_.weights[a];
    for (int q = 0; q < spec_.radial_order; ++q) {
      const double u = radial_.nodes[q];
      const double cu = std::cos(u), su = std::sin(u);
      const double tn = su / cu;
      // measure: |w|^{n-2} sec^2(u) du dsigma
      const double jac = std::pow(tn, n_ - 2) / (cu * cu);
      const double W = radial_.weights[q] * wa * jac;
      const double Kn = std::pow(cu, 2 * n_);
      const double Kn1 = Kn * cu * cu;
      const double Kn2 = Kn1 * cu * cu;
      const double val = boundary_density(n_, v0_, Vec(ybar + (y1 * tn) * th));
      const double c = W * val;
      mo.s_n += c * Kn;
      mo.s_n1 += c * Kn1;
      mo.s_n2 += c * Kn2;
      mo.v_n1 += (c * Kn1 * tn) * th;
      mo.v_n2 += (c * Kn2 * tn) * th;
      mo.m_n2 += (c * Kn2 * tn * tn) * (th * th.transpose());
    }
  }
  return mo;
}

double Eigenfunction::value(const Point& p) const {
  const Point y = convert(p, Chart::HalfSpace);
  const double y1 = y.coords[0];
  const Moments mo = moments(y1, Vec(y.coords.tail(n_ - 1)));
  return mo.s_n / y1;
}

std::pair<double, Vec> Eigenfunction::value_gradient(const Point& p) const {
  const Point y = convert(p, Chart::HalfSpace);
  const double y1 = y.coords[0];
  const Moments mo = moments(y1, Vec(y.coords.tail(n_ - 1)));
  const double V = mo.s_n / y1;
  Vec dy(n_);
  dy[0] = n_ * (mo.s_n - 2.0 * mo.s_n1) / (y1 * y1);
  dy.tail(n_ - 1) = (2.0 * n_ / (y1 * y1)) * mo.v_n1;
  if (p.chart == Chart::HalfSpace) return {V, dy};
  const Mat jac = chart_jacobian(p, Chart::HalfSpace);  // d(y)/d(p.chart)
  return {V, Vec(jac.transpose() * dy)};
}

Mat Eigenfunction::hessian_deficit_kernel(const Point& p) const {
  if (p.chart != Chart::HalfSpace)
    throw std::invalid_argument("hessian_deficit_kernel: half-space point required");
  const double y1 = p.coords[0];
  const Moments mo = moments(y1, Vec(p.coords.tail(n_ - 1)));
  const double y13 = y1 * y1 * y1;
  Mat T = Mat::Zero(n_, n_);
  T(0, 0) = ((n_ * n_ - 1.0) * mo.s_n - 4.0 * n_ * (n_ + 1.0) * mo.s_n1 +
             4.0 * n_ * (n_ + 1.0) * mo.s_n2) /
            y13;
  for (int i = 1; i < n_; ++i) {
    const double t1i =
        2.0 * n_ * (n_ + 1.0) * (mo.v_n1[i - 1] - 2.0 * mo.v_n2[i - 1]) / y13;
    T(0, i) = t1i;
    T(i, 0) = t1i;
  }
  for (int i = 1; i < n_; ++i)
    for (int j = 1; j < n_; ++j)
      T(i, j) = (n_ + 1.0) *
                (4.0 * n_ * mo.m_n2(i - 1, j - 1) - (i == j ? mo.s_n : 0.0)) / y13;
  return T;
}

Mat Eigenfunction::hessian_deficit_at(const Point& p) const {
  const Point y = convert(p, Chart::HalfSpace);
  const Mat T = hessian_deficit_kernel(y);
  if (p.chart == Chart::HalfSpace) return T;
  const Mat jac = chart_jacobian(p, Chart::HalfSpace);  // d(y)/d(p.chart)
  return Mat(jac.transpose() * T * jac);
}

double Eigenfunction::self_convergence_error(const std::vector<Point>& pts) const {
  KernelQuadratureSpec doubled{2 * spec_.radial_order, 2 * spec_.angular_order};
  Eigenfunction fine(n_, v0_, doubled);
  double err = 0.0;
  for (const Point& p : pts) {
    const double a = value(p);
    const double b = fine.value(p);
    err = std::max(err, std::abs(a - b) / std::max(1.0, std::abs(b)));
  }
  return err;
}

void Eigenfunction::require_converged(const std::vector<Point>& pts, double tol) const {
  const double err = self_convergence_error(pts);
  if (!(err < tol))
    throw std::runtime_error(
        "Eigenfunction quadrature did not self-converge: refinement changed "
        "values by " +
        std::to_string(err) + " (tol " + std::to_string(tol) + ")");
}

}  // namespace ahmass
