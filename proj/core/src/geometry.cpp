#include "ahmass/geometry.hpp"

#include <cmath>

namespace ahmass {

namespace {

constexpr double kHyperboloidDrift = 1e-13;
constexpr double kHyperboloidReject = 1e-6;

Vec inversion_center(int n) {
  Vec c = Vec::Zero(n);
  c[0] = -1.0;
  return c;
}

// Inversion through the sphere of radius sqrt(2) centered at (-1, 0, ..., 0).
// It is an involution exchanging the unit ball and the upper half space.
Vec ball_halfspace_inversion(const Vec& v) {
  const int n = static_cast<int>(v.size());
  Vec d = v - inversion_center(n);
  const double q = d.squaredNorm();
  if (q <= 0.0) throw std::domain_error("inversion: singular point");
  return Vec(2.0 * d / q + inversion_center(n));
}

Mat ball_halfspace_inversion_jacobian(const Vec& v) {
  const int n = static_cast<int>(v.size());
  Vec d = v - inversion_center(n);
  const double q = d.squaredNorm();
  Mat jac = Mat::Identity(n, n) - 2.0 * (d * d.transpose()) / q;
  return Mat((2.0 / q) * jac);
}

double eta_norm2(const Vec& X) { return minkowski(X, X); }

Vec renormalize_hyperboloid(Vec X) {
  const double q = -eta_norm2(X);
  if (q <= 0.0 || X[0] <= 0.0)
    throw std::domain_error("hyperboloid point has invalid causal type");
  if (std::abs(q - 1.0) > kHyperboloidDrift) X /= std::sqrt(q);
  return X;
}

// tanh(r/2)/r and d tanh(r/2)/dr, stable at r -> 0.
double tanh_half_over_r(double r) {
  if (r < 1e-6) return 0.5 - r * r / 24.0;
  return std::tanh(0.5 * r) / r;
}
double tanh_half_deriv(double r) {
  const double c = std::cosh(0.5 * r);
  return 0.5 / (c * c);
}

// (sinh r / r)^2 - 1, stable at r -> 0.
double sinhc_sq_minus_one(double r) {
  if (r < 0.1) {
    const double r2 = r * r;
    return r2 / 3.0 + 2.0 * r2 * r2 / 45.0 + r2 * r2 * r2 / 315.0;
  }
  const double s = std::sinh(r) / r;
  return s * s - 1.0;
}

// (r cosh r - sinh r)/r^3, stable at r -> 0.
double radial_warp_ratio(double r) {
  if (r < 0.1) {
    const double r2 = r * r;
    return 1.0 / 3.0 + r2 / 30.0 + r2 * r2 / 840.0;
  }
  return (r * std::cosh(r) - std::sinh(r)) / (r * r * r);
}

double sinhc(double r) {
  if (r < 1e-4) {
    const double r2 = r * r;
    return 1.0 + r2 / 6.0 + r2 * r2 / 120.0;
  }
  return std::sinh(r) / r;
}

Vec to_ball_coords(const Point& p) {
  switch (p.chart) {
    case Chart::Ball:
      return p.coords;
    case Chart::HalfSpace:
      return ball_halfspace_inversion(p.coords);
    case Chart::Hyperboloid: {
      const int n = p.dim();
      return Vec(p.coords.tail(n) / (1.0 + p.coords[0]));
    }
    case Chart::Polar: {
      const double r = p.coords[0];
      return Vec(std::tanh(0.5 * r) * p.coords.tail(p.dim()));
    }
  }
  throw std::logic_error("unreachable");
}

Point from_ball_coords(const Vec& x, Chart target) {
  const int n = static_cast<int>(x.size());
  switch (target) {
    case Chart::Ball:
      return ball_point(x);
    case Chart::HalfSpace:
      return half_space_point(ball_halfspace_inversion(x));
    case Chart::Hyperboloid: {
      const double rho2 = 1.0 - x.squaredNorm();
      Vec X(n + 1);
      X[0] = (1.0 + x.squaredNorm()) / rho2;
      X.tail(n) = 2.0 * x / rho2;
      return hyperboloid_point(X);
    }
    case Chart::Polar: {
      const double a = x.norm();
      if (a == 0.0) {
        Vec theta = Vec::Zero(n);
        theta[0] = 1.0;
        return polar_point(0.0, theta);
      }
      const double r = std::log1p(2.0 * a / (1.0 - a));
      return polar_point(r, Vec(x / a));
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

const char* chart_name(Chart c) {
  switch (c) {
    case Chart::Ball: return "ball";
    case Chart::HalfSpace: return "half_space";
    case Chart::Hyperboloid: return "hyperboloid";
    case Chart::Polar: return "polar";
  }
  return "?";
}

int Point::dim() const {
  const int m = static_cast<int>(coords.size());
  return (chart == Chart::Hyperboloid || chart == Chart::Polar) ? m - 1 : m;
}

Point ball_point(const Vec& x) {
  if (x.size() < 3) throw std::invalid_argument("ball_point: n must be >= 3");
  if (x.norm() >= 1.0) throw std::domain_error("ball_point: |x| must be < 1");
  return Point{Chart::Ball, x};
}

Point half_space_point(const Vec& y) {
  if (y.size() < 3) throw std::invalid_argument("half_space_point: n must be >= 3");
  if (y[0] <= 0.0) throw std::domain_error("half_space_point: y^1 must be > 0");
  return Point{Chart::HalfSpace, y};
}

Point hyperboloid_point(const Vec& X) {
  if (X.size() < 4) throw std::invalid_argument("hyperboloid_point: needs n+1 >= 4 entries");
  if (X[0] <= 0.0) throw std::domain_error("hyperboloid_point: X^0 must be > 0");
  if (std::abs(eta_norm2(X) + 1.0) > kHyperboloidReject)
    throw std::domain_error("hyperboloid_point: eta(X,X) != -1");
  return Point{Chart::Hyperboloid, renormalize_hyperboloid(X)};
}

Point polar_point(double r, const Vec& theta) {
  if (theta.size() < 3) throw std::invalid_argument("polar_point: n must be >= 3");
  if (r < 0.0) throw std::domain_error("polar_point: r must be >= 0");
  if (std::abs(theta.norm() - 1.0) > 1e-10)
    throw std::domain_error("polar_point: theta must be a unit vector");
  Vec c(theta.size() + 1);
  c[0] = r;
  c.tail(theta.size()) = theta / theta.norm();
  return Point{Chart::Polar, c};
}

double minkowski(const Vec& X, const Vec& Y) {
  return -X[0] * Y[0] + X.tail(X.size() - 1).dot(Y.tail(Y.size() - 1));
}

double rho(const Point& p) {
  switch (p.chart) {
    case Chart::Ball:
      return 0.5 * (1.0 - p.coords.squaredNorm());
    case Chart::HalfSpace: {
      const double y1 = p.coords[0];
      const double q = (y1 + 1.0) * (y1 + 1.0) +
                       p.coords.tail(p.dim() - 1).squaredNorm();
      return 2.0 * y1 / q;
    }
    case Chart::Hyperboloid:
      return 1.0 / (1.0 + p.coords[0]);
    case Chart::Polar:
      return 1.0 / (std::cosh(p.coords[0]) + 1.0);
  }
  throw std::logic_error("unreachable");
}

double radial_distance(const Point& p) {
  if (p.chart == Chart::Polar) return p.coords[0];
  const double r = 1.0 / rho(p) - 1.0;  // cosh(r)
  return std::acosh(std::max(1.0, r));
}

Point convert(const Point& p, Chart target) {
  if (p.chart == target) return p;
  return from_ball_coords(to_ball_coords(p), target);
}

Vec polar_z(const Point& p) {
  if (p.chart != Chart::Polar) throw std::invalid_argument("polar_z: not a polar point");
  return Vec(p.coords[0] * p.coords.tail(p.dim()));
}

Point polar_from_z(const Vec& z) {
  const double r = z.norm();
  if (r == 0.0) {
    Vec theta = Vec::Zero(z.size());
    theta[0] = 1.0;
    return polar_point(0.0, theta);
  }
  return polar_point(r, Vec(z / r));
}

// ---------------------------------------------------------------------------

ChartFrame background(const Point& p) {
  const int n = p.dim();
  ChartFrame f;
  f.gamma.assign(n, Mat::Zero(n, n));
  switch (p.chart) {
    case Chart::Ball: {
      const double rh = rho(p);
      f.b = Mat::Identity(n, n) / (rh * rh);
      f.b_inv = Mat::Identity(n, n) * (rh * rh);
      const Vec& x = p.coords;
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            f.gamma[k](i, j) = ((i == k ? x[j] : 0.0) + (j == k ? x[i] : 0.0) -
                                (i == j ? x[k] : 0.0)) /
                               rh;
      return f;
    }
    case Chart::HalfSpace: {
      const double y1 = p.coords[0];
      f.b = Mat::Identity(n, n) / (y1 * y1);
      f.b_inv = Mat::Identity(n, n) * (y1 * y1);
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            double g = 0.0;
            if (i == k && j == 0) g -= 1.0;
            if (j == k && i == 0) g -= 1.0;
            if (i == j && k == 0) g += 1.0;
            f.gamma[k](i, j) = g / y1;
          }
      return f;
    }
    case Chart::Polar: {
      const double r = p.coords[0];
      if (r < 1e-8) {
        f.b = Mat::Identity(n, n);
        f.b_inv = Mat::Identity(n, n);
        return f;
      }
      const Vec theta = p.coords.tail(n);
      const Mat P = theta * theta.transpose();
      const Mat Q = Mat::Identity(n, n) - P;
      const double am1 = sinhc_sq_minus_one(r);  // A - 1, A = (sinh r / r)^2
      const double A = 1.0 + am1;
      const double Aprime = 2.0 * sinhc(r) * radial_warp_ratio(r) * r;
      f.b = P + A * Q;
      f.b_inv = P + Q / A;
      // d_k b_ij = (1 - A)/r (Q_ik th_j + th_i Q_jk) + A' th_k Q_ij
      const double c1 = -am1 / r;
      std::vector<Mat> db(n, Mat::Zero(n, n));
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            db[k](i, j) = c1 * (Q(i, k) * theta[j] + theta[i] * Q(j, k)) +
                          Aprime * theta[k] * Q(i, j);
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int l = 0; l < n; ++l)
              s += f.b_inv(k, l) * (db[i](l, j) + db[j](i, l) - db[l](i, j));
            f.gamma[k](i, j) = 0.5 * s;
          }
      return f;
    }
    case Chart::Hyperboloid:
      throw std::invalid_argument("background: hyperboloid is not an n-dim chart");
  }
  throw std::logic_error("unreachable");
}

Mat chart_jacobian(const Point& p, Chart target) {
  const int n = p.dim();
  if (p.chart == Chart::Hyperboloid || target == Chart::Hyperboloid)
    throw std::invalid_argument("chart_jacobian: use the dedicated hyperboloid maps");
  if (p.chart == target) return Mat::Identity(n, n);

  // d(ball)/d(own chart)
  Mat to_ball;
  switch (p.chart) {
    case Chart::Ball:
      to_ball = Mat::Identity(n, n);
      break;
    case Chart::HalfSpace:
      to_ball = ball_halfspace_inversion_jacobian(p.coords);
      break;
    case Chart::Polar: {
      const double r = p.coords[0];
      if (r < 1e-8) {
        to_ball = 0.5 * Mat::Identity(n, n);
      } else {
        const Vec theta = p.coords.tail(n);
        const Mat P = theta * theta.transpose();
        to_ball = tanh_half_deriv(r) * P +
                  tanh_half_over_r(r) * (Mat::Identity(n, n) - P);
      }
      break;
    }
    default:
      throw std::logic_error("unreachable");
  }
  if (target == Chart::Ball) return to_ball;

  const Vec x = to_ball_coords(p);
  Mat from_ball;
  switch (target) {
    case Chart::HalfSpace:
      from_ball = ball_halfspace_inversion_jacobian(x);
      break;
    case Chart::Polar: {
      const double a = x.norm();
      if (a < 1e-12) {
        from_ball = 2.0 * Mat::Identity(n, n);
      } else {
        const Vec theta = x / a;
        const double r = std::log1p(2.0 * a / (1.0 - a));
        const Mat P = theta * theta.transpose();
        from_ball = (1.0 / tanh_half_deriv(r)) * P +
                    (1.0 / tanh_half_over_r(r)) * (Mat::Identity(n, n) - P);
      }
      break;
    }
    default:
      throw std::logic_error("unreachable");
  }
  return Mat(from_ball * to_ball);
}

Vec push_vector(const Mat& jac, const Vec& v) { return Vec(jac * v); }

Vec pull_covector(const Mat& jac, const Vec& w) {
  return Vec(jac.transpose().fullPivLu().solve(w));
}

Mat pull_bilinear(const Mat& jac, const Mat& t) {
  const Mat ji = jac.fullPivLu().inverse();
  return Mat(ji.transpose() * t * ji);
}

Mat ball_to_hyperboloid_jacobian(const Vec& x) {
  const int n = static_cast<int>(x.size());
  const double rh = 0.5 * (1.0 - x.squaredNorm());
  Mat jac(n + 1, n);
  for (int j = 0; j < n; ++j) jac(0, j) = x[j] / (rh * rh);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      jac(i + 1, j) = (i == j ? 1.0 / rh : 0.0) + x[i] * x[j] / (rh * rh);
  return jac;
}

Mat hyperboloid_to_ball_jacobian(const Vec& X) {
  const int n = static_cast<int>(X.size()) - 1;
  const double d = 1.0 + X[0];
  Mat jac(n, n + 1);
  for (int i = 0; i < n; ++i) {
    jac(i, 0) = -X[i + 1] / (d * d);
    for (int j = 0; j < n; ++j) jac(i, j + 1) = (i == j ? 1.0 / d : 0.0);
  }
  return jac;
}

// ---------------------------------------------------------------------------

TangentVector tangent(const Point& X, const Vec& xi) {
  if (X.chart != Chart::Hyperboloid)
    throw std::invalid_argument("tangent: base must be a hyperboloid point");
  if (xi.size() != X.coords.size())
    throw std::invalid_argument("tangent: component size mismatch");
  if (std::abs(minkowski(xi, X.coords)) > 1e-9 * (1.0 + xi.norm()) * X.coords[0])
    throw std::domain_error("tangent: eta(xi, X) != 0");
  return TangentVector{X, xi};
}

double tangent_norm(const TangentVector& xi) {
  return std::sqrt(std::max(0.0, minkowski(xi.components, xi.components)));
}

double distance(const Point& X, const Point& Y) {
  const Vec A = convert(X, Chart::Hyperboloid).coords;
  const Vec B = convert(Y, Chart::Hyperboloid).coords;
  const double u = std::max(0.0, -1.0 - minkowski(A, B));
  return std::log1p(u + std::sqrt(u * (2.0 + u)));
}

double exp_c(double t) {
  if (t < 1e-4) {
    return 1.0 + t / 2.0 + t * t / 24.0 + t * t * t / 720.0;
  }
  return std::cosh(std::sqrt(t));
}

double exp_s(double t) {
  if (t < 1e-4) {
    return 1.0 + t / 6.0 + t * t / 120.0 + t * t * t / 5040.0;
  }
  const double st = std::sqrt(t);
  return std::sinh(st) / st;
}

double pullback_q1(double t) {
  if (t < 1e-2) {
    return -(1.0 / 12.0) - t / 90.0 - t * t / 1260.0 - t * t * t / 28350.0 -
           t * t * t * t / 935550.0;
  }
  const double s = exp_s(t);
  return (1.0 - s * s) / (4.0 * t);
}

double pullback_q2(double t) {
  if (t < 1e-2) {
    return -(1.0 / 3.0) - t / 15.0 - 2.0 * t * t / 315.0 - t * t * t / 2835.0 -
           2.0 * t * t * t * t / 155925.0;
  }
  return (1.0 - exp_c(t) * exp_s(t)) / (2.0 * t);
}

double log_f(double u) {
  if (u < 1e-4) {
    // Even Taylor series of the analytic continuation, 8 terms.
    static const double k[8] = {1.0,        -1.0 / 3.0,  2.0 / 15.0,
                                -2.0 / 35.0, 8.0 / 315.0, -8.0 / 693.0,
                                16.0 / 3003.0, -16.0 / 6435.0};
    double acc = 0.0, pw = 1.0;
    for (int i = 0; i < 8; ++i, pw *= u) acc += k[i] * pw;
    return acc;
  }
  const double s = std::sqrt(u * (2.0 + u));
  return std::log1p(u + s) / s;
}

Point exp_map(const Point& X, const TangentVector& xi) {
  if (X.chart != Chart::Hyperboloid)
    throw std::invalid_argument("exp_map: base must be a hyperboloid point");
  const double t = std::max(0.0, minkowski(xi.components, xi.components));
  Vec Y = exp_c(t) * X.coords + exp_s(t) * xi.components;
  return Point{Chart::Hyperboloid, renormalize_hyperboloid(Y)};
}

TangentVector log_map(const Point& X, const Point& Y) {
  if (X.chart != Chart::Hyperboloid || Y.chart != Chart::Hyperboloid)
    throw std::invalid_argument("log_map: arguments must be hyperboloid points");
  const Vec U = Y.coords - X.coords;
  const double u = std::max(0.0, 0.5 * minkowski(U, U));
  Vec xi = log_f(u) * (U - u * X.coords);
  xi += minkowski(xi, X.coords) * X.coords;  // remove eta-roundoff drift
  return TangentVector{X, xi};
}

std::vector<TangentVector> invariant_frame(const Point& Xp) {
  if (Xp.chart != Chart::Hyperboloid)
    throw std::invalid_argument("invariant_frame: need a hyperboloid point");
  const Vec& X = Xp.coords;
  const int n = Xp.dim();
  const double d = X[0] - X[1];
  std::vector<TangentVector> frame;
  frame.reserve(n);
  Vec f1 = Vec::Zero(n + 1);
  f1[0] = 1.0 / d;
  f1[1] = 1.0 / d;
  f1 -= X;
  frame.push_back(TangentVector{Xp, f1});
  for (int a = 2; a <= n; ++a) {
    Vec fa = Vec::Zero(n + 1);
    fa[0] = X[a] / d;
    fa[1] = X[a] / d;
    fa[a] = 1.0;
    frame.push_back(TangentVector{Xp, fa});
  }
  return frame;
}

// ---------------------------------------------------------------------------

namespace {
Mat eta_matrix(int n) {
  Mat eta = Mat::Identity(n + 1, n + 1);
  eta(0, 0) = -1.0;
  return eta;
}
}  // namespace

LorentzMap lorentz_identity(int n) {
  Mat id = Mat::Identity(n + 1, n + 1);
  return LorentzMap{id, id};
}

LorentzMap lorentz_rotation(int n, int axis_i, int axis_j, double angle) {
  if (axis_i < 1 || axis_i > n || axis_j < 1 || axis_j > n || axis_i == axis_j)
    throw std::invalid_argument("lorentz_rotation: invalid axis pair");
  Mat B = Mat::Identity(n + 1, n + 1);
  const double c = std::cos(angle), s = std::sin(angle);
  B(axis_i, axis_i) = c;
  B(axis_j, axis_j) = c;
  B(axis_i, axis_j) = s;
  B(axis_j, axis_i) = -s;
  return LorentzMap{B, B.transpose()};
}

LorentzMap lorentz_boost(int n, int axis, double rapidity) {
  if (axis < 1 || axis > n) throw std::invalid_argument("lorentz_boost: invalid axis");
  if (!std::isfinite(rapidity)) throw std::invalid_argument("lorentz_boost: rapidity must be finite");
  Mat B = Mat::Identity(n + 1, n + 1);
  const double c = std::cosh(rapidity), s = std::sinh(rapidity);
  B(0, 0) = c;
  B(axis, axis) = c;
  B(0, axis) = s;
  B(axis, 0) = s;
  return LorentzMap{B, B.transpose()};
}

LorentzMap lorentz_from_matrix(const Mat& B) {
  const int m = static_cast<int>(B.rows());
  if (B.cols() != m || m < 4) throw std::invalid_argument("lorentz_from_matrix: bad shape");
  const Mat eta = eta_matrix(m - 1);
  if ((B.transpose() * eta * B - eta).cwiseAbs().maxCoeff() > 1e-12)
    throw std::domain_error("lorentz_from_matrix: B^T eta B != eta");
  if (B(0, 0) <= 0.0)
    throw std::domain_error("lorentz_from_matrix: not orthochronous");
  return LorentzMap{B, B.transpose()};
}

LorentzMap compose(const LorentzMap& B1, const LorentzMap& B2) {
  Mat B = B1.matrix * B2.matrix;
  return LorentzMap{B, B.transpose()};
}

LorentzMap inverse(const LorentzMap& B) {
  const int m = static_cast<int>(B.matrix.rows());
  const Mat eta = eta_matrix(m - 1);
  Mat Bi = eta * B.matrix.transpose() * eta;  // eta B^T eta = B^{-1}
  return LorentzMap{Bi, Bi.transpose()};
}

Point apply(const LorentzMap& B, const Point& p) {
  const Point X = convert(p, Chart::Hyperboloid);
  Vec Y = B.matrix * X.coords;
  Point out{Chart::Hyperboloid, renormalize_hyperboloid(Y)};
  return convert(out, p.chart);
}

// ---------------------------------------------------------------------------

LapseFunction lapse_basis(int n, int mu) {
  if (mu < 0 || mu > n) throw std::invalid_argument("lapse_basis: mu out of range");
  Vec a = Vec::Zero(n + 1);
  a[mu] = 1.0;
  return LapseFunction{a};
}

LapseFunction act_lapse(const LorentzMap& B, const LapseFunction& V) {
  return LapseFunction{Vec(B.lapse_action * V.coeffs)};
}

double lapse_value(const LapseFunction& V, const Point& p) {
  const Point X = convert(p, Chart::Hyperboloid);
  return V.coeffs.dot(X.coords);
}

LapseData lapse_eval(const LapseFunction& V, const Point& p) {
  const int n = p.dim();
  if (V.n() != n) throw std::invalid_argument("lapse_eval: dimension mismatch");
  const Vec a = V.coeffs.tail(n);
  const double a0 = V.coeffs[0];
  LapseData out;
  Mat d2(n, n);

  switch (p.chart) {
    case Chart::Ball: {
      const Vec& x = p.coords;
      const double rh = rho(p);
      const double T = a0 + a.dot(x);
      out.value = T / rh - a0;
      out.gradient = a / rh + (T / (rh * rh)) * x;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          d2(i, j) = (a[i] * x[j] + a[j] * x[i]) / (rh * rh) +
                     T * ((i == j ? 1.0 : 0.0) / (rh * rh) +
                          2.0 * x[i] * x[j] / (rh * rh * rh));
      break;
    }
    case Chart::HalfSpace: {
      const Vec& y = p.coords;
      const double y1 = y[0];
      // V = p(y)/y^1 with p quadratic.
      const double pq = 0.5 * (a0 + a[0]) + 0.5 * (a0 - a[0]) * y.squaredNorm() +
                        a.tail(n - 1).dot(y.tail(n - 1));
      Vec dp = (a0 - a[0]) * y;
      for (int i = 1; i < n; ++i) dp[i] += a[i];
      out.value = pq / y1;
      out.gradient = dp / y1;
      out.gradient[0] -= pq / (y1 * y1);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double v = (i == j ? (a0 - a[0]) : 0.0) / y1;
          if (j == 0) v -= dp[i] / (y1 * y1);
          if (i == 0) v -= dp[j] / (y1 * y1);
          if (i == 0 && j == 0) v += 2.0 * pq / (y1 * y1 * y1);
          d2(i, j) = v;
        }
      break;
    }
    case Chart::Polar: {
      const double r = p.coords[0];
      const Vec theta = p.coords.tail(n);
      const Vec z = r * theta;
      const double ph = sinhc(r);
      const double php = radial_warp_ratio(r) * r;                  // phi'(r)
      const double phpp = (r < 0.1)
                              ? (1.0 / 3.0 + r * r / 10.0 + r * r * r * r / 168.0)
                              : ((r * r + 2.0) * std::sinh(r) - 2.0 * r * std::cosh(r)) /
                                    (r * r * r);
      const double az = a.dot(z);
      const Mat P = theta * theta.transpose();
      const Mat Q = Mat::Identity(n, n) - P;
      out.value = a0 * std::cosh(r) + ph * az;
      out.gradient = (a0 * std::sinh(r) + php * az) * theta + ph * a;
      d2 = a0 * (std::cosh(r) * P + ph * Q) + az * phpp * P +
           (a.dot(theta)) * php * Q + php * (theta * a.transpose() + a * theta.transpose());
      // the Q-part of d/dz [phi'(r) theta_i az]: phi' * Q a z / r = phi' (a.theta) Q  (done above)
      break;
    }
    case Chart::Hyperboloid:
      throw std::invalid_argument(
          "lapse_eval: gradient/hessian not defined for the hyperboloid chart; "
          "use lapse_value or convert the point");
  }

  const ChartFrame f = background(p);
  out.hessian = d2;
  for (int k = 0; k < n; ++k) out.hessian -= out.gradient[k] * f.gamma[k];
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Derivative of the ambient field along the i-th coordinate direction of
// p's chart, by Richardson-extrapolated central differences.
Vec ambient_partial(const AmbientField& zeta, const Point& p, int i, double h) {
  auto shifted = [&](double dt) {
    Point q = p;
    if (p.chart == Chart::Polar) {
      Vec z = polar_z(p);
      z[i] += dt;
      q = polar_from_z(z);
    } else {
      q.coords[i] += dt;
    }
    return convert(q, Chart::Hyperboloid);
  };
  const Vec d1 = (zeta(shifted(h)) - zeta(shifted(-h))) / (2.0 * h);
  const Vec d2 = (zeta(shifted(0.5 * h)) - zeta(shifted(-0.5 * h))) / h;
  return Vec((4.0 * d2 - d1) / 3.0);
}

}  // namespace

Mat pullback_difference(const AmbientField& zeta, const Point& p,
                        const PullbackOptions& opts, bool* warned) {
  if (p.chart != Chart::Ball && p.chart != Chart::Polar)
    throw std::invalid_argument("pullback_difference: evaluate in Ball or Polar chart");
  const int n = p.dim();
  const Point Xp = convert(p, Chart::Hyperboloid);
  const Vec& X = Xp.coords;

  // Push the chart coordinate basis to the ambient space.
  const Vec x = convert(p, Chart::Ball).coords;
  Mat E = ball_to_hyperboloid_jacobian(x);
  if (p.chart == Chart::Polar) E = Mat(E * chart_jacobian(p, Chart::Ball));

  const Vec xi = zeta(Xp);
  const double t = std::max(0.0, minkowski(xi, xi));
  if (warned) *warned = (std::sqrt(t) > opts.injectivity_guard);

  std::vector<Vec> Dxi(n);
  for (int i = 0; i < n; ++i) {
    Vec d = ambient_partial(zeta, p, i, opts.fd_step);
    d += minkowski(d, X) * X;  // project onto the tangent space
    Dxi[i] = d;
  }

  const double c = exp_c(t), s = exp_s(t);
  const double c2m1 = t * s * s;  // c^2 - 1 = t s^2 exactly
  const double q1 = pullback_q1(t), q2 = pullback_q2(t);

  Vec bxE(n), dT(n);
  for (int i = 0; i < n; ++i) {
    bxE[i] = minkowski(E.col(i), xi);
    dT[i] = 2.0 * minkowski(xi, Dxi[i]);
  }

  Mat out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      const double bij = minkowski(E.col(i), E.col(j));
      double v = c2m1 * bij;
      v += s * s * (minkowski(Dxi[i], Dxi[j]) - bxE[i] * bxE[j]);
      v += c * s * (minkowski(E.col(i), Dxi[j]) + minkowski(E.col(j), Dxi[i]));
      v += q1 * dT[i] * dT[j];
      v += q2 * (bxE[i] * dT[j] + bxE[j] * dT[i]);
      out(i, j) = v;
      out(j, i) = v;
    }
  return out;
}

Mat pullback_metric(const AmbientField& zeta, const Point& p,
                    const PullbackOptions& opts, bool* warned) {
  const ChartFrame f = background(p);
  return Mat(f.b + pullback_difference(zeta, p, opts, warned));
}

}  // namespace ahmass
