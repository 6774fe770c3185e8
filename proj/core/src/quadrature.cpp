#include "ahmass/quadrature.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace ahmass {

Quad1D gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order >= 1");
  Quad1D q;
  q.nodes.resize(order);
  q.weights.resize(order);
  const int m = (order + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev initial guess, then Newton on P_order.
    double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < order; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
      }
      pp = order * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.nodes[i] = -x;
    q.nodes[order - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    q.weights[i] = w;
    q.weights[order - 1 - i] = w;
  }
  return q;
}

Quad1D gauss_legendre(int order, double a, double b) {
  Quad1D q = gauss_legendre(order);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < order; ++i) {
    q.nodes[i] = mid + half * q.nodes[i];
    q.weights[i] *= half;
  }
  return q;
}

double sphere_area(int d) {
  return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

namespace {

// 1D rule for integrals  int_{-1}^{1} f(t) (1 - t^2)^{(d-3)/2} dt  appearing
// in the recursive slicing of S^{d-1}.  Odd d folds the polynomial weight
// into Gauss-Legendre; even d uses Gauss-Chebyshev of the second kind and
// folds the remaining (1 - t^2)^{(d-4)/2}.
Quad1D slice_rule(int d, int order) {
  Quad1D q;
  if (d % 2 == 1) {
    q = gauss_legendre(order);
    const int pw = (d - 3) / 2;
    for (int i = 0; i < order; ++i)
      q.weights[i] *= std::pow(1.0 - q.nodes[i] * q.nodes[i], pw);
  } else {
    q.nodes.resize(order);
    q.weights.resize(order);
    const int pw = (d - 4) / 2;
    for (int k = 1; k <= order; ++k) {
      const double ang = k * M_PI / (order + 1.0);
      const double t = std::cos(ang);
      q.nodes[k - 1] = t;
      q.weights[k - 1] = (M_PI / (order + 1.0)) * std::sin(ang) * std::sin(ang) *
                         std::pow(1.0 - t * t, pw);
    }
  }
  return q;
}

void build_recursive(int d, int order, std::vector<Eigen::VectorXd>& nodes,
                     std::vector<double>& weights) {
  if (d == 2) {
    const int m = std::max(4, 2 * order);
    for (int j = 0; j < m; ++j) {
      const double phi = 2.0 * M_PI * j / m;
      Eigen::VectorXd u(2);
      u << std::cos(phi), std::sin(phi);
      nodes.push_back(u);
      weights.push_back(2.0 * M_PI / m);
    }
    return;
  }
  std::vector<Eigen::VectorXd> sub_nodes;
  std::vector<double> sub_weights;
  build_recursive(d - 1, order, sub_nodes, sub_weights);
  const Quad1D q = slice_rule(d, order);
  for (std::size_t a = 0; a < q.nodes.size(); ++a) {
    const double t = q.nodes[a];
    const double rad = std::sqrt(std::max(0.0, 1.0 - t * t));
    for (std::size_t b = 0; b < sub_nodes.size(); ++b) {
      Eigen::VectorXd u(d);
      u[0] = t;
      u.tail(d - 1) = rad * sub_nodes[b];
      nodes.push_back(u);
      weights.push_back(q.weights[a] * sub_weights[b]);
    }
  }
}

}  // namespace

SphereRule sphere_rule(int dim, int order, std::uint64_t mc_seed, int mc_nodes) {
  if (dim < 2) throw std::invalid_argument("sphere_rule: dim >= 2");
  if (order < 4) throw std::invalid_argument("sphere_rule: order >= 4");
  SphereRule rule;
  rule.dim = dim;
  if (dim <= 6) {
    build_recursive(dim, order, rule.nodes, rule.weights);
    return rule;
  }
  // Product rules above d = 6 are a cost hazard; fall back to Monte Carlo.
  rule.monte_carlo = true;
  const int m = mc_nodes > 0 ? mc_nodes : 4096 * order;
  std::mt19937_64 rng(mc_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double w = sphere_area(dim) / m;
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd u(dim);
    for (int k = 0; k < dim; ++k) u[k] = gauss(rng);
    rule.nodes.push_back(u.normalized());
    rule.weights.push_back(w);
  }
  return rule;
}

}  // namespace ahmass
