#pragma once

// Gauss-Legendre rules and product quadrature on unit spheres S^{d-1} in R^d.
// Product rules are closed-form for d in [2, 6]; above that a fixed-seed
// Monte Carlo rule is substituted (equal weights summing to the sphere area).

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace ahmass {

struct Quad1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre on [-1, 1].
Quad1D gauss_legendre(int order);
// Gauss-Legendre mapped to [a, b].
Quad1D gauss_legendre(int order, double a, double b);

// Area of the unit sphere S^{d-1} in R^d.
double sphere_area(int d);

struct SphereRule {
  int dim = 0;  // ambient dimension d, nodes are unit vectors in R^d
  std::vector<Eigen::VectorXd> nodes;
  std::vector<double> weights;
  bool monte_carlo = false;

  std::size_t size() const { return nodes.size(); }
};

// order >= 4 required. For dim > 6 a product rule would be prohibitive, so a
// Monte Carlo rule with `mc_nodes` samples (default 4096 * order) and the
// given seed is returned with monte_carlo = true.
SphereRule sphere_rule(int dim, int order, std::uint64_t mc_seed = 0x5eed,
                       int mc_nodes = 0);

}  // namespace ahmass
