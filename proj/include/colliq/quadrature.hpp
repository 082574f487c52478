// quadrature.hpp — Gauss-Legendre rules and singularity-absorbing panel maps.
#pragma once

#include <vector>

namespace colliq::quadrature {

struct Rule {
  std::vector<double> nodes;    // on (-1, 1), ascending
  std::vector<double> weights;  // positive, sum to 2
};

// n-point Gauss-Legendre rule on [-1, 1]; results are cached per n.
const Rule& gauss_legendre(int n);

// Nodes and weights mapped to [a, b].
Rule gauss_legendre_on(int n, double a, double b);

// Panel [a, b] split at the midpoint, each half mapped with an s^2 change of
// variable toward its outer endpoint so sqrt(x - a) and sqrt(b - x) factors in
// the integrand become analytic. n points per half.
Rule sqrt_endpoint_panel(int n, double a, double b);

}  // namespace colliq::quadrature
