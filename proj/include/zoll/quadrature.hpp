#pragma once

// Gauss-Legendre and Chebyshev-Gauss quadrature nodes on [-1, 1].

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace zoll {

struct QuadratureRule {
  std::vector<double> nodes;    // ascending
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule; exact for polynomials of degree <= 2n - 1.
// Nodes by Newton iteration on P_n with the usual Chebyshev initial guess.
inline QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1");
  QuadratureRule q;
  q.nodes.resize(n);
  q.weights.resize(n);
  const double pi = 3.14159265358979323846;
  for (int k = 0; k < (n + 1) / 2; ++k) {
    double x = std::cos(pi * (k + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // Legendre recurrence for P_n(x) and P'_n(x).
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    q.nodes[n - 1 - k] = x;
    q.weights[n - 1 - k] = w;
    q.nodes[k] = -x;
    q.weights[k] = w;
  }
  if (n % 2 == 1) q.nodes[n / 2] = 0.0;
  return q;
}

// Integrates f(c) / sqrt(1 - c^2) over [-1, 1] with the n-point
// Chebyshev-Gauss rule (all weights pi / n).
template <typename F>
double chebyshev_gauss_integral(F&& f, int n) {
  const double pi = 3.14159265358979323846;
  double acc = 0.0;
  for (int k = 1; k <= n; ++k) acc += f(std::cos(pi * (2.0 * k - 1.0) / (2.0 * n)));
  return acc * pi / n;
}

}  // namespace zoll
