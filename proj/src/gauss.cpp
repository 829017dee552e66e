#include "quasispec/gauss.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace quasispec {
namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

Rule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p = 0, dp = 0;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(n, x, p, dp);
    r.nodes[n - 1 - i] = x;
    r.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

Rule gauss_lobatto(int n) {
  if (n < 2) throw std::invalid_argument("gauss_lobatto: n < 2");
  const int N = n - 1;
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  r.nodes[0] = -1.0;
  r.nodes[N] = 1.0;
  for (int i = 1; i < N; ++i) {
    // Interior nodes are the roots of P_N'; Newton with P_N'' from Legendre's equation.
    double x = -std::cos(std::numbers::pi * i / N);
    for (int it = 0; it < 100; ++it) {
      double p = 0, dp = 0;
      legendre(N, x, p, dp);
      const double d2p = (2.0 * x * dp - N * (N + 1) * p) / (1.0 - x * x);
      const double dx = dp / d2p;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes[i] = x;
  }
  for (int i = 0; i < n; ++i) {
    double p = 0, dp = 0;
    const double x = r.nodes[i];
    if (i == 0 || i == N) {
      p = (i == 0 && N % 2 == 1) ? -1.0 : 1.0;
    } else {
      legendre(N, x, p, dp);
    }
    r.weights[i] = 2.0 / (N * (N + 1) * p * p);
  }
  return r;
}

std::vector<double> lagrange_basis(const std::vector<double>& nodes, double t) {
  const std::size_t m = nodes.size();
  std::vector<double> l(m, 1.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (j != i) l[i] *= (t - nodes[j]) / (nodes[i] - nodes[j]);
  return l;
}

GaussTableau gauss_tableau(int stages) {
  const Rule gl = gauss_legendre(stages);
  GaussTableau t;
  t.stages = stages;
  t.c.resize(stages);
  t.b.resize(stages);
  t.a.assign(stages * stages, 0.0);
  for (int i = 0; i < stages; ++i) {
    t.c[i] = 0.5 * (gl.nodes[i] + 1.0);
    t.b[i] = 0.5 * gl.weights[i];
  }
  // a_ij = int_0^{c_i} l_j(s) ds, exact with an s-point Gauss rule.
  for (int i = 0; i < stages; ++i) {
    for (int q = 0; q < stages; ++q) {
      const double s = 0.5 * t.c[i] * (gl.nodes[q] + 1.0);
      const auto l = lagrange_basis(t.c, s);
      for (int j = 0; j < stages; ++j)
        t.a[i * stages + j] += 0.5 * t.c[i] * gl.weights[q] * l[j];
    }
  }
  return t;
}

}  // namespace quasispec
