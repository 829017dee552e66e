#pragma once

#include <vector>

namespace quasispec {

/// Quadrature rule on [-1, 1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

Rule gauss_legendre(int n);

/// Lobatto rule with n >= 2 nodes, both endpoints included.
Rule gauss_lobatto(int n);

/// Butcher tableau of the s-stage Gauss–Legendre collocation method (order 2s).
struct GaussTableau {
  int stages = 0;
  std::vector<double> c;
  std::vector<double> b;
  std::vector<double> a;  // row-major, stages x stages

  double A(int i, int j) const { return a[i * stages + j]; }
};

GaussTableau gauss_tableau(int stages);

/// Lagrange basis on the given nodes evaluated at t.
std::vector<double> lagrange_basis(const std::vector<double>& nodes, double t);

}  // namespace quasispec
