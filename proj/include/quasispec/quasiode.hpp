#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "quasispec/common.hpp"
#include "quasispec/grid.hpp"
#include "quasispec/potential.hpp"

namespace quasispec {

/// Samples of y and the quasi-derivative y^[1] = y' - u y at one lambda.
struct SolutionTrace {
  cd lambda;
  std::vector<double> grid;
  std::vector<cd> y;
  std::vector<cd> y1;
};

/// omega^{(j)}(x, lambda0), j = 0..order: Taylor coefficients in lambda of the
/// characteristic solution, each solving l(w_j) = lambda w_j + w_{j-1}.
struct ChainTrace {
  cd lambda0;
  int order = 0;
  std::vector<SolutionTrace> traces;
};

struct OdeOptions {
  double rel_tol = 1e-10;  // Richardson estimate of the full-step error
  int stages = 6;
  /// Use exact transfer matrices when u is piecewise constant.
  bool transfer_fast_path = true;
};

/// Right-hand side f of l(y) = lambda y + f.
using Forcing = std::function<cd(double)>;

/// Solves y' = u y + y^[1], (y^[1])' = (-lambda - u^2) y - u y^[1] - f from
/// (y, y^[1])(from) = init towards `to` (either direction). The trace is
/// sampled at `samples` within the covered interval, or at the breakpoints
/// and both ends when `samples` is empty. Grid is returned increasing.
SolutionTrace integrate(const Potential& p, cd lambda, std::array<cd, 2> init,
                        double from, double to, std::span<const double> samples = {},
                        const Forcing& forcing = {}, const OdeOptions& opts = {});

/// omega(pi, lambda) with omega(0) = 0, omega^[1](0) = 1.
cd char_function(const Potential& p, cd lambda, const OdeOptions& opts = {});

/// omega(pi, lambda) = mantissa * exp(log_scale); never overflows.
struct ScaledValue {
  cd mantissa;
  double log_scale = 0.0;
};
ScaledValue char_function_scaled(const Potential& p, cd lambda, const OdeOptions& opts = {});

/// omega^{(j)}(pi, lambda), j = 0..up_to.
std::vector<cd> char_chain_values(const Potential& p, cd lambda, int up_to,
                                  const OdeOptions& opts = {});

ChainTrace char_chain(const Potential& p, cd lambda0, int up_to,
                      std::span<const double> samples = {}, const OdeOptions& opts = {});

/// v w^[1] - w v^[1] at sample i; constant in x for traces at the same lambda.
cd wronskian(const SolutionTrace& v, const SolutionTrace& w, std::size_t i);

/// u sampled in the grid's panel layout (left limits at panel ends).
std::vector<cd> panel_values(const Potential& p, const Grid& grid);

/// A function of the operator domain sampled on a grid (node layout).
struct DomainFunction {
  std::vector<cd> f;
  std::vector<cd> f1;  // quasi-derivative with respect to the operator's potential
};

/// l(f) = -(f^[1])' - u f^[1] - u^2 f in panel layout; (f^[1])' by panelwise
/// spectral differentiation.
std::vector<cd> apply_operator(const Potential& p, const Grid& grid, const DomainFunction& f);

/// |(L f, g) - (f, conj(L) g)| with g in the domain of the adjoint (potential conj(u)).
double lagrange_defect(const Potential& p, const Grid& grid, const DomainFunction& f,
                       const DomainFunction& g);

/// CSV rows: x, Re y, Im y, Re y1, Im y1.
void write_csv(std::ostream& os, const SolutionTrace& trace);

}  // namespace quasispec
