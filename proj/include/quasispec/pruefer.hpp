#pragma once

#include <vector>

#include "quasispec/common.hpp"
#include "quasispec/grid.hpp"
#include "quasispec/potential.hpp"
#include "quasispec/quasiode.hpp"

namespace quasispec {

/// Modified Prüfer variables of s(x, rho) on a Lobatto grid:
/// rho s = r sin(theta), s^[1] = r cos(theta), theta = rho x + f_pert.
struct PrueferField {
  cd rho;
  std::vector<double> grid;
  std::vector<cd> theta;
  std::vector<cd> f_pert;
  std::vector<cd> r_amp;  // empty until amplitude() runs
  double upsilon = 0.0;
  int iterations = 0;
  /// sup |f_pert| / upsilon, the observed constant of the perturbation bound.
  double ratio = 0.0;
};

/// Terms of the smallness functional.
struct UpsilonParts {
  double oscillatory = 0.0;  // max_x |int u sin 2 rho t| + |int u cos 2 rho t|
  double radius_term = 0.0;  // R^2 (1 + kappa + R kappa^2) / (2 |rho|)
  double value = 0.0;
  double threshold = 0.0;    // 2^-7 (1 + 64 R^2 kappa^2)^-2
};

UpsilonParts upsilon_parts(const Potential& p, cd rho, const StripParams& sp);
double upsilon(const Potential& p, cd rho, const StripParams& sp);
bool condition_holds(const Potential& p, cd rho, const StripParams& sp);

/// Picard iteration for theta from theta^0 = rho x. Refuses when the
/// contraction condition fails; Convergence error after 200 iterations.
PrueferField solve_phase(const Potential& p, cd rho, const StripParams& sp);

/// Fills r_amp by quadrature over the solved phase.
PrueferField amplitude(PrueferField field, const Potential& p);

/// y = r sin(theta) / rho, y^[1] = r cos(theta) at lambda = rho^2.
SolutionTrace reconstruct(const PrueferField& field);

/// Lobatto grid used for a given (p, rho): at least 20 points per pi/|rho|.
Grid pruefer_grid(const Potential& p, cd rho);

namespace detail {
/// The same iteration without the contraction gate; for diagnostics outside
/// the lemma's hypothesis. `max_iterations` caps the loop without throwing;
/// field.iterations < 0 marks non-convergence.
PrueferField picard_unguarded(const Potential& p, cd rho, const StripParams& sp,
                              int max_iterations = 200);
/// sup_x |theta - rhs(theta)| for a solved field.
double fixed_point_residual(const PrueferField& field, const Potential& p);
}  // namespace detail

}  // namespace quasispec
