#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "quasispec/eigensystem.hpp"

namespace quasispec {

/// P_n f = sum_{k <= n} (f, w_k) y_k on a quadrature grid of >= 2048 nodes.
struct ProjectorMatrix {
  int n = 0;
  std::shared_ptr<const Grid> grid;
  Eigen::MatrixXcd y_block;  // nodes x n
  Eigen::MatrixXcd dy_block; // panel layout x n, classical derivative y^[1] + u y
  Eigen::MatrixXcd w_block;  // nodes x n

  std::vector<cd> apply(std::span<const cd> f) const;
  /// Numerical rank of the Gram matrix of y_block (relative threshold 1e-8).
  int rank() const;
};

/// Grid used by projectors and resolvents for p.
std::shared_ptr<const Grid> operator_grid(const Potential& p, std::size_t min_nodes = 2048);

/// ContourConflict when |lambda| = (n + 1/2)^2 does not enclose exactly n
/// eigenvalues or a multiple eigenvalue straddles index n.
ProjectorMatrix build_projector(const Potential& p, int n, const StripParams& sp = StripParams(1.0),
                                std::shared_ptr<const Grid> grid = nullptr);

/// sup ||P f||_{W_2^1} / ||f||_{L_2} on the grid, ||g||^2_{W_2^1} = ||g||^2 + ||g'||^2.
double norm_L2_to_W21(const ProjectorMatrix& P);
/// Same norm for P - Q (both on the same grid).
double norm_L2_to_W21(const ProjectorMatrix& P, const ProjectorMatrix& Q);

/// max over test functions of ||P P f - P f|| / ||f||.
double idempotency_defect(const ProjectorMatrix& P, const std::vector<std::vector<cd>>& tests);

struct ContinuityStep {
  double t = 0.0;
  double norm = 0.0;
  bool skipped = false;
  std::string note;
};

/// ||P_n(u0 + t d) - P_n(u0)||_{L2 -> W21} for t = t0 / 2^k, k = 0..halvings.
std::vector<ContinuityStep> continuity_experiment(const Potential& u0, const Potential& direction,
                                                  double sigma, int n, int halvings, double t0 = 0.5,
                                                  const StripParams& sp = StripParams(1.0));

/// (L - lambda)^{-1} through the Green function phi(min) psi(max) / W, with
/// phi vanishing at 0 and psi integrated backward from pi.
class Resolvent {
 public:
  Resolvent(const Potential& p, cd lambda, std::shared_ptr<const Grid> grid);
  std::vector<cd> apply(std::span<const cd> f) const;
  cd lambda() const { return lambda_; }
  const Grid& grid() const { return *grid_; }

 private:
  cd lambda_;
  std::shared_ptr<const Grid> grid_;
  std::vector<cd> phi_;
  std::vector<cd> psi_;
  cd wronskian_;
};

/// Largest singular value, in the grid L2 norm, of a linear operator whose
/// kernel is symmetric (so its adjoint is f -> conj(op(conj f))).
double symmetric_operator_norm(const std::function<std::vector<cd>(std::span<const cd>)>& op,
                               const Grid& grid);

/// Smallest |lambda - lambda_n| over the spectrum of p.
double spectral_margin(const Potential& p, cd lambda);

/// ||(L_eps - lambda)^{-1} - (L - lambda)^{-1}||_{L2 -> L2}; IllConditionedResolvent
/// when lambda is within 0.5 of either spectrum.
double resolvent_distance(const Potential& p, const Potential& p_eps, cd lambda,
                          std::size_t min_nodes = 2048);

/// ||R(lambda) - R(mu) - (lambda - mu) R(lambda) R(mu)|| on the grid.
double resolvent_identity_defect(const Potential& p, cd lambda, cd mu, std::size_t min_nodes = 2048);

struct ResolventStep {
  double eps = 0.0;
  double distance = 0.0;
};

/// Distances for eps = eps0 / 2^k, k = 0..halvings, with u_eps = mollify(u, eps).
std::vector<ResolventStep> resolvent_experiment(const Potential& p, cd lambda, double eps0, int halvings);

}  // namespace quasispec
