#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include "quasispec/grid.hpp"
#include "quasispec/potential.hpp"
#include "quasispec/spectrum.hpp"

namespace quasispec {

/// Shared node grid for eigenfunction work: at least 4096 Lobatto nodes,
/// panel edges at every breakpoint.
std::shared_ptr<const Grid> eigen_grid(const Potential& p, std::size_t min_nodes = 4096);

/// y_n (node layout), unit L2 norm, rotated so that (y, sin nx) >= 0. Members
/// of a root chain share the scale factor of their eigenfunction.
struct EigenFunction {
  SpectralDatum datum;
  std::shared_ptr<const Grid> grid;
  std::vector<cd> y;
  std::vector<cd> y1;
  int chain_index = 0;
};

/// w_n with (y_n, w_m) = delta; w1 is its quasi-derivative with respect to conj(u).
struct BiorthElement {
  SpectralDatum datum;
  std::shared_ptr<const Grid> grid;
  std::vector<cd> w;
  std::vector<cd> w1;
};

EigenFunction eigenfunction(const Potential& p, const SpectralDatum& d,
                            std::shared_ptr<const Grid> grid);

/// omega^{(j)}(x, lambda_n), j < multiplicity, all scaled like the eigenfunction.
std::vector<EigenFunction> root_chain(const Potential& p, const SpectralDatum& d,
                                      std::shared_ptr<const Grid> grid);

/// Biorthogonal elements for one cluster (a root chain, or a single eigenfunction).
std::vector<BiorthElement> biorthogonal(const Potential& p, const std::vector<EigenFunction>& chain);

/// Root functions and their biorthogonal partners for consecutive data;
/// clusters are the runs of a multiple eigenvalue.
struct EigenSystem {
  std::shared_ptr<const Grid> grid;
  std::vector<EigenFunction> y;
  std::vector<BiorthElement> w;
};

EigenSystem eigensystem(const Potential& p, const std::vector<SpectralDatum>& data,
                        std::shared_ptr<const Grid> grid);

/// max |(y_n, w_m) - delta_nm| over the system.
double biorthogonality_defect(const EigenSystem& sys);

struct EfasReport {
  double sigma = 0.0;
  int start_index = 0;  // first N with |rho_n - n| < 1/4 for all n >= N in range
  std::vector<int> n;
  std::vector<double> beta;
  std::vector<double> gamma;
  std::vector<double> partial_sums;  // sum_{k = N}^{n} (beta^2 + gamma^2) k^(2 sigma)
  double weighted_sum = 0.0;

  /// Relative growth of the partial sums over the last ten indices.
  double last_decade_increment() const;
};

/// Remainders of y_n, w_n and their quasi-derivatives against sqrt(2/pi) sin nx,
/// cos nx for the consecutive data n = 1..data.size(). Reported indices start at n_lo.
EfasReport efas_report(const Potential& p, const std::vector<SpectralDatum>& data, int n_lo,
                       double sigma, std::shared_ptr<const Grid> grid = nullptr);

/// lambda_max / lambda_min of the Gram matrix (y_i, y_j), i, j <= data.size().
double gram_condition(const Potential& p, const std::vector<SpectralDatum>& data,
                      std::shared_ptr<const Grid> grid = nullptr);

/// Rows: n, beta, gamma.
void write_csv(std::ostream& os, const EfasReport& report);

}  // namespace quasispec
