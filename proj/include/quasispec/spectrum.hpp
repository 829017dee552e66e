#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "quasispec/common.hpp"
#include "quasispec/potential.hpp"
#include "quasispec/quasiode.hpp"

namespace quasispec {

/// One index of the spectrum. A root of multiplicity p occupies p
/// consecutive indices, each carrying the same lambda.
struct SpectralDatum {
  int n = 0;
  cd lambda;
  cd rho;  // principal square root
  int multiplicity = 1;
  cd s;    // rho - n
};

struct LocalizeOptions {
  double tol_root = 1e-9;      // |omega| < tol_root * max(1, |lambda|)
  double tol_update = 1e-10;   // relative Newton update
  int initial_block = 6;       // first disk radius is (M + 1/2)^2 with M this
  bool verify_count = true;    // final winding check on |lambda| = (N + 1/2)^2
  OdeOptions ode;
};

/// Number of zeros of omega(pi, .) inside |lambda| < radius_sq, counted with
/// multiplicity. ContourTooClose when a zero sits on the circle.
int count_in_disk(const Potential& p, double radius_sq, const OdeOptions& opts = {});

/// Zeros inside the axis-parallel rectangle [lo, hi] (counterclockwise winding).
int count_in_rectangle(const Potential& p, cd lo, cd hi, const OdeOptions& opts = {});

/// First N eigenvalues, sorted by (|lambda|, arg lambda) and numbered from 1.
std::vector<SpectralDatum> localize(const Potential& p, int N, const StripParams& sp,
                                    const LocalizeOptions& opts = {});

/// Winding number of omega(pi, .) on a small circle around lambda0.
int multiplicity_at(const Potential& p, cd lambda0, const OdeOptions& opts = {});

/// Sequence s_n and its weighted l2^sigma sums, sum |s_k|^2 k^(2 sigma).
struct RemainderReport {
  double sigma = 0.0;
  std::vector<cd> s_seq;              // s_1, s_2, ...
  std::vector<double> tail_profile;   // partial sums up to each index
  double weighted_sum = 0.0;

  double norm() const;
  /// Relative growth of the partial sums over the last ten indices.
  double last_decade_increment() const;
};

RemainderReport remainders(const std::vector<SpectralDatum>& data, double sigma);

/// Cosine series of degree K with complex Gaussian coefficients damped by
/// (1 + k^2)^(-sigma - 0.51), rescaled to sobolev_norm(u, sigma) = R.
Potential random_ball_potential(std::mt19937_64& rng, double R, double sigma, int K = 64);

struct SweepReport {
  double radius = 0.0;
  double sigma = 0.0;
  int samples = 0;
  int N = 0;
  std::uint64_t seed = 0;
  std::vector<double> norms;  // ||{s_n}||_sigma per sample
  std::vector<double> last_decade_increments;
  double max_norm = 0.0;
  double median_norm = 0.0;
};

SweepReport ball_sweep(double R, double sigma, int samples, int N, std::uint64_t seed,
                       const LocalizeOptions& opts = {});

/// The potentials a sweep with these parameters draws, in order.
std::vector<Potential> ball_sample(double R, double sigma, int samples, std::uint64_t seed);

/// Rows: n, Re lambda, Im lambda, Re s, Im s, multiplicity.
void write_csv(std::ostream& os, const std::vector<SpectralDatum>& data);

}  // namespace quasispec
