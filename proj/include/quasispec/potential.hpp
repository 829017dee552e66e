#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "quasispec/common.hpp"

namespace quasispec {

/// Polynomial sum_j coeffs[j] x^j on [from, to] (global variable x).
struct PolyPiece {
  double from = 0.0;
  double to = 0.0;
  std::vector<cd> coeffs;
};

/// Step of the given height at `at`; u is right-continuous there.
struct Jump {
  double at = 0.0;
  cd height;
};

/// sum_k cos[k] cos(kx) (k >= 0) + sum_k sin[k] sin((k+1)x).
struct TrigSeries {
  std::vector<cd> cos;
  std::vector<cd> sin;
};

/// Maximal subinterval on which u is a single polynomial + constant + trig.
struct Segment {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<cd> poly;  // includes the accumulated jump heights in poly[0]
};

/// Antiderivative u in L2[0, pi] of the distributional potential q = u'.
/// Immutable after construction.
class Potential {
 public:
  Potential();
  Potential(std::vector<PolyPiece> pieces, std::vector<Jump> jumps, TrigSeries trig);

  static Potential zero();
  static Potential constant(cd c);
  /// u = intercept + slope * x, i.e. q == slope.
  static Potential linear(cd slope, cd intercept = 0.0);
  /// u = height * H(x - at), i.e. q = height * delta(x - at).
  static Potential step(double at, cd height);
  static Potential cosine_series(std::vector<cd> coeffs);

  const std::vector<PolyPiece>& pieces() const { return pieces_; }
  const std::vector<Jump>& jumps() const { return jumps_; }
  const TrigSeries& trig() const { return trig_; }
  const std::vector<Segment>& segments() const { return segments_; }

  bool is_real() const { return is_real_; }
  bool is_zero() const;
  /// No trig part and every piece of degree 0: exact transfer matrices apply.
  bool is_piecewise_constant() const;
  /// Interior piece edges and jump locations, sorted.
  std::vector<double> breakpoints() const;
  int trig_degree() const;

  /// Right limit at x (the value at non-jump points). Throws Domain outside [0, pi].
  cd operator()(double x) const;
  cd left_limit(double x) const;
  cd eval_segment(std::size_t segment, double x) const;
  std::size_t segment_index(double x) const;

  Potential conj() const;
  Potential scaled(cd factor) const;
  /// this + factor * other.
  Potential plus(const Potential& other, cd factor = 1.0) const;

 private:
  void build_segments();

  std::vector<PolyPiece> pieces_;
  std::vector<Jump> jumps_;
  TrigSeries trig_;
  std::vector<Segment> segments_;
  bool is_real_ = true;
};

/// Strip half-width nu, kappa = cosh(2 pi nu), ball radius R and smoothness sigma.
struct StripParams {
  StripParams(double nu = 0.0, double ball_radius = 0.0, double smoothness = 0.0);

  double nu;
  double kappa;
  double ball_radius;
  double smoothness;
};

cd eval_u(const Potential& p, double x);

/// Cosine-series norm ||u||_sigma = (sum_k (1+k^2)^sigma |c_k|^2)^{1/2}, c_k the
/// coefficients of u in the orthonormal basis {1/sqrt(pi), sqrt(2/pi) cos kx}.
/// Returns +inf when the series diverges (steps at sigma >= 1/2).
double sobolev_norm(const Potential& p, double sigma);

/// Identifier recorded in reports for the norm above.
inline constexpr const char* kNormConvention = "cosine-even-extension:(1+k^2)^sigma";

/// c_k in the orthonormal cosine basis, closed form.
cd cosine_coefficient(const Potential& p, int k);

/// int_lo^hi u(t) exp(i omega t) dt in closed form.
cd windowed_fourier(const Potential& p, double lo, double hi, cd omega);

/// F(rho) = int_0^pi u(x) exp(i rho x) dx.
cd fourier_strip(const Potential& p, cd rho);
/// As above; Argument error when |Im rho| > sp.nu.
cd fourier_strip(const Potential& p, cd rho, const StripParams& sp);

/// c_n(x) = int_0^x u(t) exp(i rho_n t) dt, n = 1, 2, ...; requires |rho_n - n| < 1/4.
std::vector<cd> windowed_transform_seq(const Potential& p, double x,
                                       std::span<const cd> rhos);

/// Truncation of the cosine series of u at frequency ceil(1/eps).
Potential mollify(const Potential& p, double eps);

double l2_norm(const Potential& p);
double l2_distance(const Potential& a, const Potential& b);

Potential potential_from_json(const nlohmann::json& j);
nlohmann::json potential_to_json(const Potential& p);

}  // namespace quasispec
