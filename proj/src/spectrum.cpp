#include "quasispec/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>

#include "quasispec/parallel.hpp"

namespace quasispec {
namespace {

// |omega| normalized by its free growth max(1,|rho|) exp(-|Im rho| pi).
const double kLogFloor = std::log(1e-10);
constexpr double kArgStep = kPi / 4;
constexpr int kMaxBisection = 30;
constexpr double kSplits[] = {0.5713, 0.4379, 0.6231, 0.3817, 0.5329, 0.4651};

struct Sample {
  cd unit;
  double log_mag;
};

Error too_close(cd center, double radius) {
  Error e(ErrorKind::ContourTooClose, "contour passes too close to an eigenvalue");
  e.center = center;
  e.radius = radius;
  return e;
}

Error localization_error(const std::string& what, cd center, double radius) {
  Error e(ErrorKind::Localization, what);
  e.center = center;
  e.radius = radius;
  return e;
}

class ContourCounter {
 public:
  ContourCounter(const Potential& p, const OdeOptions& opts, cd center, double radius)
      : p_(p), opts_(opts), center_(center), radius_(radius) {}

  Sample sample(cd lambda) const {
    const auto v = char_function_scaled(p_, lambda, opts_);
    const double m = std::abs(v.mantissa);
    const cd rho = principal_sqrt(lambda);
    const double log_mag = m > 0.0 ? std::log(m) + v.log_scale + std::log(std::max(1.0, std::abs(rho))) -
                                         std::abs(rho.imag()) * kPi
                                   : -std::numeric_limits<double>::infinity();
    if (!(log_mag > kLogFloor)) throw too_close(center_, radius_);
    return {v.mantissa / m, log_mag};
  }

  /// Argument increment of omega along the polyline through `vertices`
  /// (closed by the caller), with `counts[i]` initial samples on edge i.
  double arg_increment(const std::vector<cd>& vertices, const std::vector<int>& counts) const {
    std::vector<cd> points;
    for (std::size_t e = 0; e + 1 < vertices.size(); ++e)
      for (int k = 0; k < counts[e]; ++k)
        points.push_back(vertices[e] + (vertices[e + 1] - vertices[e]) * (double(k) / counts[e]));
    points.push_back(vertices.back());
    return sampled_increment(points, [](cd a, cd b, double) { return 0.5 * (a + b); });
  }

  double circle_increment(cd center, double radius, int count) const {
    std::vector<cd> points(count + 1);
    for (int k = 0; k <= count; ++k)
      points[k] = center + radius * std::exp(kI * (2.0 * kPi * k / count - kPi + 1e-3));
    return sampled_increment(points, [center, radius](cd a, cd b, double) {
      const double ta = std::arg(a - center), tb = std::arg(b - center);
      double d = tb - ta;
      if (d < 0) d += 2.0 * kPi;
      return center + radius * std::exp(kI * (ta + 0.5 * d));
    });
  }

  int winding(double increment) const {
    const double w = increment / (2.0 * kPi);
    const long n = std::lround(w);
    if (std::abs(w - n) > 0.1) throw too_close(center_, radius_);
    return static_cast<int>(n);
  }

 private:
  template <typename Mid>
  double sampled_increment(const std::vector<cd>& points, Mid mid) const {
    std::vector<Sample> s(points.size());
    parallel_for(points.size(), [&](std::size_t i) { s[i] = sample(points[i]); });
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
      total += refine(points[i], points[i + 1], s[i], s[i + 1], mid, 0);
    return total;
  }

  template <typename Mid>
  double refine(cd a, cd b, const Sample& sa, const Sample& sb, Mid& mid, int depth) const {
    const double d = std::arg(sb.unit / sa.unit);
    if (std::abs(d) <= kArgStep) return d;
    if (depth >= kMaxBisection) throw too_close(center_, radius_);
    const cd m = mid(a, b, 0.0);
    const Sample sm = sample(m);
    return refine(a, m, sa, sm, mid, depth + 1) + refine(m, b, sm, sb, mid, depth + 1);
  }

  const Potential& p_;
  const OdeOptions& opts_;
  cd center_;
  double radius_;
};

/// Rough length of the edge in the rho variable; omega turns by about pi per unit.
double rho_length(cd a, cd b) {
  const double d = std::abs(b - a);
  return d / (2.0 * std::sqrt(std::max(1.0, std::min(std::abs(a), std::abs(b))))) + std::sqrt(d);
}

std::optional<cd> newton(const Potential& p, cd start, int k, const LocalizeOptions& opts) {
  cd lambda = start;
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 50; ++it) {
    const auto v = char_chain_values(p, lambda, 1, opts.ode);
    if (!std::isfinite(std::abs(v[0])) || std::abs(v[1]) == 0.0) return std::nullopt;
    const cd step = double(k) * v[0] / v[1];
    lambda -= step;
    if (!std::isfinite(std::abs(lambda))) return std::nullopt;
    const double scale = std::max(1.0, std::abs(lambda));
    const double size = std::abs(step);
    const bool small = size <= opts.tol_update * scale;
    const bool stalled = k > 1 && size <= 1e-6 * scale && size >= 0.5 * prev;
    if (small || stalled || std::abs(v[0]) == 0.0) {
      if (std::abs(char_function(p, lambda, opts.ode)) < opts.tol_root * scale) return lambda;
      if (small) return std::nullopt;
    }
    prev = size;
  }
  return std::nullopt;
}

bool inside(cd lo, cd hi, cd z, double slack) {
  return z.real() >= lo.real() - slack && z.real() <= hi.real() + slack &&
         z.imag() >= lo.imag() - slack && z.imag() <= hi.imag() + slack;
}

struct Root {
  cd lambda;
  int multiplicity;
};

void quadtree(const Potential& p, cd lo, cd hi, int count, int depth, std::vector<Root>& out,
              const LocalizeOptions& opts) {
  if (count <= 0) return;
  const cd center = 0.5 * (lo + hi);
  const double diam = std::abs(hi - lo);
  const double slack = 1e-9 * std::max(1.0, std::abs(center));
  if (count == 1) {
    if (auto r = newton(p, center, 1, opts); r && inside(lo, hi, *r, slack)) {
      out.push_back({*r, 1});
      return;
    }
  } else if (diam < 1e-3 * std::max(1.0, std::abs(center))) {
    if (auto r = newton(p, center, count, opts); r && inside(lo, hi, *r, diam)) {
      try {
        if (multiplicity_at(p, *r, opts.ode) == count) {
          out.push_back({*r, count});
          return;
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::MultiplicityUndetermined) throw;
      }
    }
  }
  if (depth > 48) throw localization_error("localize: subdivision depth exhausted", center, 0.5 * diam);
  constexpr int kAttempts = sizeof(kSplits) / sizeof(kSplits[0]);
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    const double fx = kSplits[attempt], fy = kSplits[(attempt + 1) % kAttempts];
    const double xm = lo.real() + fx * (hi.real() - lo.real());
    const double ym = lo.imag() + fy * (hi.imag() - lo.imag());
    const std::array<std::pair<cd, cd>, 4> kids = {{{lo, {xm, ym}},
                                                    {{xm, lo.imag()}, {hi.real(), ym}},
                                                    {{lo.real(), ym}, {xm, hi.imag()}},
                                                    {{xm, ym}, hi}}};
    std::array<int, 4> counts{};
    try {
      for (int k = 0; k < 4; ++k) counts[k] = count_in_rectangle(p, kids[k].first, kids[k].second, opts.ode);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ContourTooClose) throw;
      continue;
    }
    if (counts[0] + counts[1] + counts[2] + counts[3] != count) continue;
    for (int k = 0; k < 4; ++k) quadtree(p, kids[k].first, kids[k].second, counts[k], depth + 1, out, opts);
    return;
  }
  throw localization_error("localize: no admissible subdivision", center, 0.5 * diam);
}

/// Quadtree over [lo, hi]; the outer rectangle is nudged when a root sits on it.
std::vector<Root> roots_in_rectangle(const Potential& p, cd lo, cd hi, const LocalizeOptions& opts) {
  for (int attempt = 0; attempt < 6; ++attempt) {
    const cd grow = (hi - lo) * (0.0137 * attempt);
    const cd l = lo - cd(grow.real() * 0.71, grow.imag() * 0.53);
    const cd h = hi + cd(grow.real() * 0.29, grow.imag() * 0.47);
    int count = 0;
    try {
      count = count_in_rectangle(p, l, h, opts.ode);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ContourTooClose) throw;
      continue;
    }
    std::vector<Root> out;
    quadtree(p, l, h, count, 0, out, opts);
    return out;
  }
  throw localization_error("localize: rectangle boundary keeps hitting eigenvalues", 0.5 * (lo + hi),
                           0.5 * std::abs(hi - lo));
}

bool spectral_less(cd a, cd b) {
  const double ma = std::abs(a), mb = std::abs(b);
  if (std::abs(ma - mb) > 1e-9 * std::max(1.0, std::max(ma, mb))) return ma < mb;
  return std::arg(a) < std::arg(b);
}

bool same_root(cd a, cd b) { return std::abs(a - b) < 1e-6 * std::max(1.0, std::abs(a)); }

/// Radius (M + 1/2)^2 nudged off any eigenvalue; returns (radius_sq, count).
std::pair<double, int> disk_count(const Potential& p, int M, const OdeOptions& ode) {
  for (double off : {0.5, 0.45, 0.55, 0.4, 0.6, 0.35, 0.65}) {
    const double r = M + off;
    try {
      return {r * r, count_in_disk(p, r * r, ode)};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ContourTooClose) throw;
    }
  }
  throw localization_error("localize: every trial circle passes through an eigenvalue", 0.0,
                           (M + 0.5) * (M + 0.5));
}

std::vector<Root> low_roots(const Potential& p, int M, double radius_sq, const LocalizeOptions& opts) {
  // Integer-centred starts first; the count certifies completeness.
  std::vector<std::optional<cd>> starts(M);
  parallel_for(M, [&](std::size_t i) {
    const double n = double(i + 1);
    starts[i] = newton(p, n * n, 1, opts);
  });
  std::vector<Root> found;
  for (const auto& r : starts) {
    if (!r || std::abs(*r) >= radius_sq) continue;
    if (std::none_of(found.begin(), found.end(), [&](const Root& f) { return same_root(f.lambda, *r); }))
      found.push_back({*r, 1});
  }
  if (static_cast<int>(found.size()) == M) return found;

  const double side = radius_sq;
  auto roots = roots_in_rectangle(p, {-side, -side}, {side, side}, opts);
  std::vector<Root> kept;
  int total = 0;
  for (const auto& r : roots)
    if (std::abs(r.lambda) < radius_sq) {
      kept.push_back(r);
      total += r.multiplicity;
    }
  if (total != M)
    throw localization_error("localize: subdivision lost eigenvalues inside the disk", 0.0, radius_sq);
  return kept;
}

Root tail_root(const Potential& p, int n, cd shift, const StripParams& sp,
               const LocalizeOptions& opts) {
  const cd rho0 = double(n) + shift / double(n);
  const cd start = rho0 * rho0;
  if (auto r = newton(p, start, 1, opts)) {
    if (std::abs(principal_sqrt(*r) - double(n)) < 0.25) return {*r, 1};
  }
  const double h = std::max(sp.nu, 1.0);
  const cd lo((n - 0.5) * (n - 0.5) - h * h, -2.0 * (n + 0.5) * h);
  const cd hi((n + 0.5) * (n + 0.5), 2.0 * (n + 0.5) * h);
  std::vector<Root> hits;
  for (const auto& r : roots_in_rectangle(p, lo, hi, opts)) {
    const double re = principal_sqrt(r.lambda).real();
    if (re >= n - 0.5 && re < n + 0.5) hits.push_back(r);
  }
  if (hits.size() != 1 || hits[0].multiplicity != 1)
    throw localization_error("localize: no isolated eigenvalue near n^2", double(n) * n, 2.0 * n);
  return hits[0];
}

}  // namespace

int count_in_disk(const Potential& p, double radius_sq, const OdeOptions& opts) {
  if (!(radius_sq > 0.0)) throw Error(ErrorKind::Argument, "count_in_disk: radius must be positive");
  const ContourCounter counter(p, opts, 0.0, radius_sq);
  const int n0 = std::max(64, static_cast<int>(std::ceil(16.0 * std::sqrt(radius_sq))));
  return counter.winding(counter.circle_increment(0.0, radius_sq, n0));
}

int count_in_rectangle(const Potential& p, cd lo, cd hi, const OdeOptions& opts) {
  const ContourCounter counter(p, opts, 0.5 * (lo + hi), 0.5 * std::abs(hi - lo));
  const std::vector<cd> v = {lo, {hi.real(), lo.imag()}, hi, {lo.real(), hi.imag()}, lo};
  std::vector<int> counts;
  for (int e = 0; e < 4; ++e)
    counts.push_back(8 + static_cast<int>(std::ceil(12.0 * rho_length(v[e], v[e + 1]))));
  return counter.winding(counter.arg_increment(v, counts));
}

int multiplicity_at(const Potential& p, cd lambda0, const OdeOptions& opts) {
  int last = -1;
  for (double r = 1e-3; r >= 1e-12 * std::max(1.0, std::abs(lambda0)); r /= 10.0) {
    try {
      const ContourCounter counter(p, opts, lambda0, r);
      const int w = counter.winding(counter.circle_increment(lambda0, r, 16));
      if (last == w) return w;
      last = w;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ContourTooClose) throw;
      last = -1;
    }
  }
  Error e(ErrorKind::MultiplicityUndetermined, "multiplicity_at: winding number did not stabilize");
  e.center = lambda0;
  throw e;
}

std::vector<SpectralDatum> localize(const Potential& p, int N, const StripParams& sp,
                                    const LocalizeOptions& opts) {
  if (N < 1) throw Error(ErrorKind::Argument, "localize: N must be positive");
  int M = std::max(1, opts.initial_block);
  double radius_sq = 0.0;
  for (;;) {
    const auto [r2, count] = disk_count(p, M, opts.ode);
    radius_sq = r2;
    if (count == M) break;
    if (M > std::max(4 * N, 1024))
      throw localization_error("localize: disk counts never match the index", 0.0, r2);
    M *= 2;
  }
  auto low = low_roots(p, M, radius_sq, opts);
  std::sort(low.begin(), low.end(), [](const Root& a, const Root& b) { return spectral_less(a.lambda, b.lambda); });

  std::vector<SpectralDatum> data;
  auto push = [&](const Root& r) {
    for (int j = 0; j < r.multiplicity; ++j) {
      SpectralDatum d;
      d.n = static_cast<int>(data.size()) + 1;
      d.lambda = r.lambda;
      d.rho = principal_sqrt(r.lambda);
      d.multiplicity = r.multiplicity;
      d.s = d.rho - double(d.n);
      data.push_back(d);
    }
  };
  for (const auto& r : low) push(r);

  if (N > M) {
    const cd shift = (data.back().rho - double(M)) * double(M);
    std::vector<Root> tail(N - M);
    parallel_for(tail.size(), [&](std::size_t i) { tail[i] = tail_root(p, M + 1 + int(i), shift, sp, opts); });
    for (std::size_t i = 0; i < tail.size(); ++i) {
      if (same_root(tail[i].lambda, data.back().lambda))
        throw localization_error("localize: two indices share one eigenvalue", tail[i].lambda, 1.0);
      push(tail[i]);
    }
    if (opts.verify_count) {
      const auto [r2, count] = disk_count(p, N, opts.ode);
      if (count != N) throw localization_error("localize: final disk count disagrees", 0.0, r2);
    }
  }
  data.resize(N);
  return data;
}

double RemainderReport::norm() const { return std::sqrt(weighted_sum); }

double RemainderReport::last_decade_increment() const {
  const std::size_t n = tail_profile.size();
  if (n <= 10) return 0.0;
  const double before = tail_profile[n - 11];
  if (before == 0.0) return tail_profile.back() == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return (tail_profile.back() - before) / before;
}

RemainderReport remainders(const std::vector<SpectralDatum>& data, double sigma) {
  RemainderReport r;
  r.sigma = sigma;
  double sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].n != static_cast<int>(i) + 1)
      throw Error(ErrorKind::Argument, "remainders: data must be numbered consecutively from 1");
    r.s_seq.push_back(data[i].s);
    sum += std::norm(data[i].s) * std::pow(double(data[i].n), 2.0 * sigma);
    r.tail_profile.push_back(sum);
  }
  r.weighted_sum = sum;
  return r;
}

Potential random_ball_potential(std::mt19937_64& rng, double R, double sigma, int K) {
  std::normal_distribution<double> normal;
  std::vector<cd> a(K + 1);
  for (int k = 0; k <= K; ++k) {
    const double re = normal(rng), im = normal(rng);
    a[k] = cd(re, im) * std::pow(1.0 + double(k) * k, -sigma - 0.51);
  }
  const auto raw = Potential::cosine_series(a);
  const double norm = sobolev_norm(raw, sigma);
  return raw.scaled(norm > 0.0 ? R / norm : 0.0);
}

std::vector<Potential> ball_sample(double R, double sigma, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Potential> out;
  for (int i = 0; i < samples; ++i) out.push_back(random_ball_potential(rng, R, sigma));
  return out;
}

SweepReport ball_sweep(double R, double sigma, int samples, int N, std::uint64_t seed,
                       const LocalizeOptions& opts) {
  if (!(sigma > 0.0 && sigma < 0.5)) throw Error(ErrorKind::Argument, "ball_sweep: sigma outside (0, 1/2)");
  if (samples < 1) throw Error(ErrorKind::Argument, "ball_sweep: samples must be positive");
  SweepReport rep;
  rep.radius = R;
  rep.sigma = sigma;
  rep.samples = samples;
  rep.N = N;
  rep.seed = seed;
  const auto pots = ball_sample(R, sigma, samples, seed);
  rep.norms.assign(samples, 0.0);
  rep.last_decade_increments.assign(samples, 0.0);
  const StripParams sp(1.0, R, sigma);
  parallel_for(pots.size(), [&](std::size_t i) {
    const auto r = remainders(localize(pots[i], N, sp, opts), sigma);
    rep.norms[i] = r.norm();
    rep.last_decade_increments[i] = r.last_decade_increment();
  });
  auto sorted = rep.norms;
  std::sort(sorted.begin(), sorted.end());
  rep.max_norm = sorted.back();
  const std::size_t m = sorted.size();
  rep.median_norm = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  return rep;
}

void write_csv(std::ostream& os, const std::vector<SpectralDatum>& data) {
  os << "n,re_lambda,im_lambda,re_s,im_s,multiplicity\n";
  char buf[192];
  for (const auto& d : data) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%d\n", d.n, d.lambda.real(),
                  d.lambda.imag(), d.s.real(), d.s.imag(), d.multiplicity);
    os << buf;
  }
}

}  // namespace quasispec
