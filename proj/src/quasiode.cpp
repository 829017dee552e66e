#include "quasispec/quasiode.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <ostream>

#include "quasispec/gauss.hpp"

namespace quasispec {
namespace {

const GaussTableau& tableau(int stages) {
  static std::mutex mutex;
  static std::vector<GaussTableau> cache;
  std::lock_guard lock(mutex);
  for (const auto& t : cache)
    if (t.stages == stages) return t;
  cache.push_back(gauss_tableau(stages));
  return cache.back();
}

using StopCallback = std::function<void(std::size_t, const std::vector<cd>&)>;

// Travel-ordered cut points between `from` and `to`, including both ends.
std::vector<double> travel_cuts(const Potential& p, double from, double to) {
  std::vector<double> cuts = {from};
  auto bps = p.breakpoints();
  if (to < from) std::reverse(bps.begin(), bps.end());
  for (double b : bps) {
    const bool inside = to > from ? (b > from && b < to) : (b < from && b > to);
    if (inside) cuts.push_back(b);
  }
  cuts.push_back(to);
  return cuts;
}

double max_abs(const cd* z, int n) {
  double m = 0.0;
  for (int i = 0; i < n; ++i) m = std::max(m, std::abs(z[i]));
  return m;
}

/// Gauss–Legendre collocation on the scaled chain system. Level k of the
/// state holds z_k = (d * w_k, w_k^[1]).
class GaussIntegrator {
 public:
  GaussIntegrator(const Potential& p, cd lambda, int levels, const Forcing* forcing,
                  const OdeOptions& opts)
      : p_(p), lambda_(lambda), levels_(levels), forcing_(forcing), tol_(opts.rel_tol),
        tab_(tableau(opts.stages)) {
    const cd rho = principal_sqrt(lambda);
    scale_ = std::abs(rho) > 1.0 ? rho : cd(1.0);
    const int s = tab_.stages;
    matrix_.resize(2 * s, 2 * s);
    rhs_.resize(2 * s);
    stage_.assign(levels_, Eigen::VectorXcd(2 * s));
    a_.resize(s);
    g_.resize(s);
  }

  cd scale() const { return scale_; }
  int dim() const { return 2 * levels_; }

  /// Advances z from `from` to `to`; `stops` (travel order) trigger `on_stop`.
  void run(double from, double to, std::vector<cd>& z, const std::vector<double>& stops,
           const StopCallback& on_stop, double* log_scale) {
    std::size_t next_stop = 0;
    const double dir = to >= from ? 1.0 : -1.0;
    auto passed = [&](double stop, double x) { return dir * (stop - x) <= 1e-13; };
    while (next_stop < stops.size() && passed(stops[next_stop], from))
      on_stop(next_stop++, z);
    const auto cuts = travel_cuts(p_, from, to);
    double h_guess = 0.5 / std::max(1.0, std::abs(scale_));
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double a = cuts[c], b = cuts[c + 1];
      const std::size_t seg = p_.segment_index(0.5 * (a + b));
      h_ok_ = 0.0;
      unchecked_ = 0;
      double x = a;
      while (dir * (b - x) > 0.0) {
        double target = b;
        if (next_stop < stops.size() && dir * (stops[next_stop] - b) < 0.0)
          target = stops[next_stop];
        advance(seg, x, target, z, h_guess, log_scale);
        x = target;
        while (next_stop < stops.size() && passed(stops[next_stop], x))
          on_stop(next_stop++, z);
      }
    }
    while (next_stop < stops.size()) on_stop(next_stop++, z);
  }

 private:
  void renormalize(std::vector<cd>& z, double& log_scale) const {
    const double m = max_abs(z.data(), dim());
    if (m > 1e100 || (m < 1e-100 && m > 0.0)) {
      for (auto& v : z) v /= m;
      log_scale += std::log(m);
    }
  }

  void advance(std::size_t seg, double x, double target, std::vector<cd>& z, double& h,
               double* log_scale) {
    const double span = std::abs(target - x);
    const double dir = target >= x ? 1.0 : -1.0;
    std::vector<cd> full(dim()), half(dim()), out(dim());
    while (std::abs(target - x) > 0.0) {
      double step = std::min(std::abs(h), std::abs(target - x));
      if (std::abs(target - x) - step < 1e-3 * step) step = std::abs(target - x);
      const bool last = step == std::abs(target - x);
      const double hs = dir * step;
      if (step <= 0.25 * h_ok_ && unchecked_ < 16) {
        gauss_step(seg, x, hs, z.data(), out.data());
        ++unchecked_;
        z.swap(out);
        if (log_scale) renormalize(z, *log_scale);
        x = last ? target : x + hs;
        continue;
      }
      gauss_step(seg, x, hs, z.data(), full.data());
      gauss_step(seg, x, 0.5 * hs, z.data(), half.data());
      gauss_step(seg, x + 0.5 * hs, 0.5 * hs, half.data(), out.data());
      double err = 0.0;
      const double base = max_abs(out.data(), 2);
      for (int k = 0; k < levels_; ++k) {
        double num = 0.0;
        for (int i = 0; i < 2; ++i) num = std::max(num, std::abs(full[2 * k + i] - out[2 * k + i]));
        const double den = std::max(max_abs(out.data() + 2 * k, 2), k == 0 ? 1e-300 : 1e-6 * base);
        err = std::max(err, num / den);
      }
      const double order = 2.0 * tab_.stages + 1.0;
      const double factor = err > 0.0 ? 0.9 * std::pow(tol_ / err, 1.0 / order) : 4.0;
      if (err <= tol_) {
        z.swap(out);
        if (log_scale) renormalize(z, *log_scale);
        x = last ? target : x + hs;
        h_ok_ = std::max(h_ok_, step);
        unchecked_ = 0;
        if (!last || step >= std::abs(h)) h = step * std::min(4.0, std::max(1.0, factor));
      } else {
        h = step * std::max(0.1, std::min(0.9, factor));
        h_ok_ = 0.0;
        if (std::abs(h) < 1e-14 * std::max(1.0, span) || std::abs(h) < 1e-15) {
          Error e(ErrorKind::IntegrationFailure, "quasiode: step size underflow");
          e.location = x;
          throw e;
        }
      }
    }
  }

  void gauss_step(std::size_t seg, double x, double h, const cd* z_in, cd* z_out) {
    const int s = tab_.stages;
    const cd d = scale_;
    for (int j = 0; j < s; ++j) {
      const double xj = x + tab_.c[j] * h;
      const cd u = p_.eval_segment(seg, xj);
      a_[j] << u, d, (-lambda_ - u * u) / d, -u;
      g_[j] = forcing_ ? -(*forcing_)(xj) : cd(0.0);
    }
    matrix_.setIdentity();
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) matrix_.block<2, 2>(2 * i, 2 * j) -= (h * tab_.A(i, j)) * a_[j];
    lu_.compute(matrix_);
    for (int k = 0; k < levels_; ++k) {
      auto forcing_at = [&](int j) -> Eigen::Vector2cd {
        if (k == 0) return {0.0, g_[j]};
        return {0.0, -stage_[k - 1](2 * j) / d};
      };
      const Eigen::Vector2cd zk(z_in[2 * k], z_in[2 * k + 1]);
      for (int i = 0; i < s; ++i) {
        Eigen::Vector2cd r = zk;
        for (int j = 0; j < s; ++j) r += (h * tab_.A(i, j)) * forcing_at(j);
        rhs_.segment<2>(2 * i) = r;
      }
      stage_[k] = lu_.solve(rhs_);
      Eigen::Vector2cd next = zk;
      for (int j = 0; j < s; ++j)
        next += (h * tab_.b[j]) * (a_[j] * stage_[k].segment<2>(2 * j) + forcing_at(j));
      z_out[2 * k] = next(0);
      z_out[2 * k + 1] = next(1);
    }
  }

  const Potential& p_;
  cd lambda_;
  int levels_;
  const Forcing* forcing_;
  double tol_;
  const GaussTableau& tab_;
  cd scale_;
  double h_ok_ = 0.0;
  int unchecked_ = 0;
  Eigen::MatrixXcd matrix_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
  Eigen::VectorXcd rhs_;
  std::vector<Eigen::VectorXcd> stage_;
  std::vector<Eigen::Matrix2cd> a_;
  std::vector<cd> g_;
};

/// Exact propagation for piecewise-constant u: exp(A h) = cos(rho h) I + h sinc(rho h) A.
void run_transfer(const Potential& p, cd lambda, double from, double to, std::array<cd, 2>& y,
                  const std::vector<double>& stops, const StopCallback& on_stop,
                  double* log_scale) {
  const cd rho = principal_sqrt(lambda);
  const double dir = to >= from ? 1.0 : -1.0;
  auto propagate = [&](cd uc, double h, const std::array<cd, 2>& v) {
    const cd c = std::cos(rho * h);
    const cd s = h * sinc(rho * h);
    return std::array<cd, 2>{c * v[0] + s * (uc * v[0] + v[1]),
                             c * v[1] + s * ((-lambda - uc * uc) * v[0] - uc * v[1])};
  };
  std::size_t next_stop = 0;
  auto emit = [&](const std::array<cd, 2>& v) {
    on_stop(next_stop++, std::vector<cd>{v[0], v[1]});
  };
  while (next_stop < stops.size() && dir * (stops[next_stop] - from) <= 1e-13) emit(y);
  const auto cuts = travel_cuts(p, from, to);
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double a = cuts[c], b = cuts[c + 1];
    const auto& seg = p.segments()[p.segment_index(0.5 * (a + b))];
    const cd uc = seg.poly.empty() ? cd(0.0) : seg.poly[0];
    while (next_stop < stops.size() && dir * (stops[next_stop] - b) <= 1e-13)
      emit(propagate(uc, stops[next_stop] - a, y));
    y = propagate(uc, b - a, y);
    if (log_scale) {
      const double m = std::max(std::abs(y[0]), std::abs(y[1]));
      if (m > 1e100 || (m < 1e-100 && m > 0.0)) {
        y[0] /= m;
        y[1] /= m;
        *log_scale += std::log(m);
      }
    }
  }
  while (next_stop < stops.size()) emit(y);
}

std::vector<double> default_samples(const Potential& p, double lo, double hi) {
  std::vector<double> s = {lo};
  for (double b : p.breakpoints())
    if (b > lo && b < hi) s.push_back(b);
  if (hi > lo) s.push_back(hi);
  return s;
}

void check_range(double x) {
  if (!(x >= 0.0 && x <= kPi)) throw Error(ErrorKind::Domain, "quasiode: endpoint outside [0, pi]");
}

bool use_transfer(const Potential& p, const Forcing& forcing, const OdeOptions& opts) {
  return opts.transfer_fast_path && !forcing && p.is_piecewise_constant();
}

}  // namespace

SolutionTrace integrate(const Potential& p, cd lambda, std::array<cd, 2> init, double from,
                        double to, std::span<const double> samples, const Forcing& forcing,
                        const OdeOptions& opts) {
  check_range(from);
  check_range(to);
  const double lo = std::min(from, to), hi = std::max(from, to);
  std::vector<double> grid;
  if (samples.empty()) {
    grid = default_samples(p, lo, hi);
  } else {
    for (double x : samples)
      if (x >= lo - 1e-14 && x <= hi + 1e-14) grid.push_back(std::clamp(x, lo, hi));
    std::sort(grid.begin(), grid.end());
  }
  std::vector<double> stops = grid;
  if (to < from) std::reverse(stops.begin(), stops.end());

  SolutionTrace trace;
  trace.lambda = lambda;
  trace.grid = grid;
  trace.y.assign(grid.size(), 0.0);
  trace.y1.assign(grid.size(), 0.0);
  const bool backward = to < from;
  auto slot = [&](std::size_t i) { return backward ? grid.size() - 1 - i : i; };

  if (use_transfer(p, forcing, opts)) {
    run_transfer(p, lambda, from, to, init, stops,
                 [&](std::size_t i, const std::vector<cd>& v) {
                   trace.y[slot(i)] = v[0];
                   trace.y1[slot(i)] = v[1];
                 },
                 nullptr);
    return trace;
  }
  GaussIntegrator integrator(p, lambda, 1, forcing ? &forcing : nullptr, opts);
  const cd d = integrator.scale();
  std::vector<cd> z = {d * init[0], init[1]};
  integrator.run(from, to, z, stops,
                 [&](std::size_t i, const std::vector<cd>& v) {
                   trace.y[slot(i)] = v[0] / d;
                   trace.y1[slot(i)] = v[1];
                 },
                 nullptr);
  return trace;
}

ScaledValue char_function_scaled(const Potential& p, cd lambda, const OdeOptions& opts) {
  ScaledValue out;
  if (use_transfer(p, {}, opts)) {
    std::array<cd, 2> y = {0.0, 1.0};
    run_transfer(p, lambda, 0.0, kPi, y, {}, [](std::size_t, const std::vector<cd>&) {},
                 &out.log_scale);
    out.mantissa = y[0];
    return out;
  }
  GaussIntegrator integrator(p, lambda, 1, nullptr, opts);
  std::vector<cd> z = {0.0, 1.0};
  integrator.run(0.0, kPi, z, {}, [](std::size_t, const std::vector<cd>&) {}, &out.log_scale);
  out.mantissa = z[0] / integrator.scale();
  return out;
}

cd char_function(const Potential& p, cd lambda, const OdeOptions& opts) {
  const auto v = char_function_scaled(p, lambda, opts);
  return v.mantissa * std::exp(v.log_scale);
}

std::vector<cd> char_chain_values(const Potential& p, cd lambda, int up_to,
                                  const OdeOptions& opts) {
  if (up_to < 0) throw Error(ErrorKind::Argument, "char_chain: negative order");
  GaussIntegrator integrator(p, lambda, up_to + 1, nullptr, opts);
  std::vector<cd> z(2 * (up_to + 1), 0.0);
  z[1] = 1.0;
  integrator.run(0.0, kPi, z, {}, [](std::size_t, const std::vector<cd>&) {}, nullptr);
  std::vector<cd> out(up_to + 1);
  for (int k = 0; k <= up_to; ++k) out[k] = z[2 * k] / integrator.scale();
  return out;
}

ChainTrace char_chain(const Potential& p, cd lambda0, int up_to, std::span<const double> samples,
                      const OdeOptions& opts) {
  if (up_to < 0) throw Error(ErrorKind::Argument, "char_chain: negative order");
  std::vector<double> grid =
      samples.empty() ? default_samples(p, 0.0, kPi) : std::vector<double>(samples.begin(), samples.end());
  std::sort(grid.begin(), grid.end());
  ChainTrace chain;
  chain.lambda0 = lambda0;
  chain.order = up_to;
  chain.traces.resize(up_to + 1);
  for (auto& t : chain.traces) {
    t.lambda = lambda0;
    t.grid = grid;
    t.y.assign(grid.size(), 0.0);
    t.y1.assign(grid.size(), 0.0);
  }
  GaussIntegrator integrator(p, lambda0, up_to + 1, nullptr, opts);
  const cd d = integrator.scale();
  std::vector<cd> z(2 * (up_to + 1), 0.0);
  z[1] = 1.0;
  integrator.run(0.0, kPi, z, grid,
                 [&](std::size_t i, const std::vector<cd>& v) {
                   for (int k = 0; k <= up_to; ++k) {
                     chain.traces[k].y[i] = v[2 * k] / d;
                     chain.traces[k].y1[i] = v[2 * k + 1];
                   }
                 },
                 nullptr);
  return chain;
}

cd wronskian(const SolutionTrace& v, const SolutionTrace& w, std::size_t i) {
  return v.y[i] * w.y1[i] - w.y[i] * v.y1[i];
}

std::vector<cd> panel_values(const Potential& p, const Grid& grid) {
  const int m = grid.order();
  std::vector<cd> out(grid.panels() * m);
  for (std::size_t k = 0; k < grid.panels(); ++k) {
    const std::size_t seg = p.segment_index(0.5 * (grid.panel_lo(k) + grid.panel_hi(k)));
    for (int j = 0; j < m; ++j) out[k * m + j] = p.eval_segment(seg, grid.nodes()[grid.node_index(k, j)]);
  }
  return out;
}

std::vector<cd> apply_operator(const Potential& p, const Grid& grid, const DomainFunction& f) {
  const auto u = panel_values(p, grid);
  const auto f_panels = grid.to_panels(f.f);
  const auto f1_panels = grid.to_panels(f.f1);
  auto out = grid.differentiate(f1_panels);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = -out[i] - u[i] * f1_panels[i] - u[i] * u[i] * f_panels[i];
  return out;
}

double lagrange_defect(const Potential& p, const Grid& grid, const DomainFunction& f,
                       const DomainFunction& g) {
  const auto lf = apply_operator(p, grid, f);
  const auto lg = apply_operator(p.conj(), grid, g);
  const auto fp = grid.to_panels(f.f);
  const auto gp = grid.to_panels(g.f);
  std::vector<cd> left(lf.size()), right(lf.size());
  for (std::size_t i = 0; i < lf.size(); ++i) {
    left[i] = lf[i] * std::conj(gp[i]);
    right[i] = fp[i] * std::conj(lg[i]);
  }
  return std::abs(grid.integrate_panels(left) - grid.integrate_panels(right));
}

void write_csv(std::ostream& os, const SolutionTrace& trace) {
  os << "x,re_y,im_y,re_y1,im_y1\n";
  char buf[160];
  for (std::size_t i = 0; i < trace.grid.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", trace.grid[i],
                  trace.y[i].real(), trace.y[i].imag(), trace.y1[i].real(), trace.y1[i].imag());
    os << buf;
  }
}

}  // namespace quasispec
