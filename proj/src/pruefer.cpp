#include "quasispec/pruefer.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "quasispec/gauss.hpp"

namespace quasispec {
namespace {

constexpr double kEpsilon = 1.0 / 128.0;
constexpr double kPicardTol = 1e-12;
constexpr int kPicardCap = 200;

/// Cumulative integrals int_0^x g(t) exp(i omega t) dt with g interpolated
/// on each panel's Lobatto nodes and the product integrated exactly.
class Filon {
 public:
  Filon(const Grid& grid, cd omega) : grid_(grid), omega_(omega) {
    const int m = grid.order();
    const auto& s = grid.reference().nodes;
    const Rule gl = gauss_legendre(20);
    std::map<double, std::size_t> by_half;
    panel_matrix_.resize(grid.panels());
    for (std::size_t k = 0; k < grid.panels(); ++k) {
      const double half = 0.5 * (grid.panel_hi(k) - grid.panel_lo(k));
      auto it = by_half.find(half);
      if (it == by_half.end()) {
        std::vector<cd> w(m * m, 0.0);
        const cd alpha = omega * half;
        for (int i = 1; i < m; ++i) {
          const double len = 0.5 * (s[i] + 1.0);
          for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
            const double t = -1.0 + len * (gl.nodes[q] + 1.0);
            const auto l = lagrange_basis(s, t);
            const cd e = len * gl.weights[q] * std::exp(kI * alpha * t);
            for (int j = 0; j < m; ++j) w[i * m + j] += e * l[j];
          }
        }
        it = by_half.emplace(half, matrices_.size()).first;
        matrices_.push_back(std::move(w));
      }
      panel_matrix_[k] = it->second;
    }
  }

  /// g in panel layout; result in node layout.
  std::vector<cd> cumulative(const std::vector<cd>& g) const {
    const int m = grid_.order();
    std::vector<cd> out(grid_.size(), 0.0);
    cd base = 0.0;
    for (std::size_t k = 0; k < grid_.panels(); ++k) {
      const double half = 0.5 * (grid_.panel_hi(k) - grid_.panel_lo(k));
      const double mid = 0.5 * (grid_.panel_hi(k) + grid_.panel_lo(k));
      const cd phase = half * std::exp(kI * omega_ * mid);
      const auto& w = matrices_[panel_matrix_[k]];
      for (int i = 1; i < m; ++i) {
        cd acc = 0.0;
        for (int j = 0; j < m; ++j) acc += w[i * m + j] * g[k * m + j];
        out[grid_.node_index(k, i)] = base + phase * acc;
      }
      base = out[grid_.node_index(k, m - 1)];
    }
    return out;
  }

 private:
  const Grid& grid_;
  cd omega_;
  std::vector<std::vector<cd>> matrices_;
  std::vector<std::size_t> panel_matrix_;
};

/// Shared state of one (p, rho) problem.
struct Workspace {
  Workspace(const Potential& p, cd rho)
      : rho(rho), grid(pruefer_grid(p, rho)), plus(grid, 2.0 * rho), minus(grid, -2.0 * rho) {
    u = panel_values(p, grid);
    u2.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) u2[i] = u[i] * u[i];
    u2_integral = grid.cumulative(u2);
  }

  /// int_0^x w(t) e^{2 i f} e^{2 i rho t} and the e^{-2i...} counterpart.
  std::pair<std::vector<cd>, std::vector<cd>> oscillatory(const std::vector<cd>& w,
                                                          const std::vector<cd>& f_panels) const {
    std::vector<cd> gp(w.size()), gm(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      const cd e = std::exp(2.0 * kI * f_panels[i]);
      gp[i] = w[i] * e;
      gm[i] = w[i] / e;
    }
    return {plus.cumulative(gp), minus.cumulative(gm)};
  }

  /// Right side of the phase equation minus rho x, at every node.
  std::vector<cd> picard_map(const std::vector<cd>& f) const {
    const auto fp = grid.to_panels(f);
    const auto [up, um] = oscillatory(u, fp);
    const auto [qp, qm] = oscillatory(u2, fp);
    std::vector<cd> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      const cd sin_term = (up[i] - um[i]) / (2.0 * kI);
      const cd cos_term = 0.5 * (qp[i] + qm[i]);
      out[i] = sin_term + (u2_integral[i] - cos_term) / (2.0 * rho);
    }
    return out;
  }

  cd rho;
  Grid grid;
  Filon plus;
  Filon minus;
  std::vector<cd> u;
  std::vector<cd> u2;
  std::vector<cd> u2_integral;
};

double oscillatory_at(const Potential& p, cd rho, double x) {
  const cd wp = windowed_fourier(p, 0.0, x, 2.0 * rho);
  const cd wm = windowed_fourier(p, 0.0, x, -2.0 * rho);
  return std::abs((wp - wm) / (2.0 * kI)) + std::abs(0.5 * (wp + wm));
}

UpsilonParts upsilon_from(const Potential& p, const Workspace& ws, const StripParams& sp) {
  if (std::abs(ws.rho) == 0.0) throw Error(ErrorKind::SingularArgument, "upsilon: rho = 0");
  const std::vector<cd> zero(ws.u.size(), 0.0);
  const auto [ep, em] = ws.oscillatory(ws.u, zero);
  const auto& x = ws.grid.nodes();
  std::vector<double> v(ep.size());
  for (std::size_t i = 0; i < ep.size(); ++i)
    v[i] = std::abs((ep[i] - em[i]) / (2.0 * kI)) + std::abs(0.5 * (ep[i] + em[i]));
  // Refine the largest node-local maxima by golden-section search on the closed form.
  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < v.size(); ++i)
    if ((i == 0 || v[i] >= v[i - 1]) && (i + 1 == v.size() || v[i] >= v[i + 1])) peaks.push_back(i);
  std::sort(peaks.begin(), peaks.end(), [&](auto a, auto b) { return v[a] > v[b]; });
  if (peaks.size() > 6) peaks.resize(6);
  UpsilonParts out;
  out.oscillatory = *std::max_element(v.begin(), v.end());
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (std::size_t i : peaks) {
    double a = x[i == 0 ? 0 : i - 1], b = x[std::min(i + 1, x.size() - 1)];
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = oscillatory_at(p, ws.rho, c), fd = oscillatory_at(p, ws.rho, d);
    for (int it = 0; it < 60 && b - a > 1e-13; ++it) {
      if (fc > fd) {
        b = d; d = c; fd = fc;
        c = b - g * (b - a);
        fc = oscillatory_at(p, ws.rho, c);
      } else {
        a = c; c = d; fc = fd;
        d = a + g * (b - a);
        fd = oscillatory_at(p, ws.rho, d);
      }
    }
    out.oscillatory = std::max({out.oscillatory, fc, fd});
  }
  const double R = sp.ball_radius, k = sp.kappa;
  out.radius_term = R * R * (1.0 + k + R * k * k) / (2.0 * std::abs(ws.rho));
  out.value = out.oscillatory + out.radius_term;
  const double t = 1.0 + 64.0 * R * R * k * k;
  out.threshold = kEpsilon / (t * t);
  return out;
}

void check_strip(cd rho, const StripParams& sp) {
  if (std::abs(rho) == 0.0) throw Error(ErrorKind::SingularArgument, "pruefer: rho = 0");
  if (std::abs(rho.imag()) > sp.nu + 1e-14)
    throw Error(ErrorKind::Argument, "pruefer: |Im rho| exceeds the strip half-width");
}

PrueferField iterate(const Workspace& ws, const UpsilonParts& ups, int cap, bool throw_on_cap) {
  PrueferField field;
  field.rho = ws.rho;
  field.grid = ws.grid.nodes();
  field.upsilon = ups.value;
  std::vector<cd> f(ws.grid.size(), 0.0);
  bool converged = false;
  for (int it = 1; it <= cap; ++it) {
    auto next = ws.picard_map(f);
    double change = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) change = std::max(change, std::abs(next[i] - f[i]));
    f = std::move(next);
    field.iterations = it;
    if (!std::isfinite(change)) break;
    if (change < kPicardTol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    if (throw_on_cap)
      throw Error(ErrorKind::Convergence, "solve_phase: Picard iteration did not converge");
    field.iterations = -field.iterations;
  }
  field.f_pert = f;
  field.theta.resize(f.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    field.theta[i] = ws.rho * field.grid[i] + f[i];
    sup = std::max(sup, std::abs(f[i]));
  }
  field.theta[0] = 0.0;
  field.ratio = ups.value > 0.0 ? sup / ups.value : 0.0;
  return field;
}

}  // namespace

Grid pruefer_grid(const Potential& p, cd rho) {
  const double freq = std::max({std::abs(rho), double(p.trig_degree()), 4.0});
  if (freq > 1e6) throw Error(ErrorKind::Argument, "pruefer: |rho| too large for the phase grid");
  // Seven Lobatto intervals per panel; 20 of them per pi / freq.
  return Grid::build(p.breakpoints(), 7.0 * kPi / (20.0 * freq));
}

UpsilonParts upsilon_parts(const Potential& p, cd rho, const StripParams& sp) {
  check_strip(rho, sp);
  return upsilon_from(p, Workspace(p, rho), sp);
}

double upsilon(const Potential& p, cd rho, const StripParams& sp) {
  return upsilon_parts(p, rho, sp).value;
}

bool condition_holds(const Potential& p, cd rho, const StripParams& sp) {
  const auto parts = upsilon_parts(p, rho, sp);
  return parts.value < parts.threshold;
}

PrueferField solve_phase(const Potential& p, cd rho, const StripParams& sp) {
  check_strip(rho, sp);
  const Workspace ws(p, rho);
  const auto ups = upsilon_from(p, ws, sp);
  if (!(ups.value < ups.threshold))
    throw Error(ErrorKind::Refusal, "solve_phase: contraction condition does not hold");
  return iterate(ws, ups, kPicardCap, true);
}

PrueferField amplitude(PrueferField field, const Potential& p) {
  const Workspace ws(p, field.rho);
  if (ws.grid.size() != field.f_pert.size())
    throw Error(ErrorKind::Argument, "amplitude: field does not match its grid");
  const auto fp = ws.grid.to_panels(field.f_pert);
  const auto [up, um] = ws.oscillatory(ws.u, fp);
  const auto [qp, qm] = ws.oscillatory(ws.u2, fp);
  field.r_amp.resize(field.f_pert.size());
  for (std::size_t i = 0; i < field.r_amp.size(); ++i) {
    const cd cos_term = 0.5 * (up[i] + um[i]);
    const cd sin_term = (qp[i] - qm[i]) / (2.0 * kI);
    field.r_amp[i] = std::exp(-cos_term - sin_term / (2.0 * field.rho));
  }
  return field;
}

SolutionTrace reconstruct(const PrueferField& field) {
  if (field.r_amp.size() != field.theta.size())
    throw Error(ErrorKind::Argument, "reconstruct: amplitude not computed");
  SolutionTrace t;
  t.lambda = field.rho * field.rho;
  t.grid = field.grid;
  t.y.resize(field.theta.size());
  t.y1.resize(field.theta.size());
  for (std::size_t i = 0; i < field.theta.size(); ++i) {
    t.y[i] = field.r_amp[i] * std::sin(field.theta[i]) / field.rho;
    t.y1[i] = field.r_amp[i] * std::cos(field.theta[i]);
  }
  return t;
}

namespace detail {

PrueferField picard_unguarded(const Potential& p, cd rho, const StripParams& sp,
                              int max_iterations) {
  check_strip(rho, sp);
  const Workspace ws(p, rho);
  return iterate(ws, upsilon_from(p, ws, sp), max_iterations, false);
}

double fixed_point_residual(const PrueferField& field, const Potential& p) {
  const Workspace ws(p, field.rho);
  const auto image = ws.picard_map(field.f_pert);
  double r = 0.0;
  for (std::size_t i = 0; i < image.size(); ++i) r = std::max(r, std::abs(image[i] - field.f_pert[i]));
  return r;
}

}  // namespace detail
}  // namespace quasispec
