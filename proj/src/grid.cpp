#include "quasispec/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace quasispec {
namespace {

std::vector<double> cut_points(std::vector<double> breakpoints) {
  breakpoints.push_back(0.0);
  breakpoints.push_back(kPi);
  std::sort(breakpoints.begin(), breakpoints.end());
  std::vector<double> cuts;
  for (double b : breakpoints) {
    if (b < 0.0 || b > kPi) continue;
    if (!cuts.empty() && b - cuts.back() < 1e-12) continue;
    cuts.push_back(b);
  }
  if (cuts.back() != kPi) {
    if (kPi - cuts.back() < 1e-12) cuts.back() = kPi;
    else cuts.push_back(kPi);
  }
  return cuts;
}

}  // namespace

Grid Grid::build(std::vector<double> breakpoints, double max_panel_length,
                 int order) {
  if (order < 2) throw std::invalid_argument("Grid: order < 2");
  if (!(max_panel_length > 0.0)) throw std::invalid_argument("Grid: panel length");
  Grid g;
  g.order_ = order;
  g.ref_ = gauss_lobatto(order);
  const auto& s = g.ref_.nodes;

  g.ref_integration_.assign(order * order, 0.0);
  const Rule gl = gauss_legendre(order);
  for (int i = 0; i < order; ++i) {
    const double half = 0.5 * (s[i] + 1.0);
    for (int q = 0; q < order; ++q) {
      const double t = -1.0 + half * (gl.nodes[q] + 1.0);
      const auto l = lagrange_basis(s, t);
      for (int j = 0; j < order; ++j)
        g.ref_integration_[i * order + j] += half * gl.weights[q] * l[j];
    }
  }
  std::vector<double> bary(order, 1.0);
  for (int j = 0; j < order; ++j)
    for (int k = 0; k < order; ++k)
      if (k != j) bary[j] /= (s[j] - s[k]);
  g.ref_derivative_.assign(order * order, 0.0);
  for (int i = 0; i < order; ++i) {
    double diag = 0.0;
    for (int j = 0; j < order; ++j) {
      if (i == j) continue;
      const double d = (bary[j] / bary[i]) / (s[i] - s[j]);
      g.ref_derivative_[i * order + j] = d;
      diag -= d;
    }
    g.ref_derivative_[i * order + i] = diag;
  }

  const auto cuts = cut_points(std::move(breakpoints));
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double a = cuts[c], b = cuts[c + 1];
    const auto count = static_cast<std::size_t>(
        std::max(1.0, std::ceil((b - a) / max_panel_length - 1e-9)));
    for (std::size_t k = 0; k < count; ++k) {
      g.panel_lo_.push_back(a + (b - a) * k / count);
      g.panel_hi_.push_back(k + 1 == count ? b : a + (b - a) * (k + 1) / count);
    }
  }

  const std::size_t P = g.panel_lo_.size();
  g.nodes_.assign(P * (order - 1) + 1, 0.0);
  g.weights_.assign(g.nodes_.size(), 0.0);
  g.panel_weights_.assign(P * order, 0.0);
  for (std::size_t k = 0; k < P; ++k) {
    const double lo = g.panel_lo_[k], hi = g.panel_hi_[k];
    const double half = 0.5 * (hi - lo);
    for (int j = 0; j < order; ++j) {
      const std::size_t idx = g.node_index(k, j);
      g.nodes_[idx] = (j == 0) ? lo : (j == order - 1 ? hi : lo + half * (s[j] + 1.0));
      g.weights_[idx] += half * g.ref_.weights[j];
      g.panel_weights_[k * order + j] = half * g.ref_.weights[j];
    }
  }
  return g;
}

Grid Grid::with_min_nodes(std::vector<double> breakpoints, std::size_t min_nodes,
                          int order) {
  const double per_panel = order - 1;
  double length = kPi * per_panel / std::max<double>(1.0, double(min_nodes) - 1.0);
  for (;;) {
    Grid g = build(breakpoints, length, order);
    if (g.size() >= min_nodes) return g;
    length *= 0.97;
  }
}

std::vector<cd> Grid::to_panels(std::span<const cd> node_values) const {
  std::vector<cd> out(panels() * order_);
  for (std::size_t k = 0; k < panels(); ++k)
    for (int j = 0; j < order_; ++j) out[k * order_ + j] = node_values[node_index(k, j)];
  return out;
}

cd Grid::integrate(std::span<const cd> f) const {
  cd sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += weights_[i] * f[i];
  return sum;
}

double Grid::integrate(std::span<const double> f) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += weights_[i] * f[i];
  return sum;
}

cd Grid::integrate_panels(std::span<const cd> f) const {
  cd sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += panel_weights_[i] * f[i];
  return sum;
}

std::vector<cd> Grid::cumulative(std::span<const cd> f) const {
  std::vector<cd> out(size(), 0.0);
  cd base = 0.0;
  for (std::size_t k = 0; k < panels(); ++k) {
    const double half = 0.5 * (panel_hi_[k] - panel_lo_[k]);
    for (int i = 1; i < order_; ++i) {
      cd acc = 0.0;
      for (int j = 0; j < order_; ++j)
        acc += ref_integration_[i * order_ + j] * f[k * order_ + j];
      out[node_index(k, i)] = base + half * acc;
    }
    base = out[node_index(k, order_ - 1)];
  }
  return out;
}

std::vector<cd> Grid::differentiate(std::span<const cd> f) const {
  std::vector<cd> out(panels() * order_);
  for (std::size_t k = 0; k < panels(); ++k) {
    const double scale = 2.0 / (panel_hi_[k] - panel_lo_[k]);
    for (int i = 0; i < order_; ++i) {
      cd acc = 0.0;
      for (int j = 0; j < order_; ++j)
        acc += ref_derivative_[i * order_ + j] * f[k * order_ + j];
      out[k * order_ + i] = scale * acc;
    }
  }
  return out;
}

cd Grid::inner(std::span<const cd> f, std::span<const cd> g) const {
  cd sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += weights_[i] * f[i] * std::conj(g[i]);
  return sum;
}

double Grid::l2_norm(std::span<const cd> f) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += weights_[i] * std::norm(f[i]);
  return std::sqrt(sum);
}

double sup_norm(std::span<const cd> f) {
  double m = 0.0;
  for (const auto& v : f) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace quasispec
