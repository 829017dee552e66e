#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "quasispec/common.hpp"
#include "quasispec/gauss.hpp"

namespace quasispec {

/// Composite Gauss–Lobatto discretization of [0, pi].
///
/// The interval is cut at every breakpoint and each piece is split into
/// panels of equal length. Neighbouring panels share their edge node, so a
/// function continuous on [0, pi] is stored in *node layout* (size()).
/// Functions that may jump at panel edges (u, u*y, y' ...) are stored in
/// *panel layout*: panels() * order() values, panel-major, where the last
/// value of a panel is the left limit at its right edge.
class Grid {
 public:
  Grid() = default;

  static Grid build(std::vector<double> breakpoints, double max_panel_length,
                    int order = 8);
  static Grid with_min_nodes(std::vector<double> breakpoints,
                             std::size_t min_nodes, int order = 8);

  std::size_t size() const { return nodes_.size(); }
  std::size_t panels() const { return panel_lo_.size(); }
  int order() const { return order_; }

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& panel_weights() const { return panel_weights_; }

  double panel_lo(std::size_t k) const { return panel_lo_[k]; }
  double panel_hi(std::size_t k) const { return panel_hi_[k]; }
  std::size_t node_index(std::size_t panel, int j) const {
    return panel * (order_ - 1) + j;
  }
  /// Reference nodes on [-1, 1].
  const Rule& reference() const { return ref_; }

  std::vector<cd> to_panels(std::span<const cd> node_values) const;

  cd integrate(std::span<const cd> node_values) const;
  cd integrate_panels(std::span<const cd> panel_values) const;
  double integrate(std::span<const double> node_values) const;

  /// Running integral from 0 to every node, node layout.
  std::vector<cd> cumulative(std::span<const cd> panel_values) const;

  /// Derivative of a panel-layout function, differentiated panel by panel.
  std::vector<cd> differentiate(std::span<const cd> panel_values) const;

  /// Pointwise L2 inner product (f, g) = int f conj(g), node layout.
  cd inner(std::span<const cd> f, std::span<const cd> g) const;
  double l2_norm(std::span<const cd> f) const;

 private:
  int order_ = 0;
  Rule ref_;
  std::vector<double> ref_integration_;  // order x order, int_{-1}^{s_i} l_j
  std::vector<double> ref_derivative_;   // order x order, l_j'(s_i)
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> panel_weights_;
  std::vector<double> panel_lo_;
  std::vector<double> panel_hi_;
};

/// max_i |f_i|.
double sup_norm(std::span<const cd> f);

}  // namespace quasispec
