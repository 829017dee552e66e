#include "quasispec/projector.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "quasispec/parallel.hpp"
#include "quasispec/quasiode.hpp"

namespace quasispec {
namespace {

Error conflict(const std::string& what, int n) {
  Error e(ErrorKind::ContourConflict, what);
  e.center = 0.0;
  e.radius = (n + 0.5) * (n + 0.5);
  return e;
}

std::vector<double> merged_breakpoints(const Potential& a, const Potential& b) {
  auto out = a.breakpoints();
  const auto more = b.breakpoints();
  out.insert(out.end(), more.begin(), more.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t nodes_for(const Potential& p, std::size_t min_nodes) {
  return std::max<std::size_t>(min_nodes, 16 * static_cast<std::size_t>(p.trig_degree()));
}

Eigen::VectorXd weights_of(const std::vector<double>& w) {
  return Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
}

/// lambda_max(Gw G) for Hermitian positive semidefinite Gw, G.
double max_generalized(const Eigen::MatrixXcd& Gw, const Eigen::MatrixXcd& G) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Gw);
  Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXcd S = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
  const Eigen::MatrixXcd M = S * G * S;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> top(0.5 * (M + M.adjoint()), Eigen::EigenvaluesOnly);
  return std::max(0.0, top.eigenvalues().maxCoeff());
}

double w21_norm(const Grid& g, const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& dY,
                const Eigen::MatrixXcd& W) {
  const Eigen::VectorXd wq = weights_of(g.weights());
  const Eigen::VectorXd wp = weights_of(g.panel_weights());
  const Eigen::MatrixXcd Gw = W.adjoint() * wq.asDiagonal() * W;
  const Eigen::MatrixXcd G = Y.adjoint() * wq.asDiagonal() * Y + dY.adjoint() * wp.asDiagonal() * dY;
  return std::sqrt(max_generalized(Gw, G));
}

double grid_norm(const Grid& g, std::span<const cd> f) { return g.l2_norm(f); }

}  // namespace

std::vector<cd> ProjectorMatrix::apply(std::span<const cd> f) const {
  const Eigen::VectorXd wq = weights_of(grid->weights());
  const Eigen::Map<const Eigen::VectorXcd> fv(f.data(), static_cast<Eigen::Index>(f.size()));
  const Eigen::VectorXcd c = w_block.adjoint() * (wq.asDiagonal() * fv);
  const Eigen::VectorXcd out = y_block * c;
  return std::vector<cd>(out.data(), out.data() + out.size());
}

int ProjectorMatrix::rank() const {
  const Eigen::VectorXd wq = weights_of(grid->weights());
  const Eigen::MatrixXcd G = y_block.adjoint() * wq.asDiagonal() * y_block;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double top = ev.maxCoeff();
  return static_cast<int>((ev.array() > 1e-8 * top).count());
}

std::shared_ptr<const Grid> operator_grid(const Potential& p, std::size_t min_nodes) {
  return std::make_shared<const Grid>(Grid::with_min_nodes(p.breakpoints(), nodes_for(p, min_nodes)));
}

ProjectorMatrix build_projector(const Potential& p, int n, const StripParams& sp,
                                std::shared_ptr<const Grid> grid) {
  if (n < 1) throw Error(ErrorKind::Argument, "build_projector: n must be positive");
  int inside = 0;
  try {
    inside = count_in_disk(p, (n + 0.5) * (n + 0.5));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ContourTooClose) throw;
    throw conflict("build_projector: an eigenvalue lies on the separating contour", n);
  }
  if (inside != n) throw conflict("build_projector: contour does not enclose exactly n eigenvalues", n);
  auto data = localize(p, n + 1, sp);
  if (std::abs(data[n - 1].lambda - data[n].lambda) < 1e-6 * std::max(1.0, std::abs(data[n].lambda)))
    throw conflict("build_projector: a multiple eigenvalue straddles the contour", n);
  data.resize(n);
  if (!grid) grid = operator_grid(p);
  const auto sys = eigensystem(p, data, grid);
  const Grid& g = *grid;
  const auto u = panel_values(p, g);
  ProjectorMatrix P;
  P.n = n;
  P.grid = grid;
  P.y_block.resize(g.size(), n);
  P.w_block.resize(g.size(), n);
  P.dy_block.resize(g.panels() * g.order(), n);
  for (int k = 0; k < n; ++k) {
    const auto yp = g.to_panels(sys.y[k].y);
    const auto y1p = g.to_panels(sys.y[k].y1);
    for (std::size_t i = 0; i < g.size(); ++i) {
      P.y_block(i, k) = sys.y[k].y[i];
      P.w_block(i, k) = sys.w[k].w[i];
    }
    for (std::size_t i = 0; i < yp.size(); ++i) P.dy_block(i, k) = y1p[i] + u[i] * yp[i];
  }
  return P;
}

double norm_L2_to_W21(const ProjectorMatrix& P) {
  return w21_norm(*P.grid, P.y_block, P.dy_block, P.w_block);
}

double norm_L2_to_W21(const ProjectorMatrix& P, const ProjectorMatrix& Q) {
  if (P.grid->size() != Q.grid->size() || P.grid->panels() != Q.grid->panels())
    throw Error(ErrorKind::Argument, "norm_L2_to_W21: projectors live on different grids");
  const auto cols = P.n + Q.n;
  Eigen::MatrixXcd Y(P.y_block.rows(), cols), dY(P.dy_block.rows(), cols), W(P.w_block.rows(), cols);
  Y << P.y_block, -Q.y_block;
  dY << P.dy_block, -Q.dy_block;
  W << P.w_block, Q.w_block;
  return w21_norm(*P.grid, Y, dY, W);
}

double idempotency_defect(const ProjectorMatrix& P, const std::vector<std::vector<cd>>& tests) {
  double worst = 0.0;
  for (const auto& f : tests) {
    const auto once = P.apply(f);
    const auto twice = P.apply(once);
    std::vector<cd> diff(once.size());
    for (std::size_t i = 0; i < once.size(); ++i) diff[i] = twice[i] - once[i];
    worst = std::max(worst, grid_norm(*P.grid, diff) / grid_norm(*P.grid, f));
  }
  return worst;
}

std::vector<ContinuityStep> continuity_experiment(const Potential& u0, const Potential& direction,
                                                  double sigma, int n, int halvings, double t0,
                                                  const StripParams& sp) {
  if (halvings < 0 || !(t0 > 0.0)) throw Error(ErrorKind::Argument, "continuity_experiment: bad steps");
  const StripParams strip(sp.nu, sp.ball_radius, sigma);
  const std::size_t nodes = std::max(nodes_for(u0, 2048), nodes_for(direction, 2048));
  const auto grid = std::make_shared<const Grid>(Grid::with_min_nodes(merged_breakpoints(u0, direction), nodes));
  const auto base = build_projector(u0, n, strip, grid);
  std::vector<ContinuityStep> steps(halvings + 1);
  parallel_for(steps.size(), [&](std::size_t k) {
    auto& s = steps[k];
    s.t = t0 / std::pow(2.0, double(k));
    try {
      const auto moved = build_projector(u0.plus(direction, s.t), n, strip, grid);
      s.norm = norm_L2_to_W21(moved, base);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ContourConflict && e.kind() != ErrorKind::ContourTooClose &&
          e.kind() != ErrorKind::Localization)
        throw;
      s.skipped = true;
      s.norm = std::numeric_limits<double>::quiet_NaN();
      s.note = e.what();
    }
  });
  return steps;
}

Resolvent::Resolvent(const Potential& p, cd lambda, std::shared_ptr<const Grid> grid)
    : lambda_(lambda), grid_(std::move(grid)) {
  const auto& x = grid_->nodes();
  const auto left = integrate(p, lambda, {0.0, 1.0}, 0.0, kPi, x);
  const auto right = integrate(p, lambda, {0.0, 1.0}, kPi, 0.0, x);
  phi_ = left.y;
  psi_ = right.y;
  wronskian_ = left.y1[0] * right.y[0] - left.y[0] * right.y1[0];
  const double scale = std::abs(left.y1[0] * right.y[0]) + std::abs(left.y1.back()) * std::abs(right.y.front());
  if (!(std::abs(wronskian_) > 1e-12 * std::max(1.0, scale)))
    throw Error(ErrorKind::IllConditionedResolvent, "resolvent: lambda is an eigenvalue");
}

std::vector<cd> Resolvent::apply(std::span<const cd> f) const {
  const Grid& g = *grid_;
  std::vector<cd> a(f.size()), b(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    a[i] = phi_[i] * f[i];
    b[i] = psi_[i] * f[i];
  }
  const auto A = g.cumulative(g.to_panels(a));
  const auto B = g.cumulative(g.to_panels(b));
  const cd total = B.back();
  std::vector<cd> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = (psi_[i] * A[i] + phi_[i] * (total - B[i])) / wronskian_;
  return out;
}

double symmetric_operator_norm(const std::function<std::vector<cd>(std::span<const cd>)>& op,
                               const Grid& grid) {
  std::mt19937_64 rng(20260401);
  std::normal_distribution<double> normal;
  std::vector<cd> v(grid.size());
  for (auto& c : v) c = cd(normal(rng), normal(rng));
  auto conj_all = [](std::vector<cd> z) {
    for (auto& c : z) c = std::conj(c);
    return z;
  };
  double sigma = 0.0;
  for (int it = 0; it < 400; ++it) {
    const double nv = grid.l2_norm(v);
    if (nv == 0.0) return 0.0;
    for (auto& c : v) c /= nv;
    const auto w = op(v);
    const double next = grid.l2_norm(w);
    v = conj_all(op(conj_all(w)));
    const bool done = it > 3 && std::abs(next - sigma) <= 1e-11 * std::max(next, 1e-300);
    sigma = next;
    if (done || next == 0.0) break;
  }
  return sigma;
}

double spectral_margin(const Potential& p, cd lambda) {
  // Eigenvalues outside |mu| = 2|lambda| + 1.5 are farther than the circle itself.
  double r2 = 2.0 * std::abs(lambda) + 1.5;
  int count = 0;
  for (int attempt = 0;; ++attempt) {
    try {
      count = count_in_disk(p, r2);
      break;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ContourTooClose || attempt > 5) throw;
      r2 += 0.37;
    }
  }
  double margin = r2 - std::abs(lambda);
  if (count > 0)
    for (const auto& d : localize(p, count, StripParams(1.0)))
      margin = std::min(margin, std::abs(d.lambda - lambda));
  return margin;
}

double resolvent_distance(const Potential& p, const Potential& p_eps, cd lambda, std::size_t min_nodes) {
  for (const auto* q : {&p, &p_eps})
    if (spectral_margin(*q, lambda) <= 0.5)
      throw Error(ErrorKind::IllConditionedResolvent, "resolvent_distance: lambda within 0.5 of the spectrum");
  const std::size_t nodes = std::max(nodes_for(p, min_nodes), nodes_for(p_eps, min_nodes));
  const auto grid = std::make_shared<const Grid>(Grid::with_min_nodes(merged_breakpoints(p, p_eps), nodes));
  const Resolvent a(p, lambda, grid), b(p_eps, lambda, grid);
  return symmetric_operator_norm(
      [&](std::span<const cd> f) {
        auto x = b.apply(f);
        const auto y = a.apply(f);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= y[i];
        return x;
      },
      *grid);
}

double resolvent_identity_defect(const Potential& p, cd lambda, cd mu, std::size_t min_nodes) {
  const auto grid = operator_grid(p, min_nodes);
  const Resolvent rl(p, lambda, grid), rm(p, mu, grid);
  return symmetric_operator_norm(
      [&](std::span<const cd> f) {
        const auto a = rl.apply(f);
        const auto b = rm.apply(f);
        const auto ab = rl.apply(b);
        std::vector<cd> out(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i] - (lambda - mu) * ab[i];
        return out;
      },
      *grid);
}

std::vector<ResolventStep> resolvent_experiment(const Potential& p, cd lambda, double eps0, int halvings) {
  if (halvings < 0 || !(eps0 > 0.0)) throw Error(ErrorKind::Argument, "resolvent_experiment: bad steps");
  std::vector<ResolventStep> steps(halvings + 1);
  parallel_for(steps.size(), [&](std::size_t k) {
    steps[k].eps = eps0 / std::pow(2.0, double(k));
    steps[k].distance = resolvent_distance(p, mollify(p, steps[k].eps), lambda);
  });
  return steps;
}

}  // namespace quasispec
