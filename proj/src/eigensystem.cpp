#include "quasispec/eigensystem.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "quasispec/parallel.hpp"
#include "quasispec/quasiode.hpp"

namespace quasispec {
namespace {

const double kSqrt2Pi = std::sqrt(2.0 / kPi);

cd bilinear(const Grid& g, const std::vector<cd>& a, const std::vector<cd>& b) {
  cd s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += g.weights()[i] * a[i] * b[i];
  return s;
}

/// Scale making omega unit-norm with (y, sin nx) real and nonnegative.
cd normalization(const Grid& g, const std::vector<cd>& y, int n) {
  const double norm = g.l2_norm(y);
  if (!(norm > 1e-300) || !std::isfinite(norm))
    throw Error(ErrorKind::DegenerateTrace, "eigenfunction: trace has zero norm");
  cd proj = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) proj += g.weights()[i] * y[i] * std::sin(n * g.nodes()[i]);
  const cd phase = std::abs(proj) > 1e-14 * norm ? std::conj(proj) / std::abs(proj) : cd(1.0);
  return phase / norm;
}

double sup_abs(const std::vector<cd>& v) { return sup_norm(v); }

}  // namespace

std::shared_ptr<const Grid> eigen_grid(const Potential& p, std::size_t min_nodes) {
  return std::make_shared<const Grid>(Grid::with_min_nodes(p.breakpoints(), min_nodes));
}

EigenFunction eigenfunction(const Potential& p, const SpectralDatum& d, std::shared_ptr<const Grid> grid) {
  auto trace = integrate(p, d.lambda, {0.0, 1.0}, 0.0, kPi, grid->nodes());
  const cd scale = normalization(*grid, trace.y, d.n);
  EigenFunction e;
  e.datum = d;
  e.grid = std::move(grid);
  e.y.resize(trace.y.size());
  e.y1.resize(trace.y.size());
  for (std::size_t i = 0; i < trace.y.size(); ++i) {
    e.y[i] = scale * trace.y[i];
    e.y1[i] = scale * trace.y1[i];
  }
  return e;
}

std::vector<EigenFunction> root_chain(const Potential& p, const SpectralDatum& d,
                                      std::shared_ptr<const Grid> grid) {
  if (d.multiplicity <= 1) return {eigenfunction(p, d, std::move(grid))};
  const auto chain = char_chain(p, d.lambda, d.multiplicity - 1, grid->nodes());
  const cd scale = normalization(*grid, chain.traces[0].y, d.n);
  std::vector<EigenFunction> out;
  for (int j = 0; j < d.multiplicity; ++j) {
    EigenFunction e;
    e.datum = d;
    e.datum.n = d.n + j;
    e.datum.s = d.rho - double(d.n + j);
    e.grid = grid;
    e.chain_index = j;
    const auto& t = chain.traces[j];
    for (std::size_t i = 0; i < t.y.size(); ++i) {
      e.y.push_back(scale * t.y[i]);
      e.y1.push_back(scale * t.y1[i]);
    }
    out.push_back(std::move(e));
  }
  // Linear independence of the chain: normalized Gram determinant.
  const int m = d.multiplicity;
  Eigen::MatrixXcd G(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      G(i, j) = grid->inner(out[j].y, out[i].y) / (grid->l2_norm(out[i].y) * grid->l2_norm(out[j].y));
  if (std::abs(G.determinant()) < 1e-10)
    throw Error(ErrorKind::InconsistentMultiplicity, "root_chain: chain functions are dependent");
  return out;
}

std::vector<BiorthElement> biorthogonal(const Potential&, const std::vector<EigenFunction>& chain) {
  if (chain.empty()) return {};
  const Grid& g = *chain.front().grid;
  const std::size_t m = chain.size();
  // The adjoint chain at conj(lambda) for conj(u) is the conjugated chain.
  Eigen::MatrixXcd A(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) A(i, j) = bilinear(g, chain[i].y, chain[j].y);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
  const auto& sv = svd.singularValues();
  if (!(sv(m - 1) > 1e-10 * std::max(1.0, sv(0))))
    throw Error(ErrorKind::DegeneratePairing, "biorthogonal: pairing matrix is singular");
  const Eigen::MatrixXcd B = A.inverse().adjoint();
  std::vector<BiorthElement> out(m);
  for (std::size_t k = 0; k < m; ++k) {
    out[k].datum = chain[k].datum;
    out[k].grid = chain[k].grid;
    out[k].w.assign(chain[k].y.size(), 0.0);
    out[k].w1.assign(chain[k].y.size(), 0.0);
    for (std::size_t s = 0; s < m; ++s)
      for (std::size_t i = 0; i < chain[s].y.size(); ++i) {
        out[k].w[i] += B(k, s) * std::conj(chain[s].y[i]);
        out[k].w1[i] += B(k, s) * std::conj(chain[s].y1[i]);
      }
  }
  return out;
}

EigenSystem eigensystem(const Potential& p, const std::vector<SpectralDatum>& data,
                        std::shared_ptr<const Grid> grid) {
  EigenSystem sys;
  sys.grid = grid ? std::move(grid) : eigen_grid(p);
  std::vector<std::size_t> heads;
  for (std::size_t i = 0; i < data.size(); i += std::max(1, data[i].multiplicity)) heads.push_back(i);
  std::vector<std::vector<EigenFunction>> chains(heads.size());
  std::vector<std::vector<BiorthElement>> partners(heads.size());
  parallel_for(heads.size(), [&](std::size_t c) {
    chains[c] = root_chain(p, data[heads[c]], sys.grid);
    partners[c] = biorthogonal(p, chains[c]);
  });
  for (std::size_t c = 0; c < heads.size(); ++c)
    for (std::size_t j = 0; j < chains[c].size(); ++j) {
      if (sys.y.size() >= data.size()) break;
      sys.y.push_back(std::move(chains[c][j]));
      sys.w.push_back(std::move(partners[c][j]));
    }
  return sys;
}

double biorthogonality_defect(const EigenSystem& sys) {
  double worst = 0.0;
  for (std::size_t i = 0; i < sys.y.size(); ++i)
    for (std::size_t j = 0; j < sys.w.size(); ++j) {
      const cd v = sys.grid->inner(sys.y[i].y, sys.w[j].w) - (i == j ? 1.0 : 0.0);
      worst = std::max(worst, std::abs(v));
    }
  return worst;
}

double EfasReport::last_decade_increment() const {
  const std::size_t n = partial_sums.size();
  if (n <= 10) return 0.0;
  const double before = partial_sums[n - 11];
  if (before == 0.0) return partial_sums.back() == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return (partial_sums.back() - before) / before;
}

EfasReport efas_report(const Potential& p, const std::vector<SpectralDatum>& data, int n_lo,
                       double sigma, std::shared_ptr<const Grid> grid) {
  EfasReport rep;
  rep.sigma = sigma;
  int start = static_cast<int>(data.size()) + 1;
  for (int i = static_cast<int>(data.size()) - 1; i >= 0; --i) {
    if (std::abs(data[i].rho - double(data[i].n)) >= 0.25) break;
    start = data[i].n;
  }
  rep.start_index = start;
  const int first = std::max(start, n_lo);
  if (first > static_cast<int>(data.size())) return rep;
  const auto sys = eigensystem(p, data, grid);
  const Grid& g = *sys.grid;
  const std::size_t count = data.size() - first + 1;
  rep.n.resize(count);
  rep.beta.resize(count);
  rep.gamma.resize(count);
  parallel_for(count, [&](std::size_t k) {
    const int n = first + static_cast<int>(k);
    const auto& y = sys.y[n - 1];
    const auto& w = sys.w[n - 1];
    std::vector<cd> phi(g.size()), psi(g.size()), phi1(g.size()), psi1(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.nodes()[i];
      const double sn = kSqrt2Pi * std::sin(n * x), cs = kSqrt2Pi * std::cos(n * x);
      phi[i] = y.y[i] - sn;
      psi[i] = w.w[i] - sn;
      phi1[i] = y.y1[i] / double(n) - cs;
      psi1[i] = w.w1[i] / double(n) - cs;
    }
    rep.n[k] = n;
    rep.beta[k] = sup_abs(phi) + sup_abs(psi);
    rep.gamma[k] = sup_abs(phi1) + sup_abs(psi1);
  });
  double sum = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    sum += (rep.beta[k] * rep.beta[k] + rep.gamma[k] * rep.gamma[k]) * std::pow(double(rep.n[k]), 2.0 * sigma);
    rep.partial_sums.push_back(sum);
  }
  rep.weighted_sum = sum;
  return rep;
}

double gram_condition(const Potential& p, const std::vector<SpectralDatum>& data,
                      std::shared_ptr<const Grid> grid) {
  const auto sys = eigensystem(p, data, std::move(grid));
  const std::size_t m = sys.y.size();
  Eigen::MatrixXcd G(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) G(i, j) = sys.grid->inner(sys.y[j].y, sys.y[i].y);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return ev(m - 1) / ev(0);
}

void write_csv(std::ostream& os, const EfasReport& report) {
  os << "n,beta,gamma\n";
  char buf[96];
  for (std::size_t k = 0; k < report.n.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", report.n[k], report.beta[k], report.gamma[k]);
    os << buf;
  }
}

}  // namespace quasispec
