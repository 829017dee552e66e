#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "quasispec/projector.hpp"

using namespace quasispec;

namespace {

std::vector<cd> sample(const Grid& g, double (*f)(double), double k) {
  std::vector<cd> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = f(k * g.nodes()[i]);
  return out;
}

double distance(const Grid& g, const std::vector<cd>& a, const std::vector<cd>& b) {
  std::vector<cd> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return g.l2_norm(d);
}

}  // namespace

TEST_CASE("free projector") {
  const auto p = Potential::zero();
  const auto P = build_projector(p, 3);
  const Grid& g = *P.grid;
  CHECK(g.size() >= 2048);
  const auto s5 = sample(g, [](double x) { return std::sin(x); }, 5.0);
  CHECK(g.l2_norm(P.apply(s5)) < 1e-9);
  const auto s2 = sample(g, [](double x) { return std::sin(x); }, 2.0);
  CHECK(distance(g, P.apply(s2), s2) < 1e-9);
  CHECK(P.rank() == 3);
  CHECK(idempotency_defect(P, {s2, s5, sample(g, [](double x) { return x * (kPi - x); }, 1.0)}) < 1e-9);
}

TEST_CASE("norm of the first free projector") {
  const auto P = build_projector(Potential::zero(), 1);
  CHECK(norm_L2_to_W21(P) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
  const auto Q = build_projector(Potential::zero(), 2);
  // P2 - P1 projects onto sin 2x, whose W21 norm is sqrt(1 + 4).
  CHECK(norm_L2_to_W21(Q, P) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-8));
}

TEST_CASE("step potential projector reproduces its eigenfunctions") {
  const auto p = Potential::step(1.3, cd(2.0, 1.0));
  const auto P = build_projector(p, 10);
  const auto data = localize(p, 10, StripParams(1.0));
  const auto sys = eigensystem(p, data, P.grid);
  const Grid& g = *P.grid;
  CHECK(distance(g, P.apply(sys.y[6].y), sys.y[6].y) < 1e-7);
  CHECK(P.rank() == 10);
}

TEST_CASE("projector argument checks") {
  CHECK_THROWS_AS(build_projector(Potential::zero(), 0), Error);
}

TEST_CASE("free resolvent") {
  const auto p = Potential::zero();
  const auto grid = operator_grid(p);
  const Resolvent R(p, -1.0, grid);
  const auto s1 = sample(*grid, [](double x) { return std::sin(x); }, 1.0);
  auto half = s1;
  for (auto& c : half) c *= 0.5;
  CHECK(distance(*grid, R.apply(s1), half) < 1e-10);
  const double norm = symmetric_operator_norm([&](std::span<const cd> f) { return R.apply(f); }, *grid);
  CHECK(norm == doctest::Approx(0.5).epsilon(1e-8));
  CHECK_THROWS_AS(Resolvent(p, 4.0, grid), Error);
}

TEST_CASE("resolvent identity") {
  const auto p = Potential::step(0.9, cd(1.5, -0.5)).plus(Potential::linear(cd(0.2, 0.1)));
  CHECK(resolvent_identity_defect(p, cd(-3.0, 2.0), cd(7.5, -4.0)) < 1e-6);
}

TEST_CASE("spectral margin") {
  CHECK(spectral_margin(Potential::zero(), cd(2.0, 0.0)) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_THROWS_AS(resolvent_distance(Potential::zero(), Potential::zero(), cd(4.2, 0.0)), Error);
}

TEST_CASE("mollified resolvent converges") {
  const auto p = Potential::step(1.1, cd(1.0, 0.5));
  const auto steps = resolvent_experiment(p, cd(-2.0, 1.0), 0.2, 3);
  REQUIRE(steps.size() == 4);
  for (std::size_t k = 1; k < steps.size(); ++k) CHECK(steps[k].distance < steps[k - 1].distance);
  CHECK(steps.back().distance < 0.4 * steps.front().distance);
}

TEST_CASE("projector continuity") {
  const auto u0 = Potential::step(1.0, cd(0.5, 0.2));
  const auto d = Potential::cosine_series({0.0, cd(1.0, 0.0), cd(0.0, 0.5)});
  const auto steps = continuity_experiment(u0, d, 0.25, 3, 3);
  REQUIRE(steps.size() == 4);
  for (const auto& s : steps) CHECK_FALSE(s.skipped);
  for (std::size_t k = 1; k < steps.size(); ++k) CHECK(steps[k].norm < steps[k - 1].norm);
  CHECK(steps.back().norm < 0.25 * steps.front().norm);
}
