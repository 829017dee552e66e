#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "quasispec/pruefer.hpp"

using namespace quasispec;

namespace {

double sup_diff(const std::vector<cd>& a, const std::vector<cd>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("upsilon closed forms") {
  CHECK(upsilon(Potential::zero(), 10.0, StripParams(0.0, 0.0, 0.0)) == 0.0);
  CHECK(std::abs(upsilon(Potential::zero(), 10.0, StripParams(0.0, 1.0, 0.0)) - 0.15) < 1e-15);
  // u = 1, rho = n: |int sin 2nt| peaks at 1/n where the cosine integral vanishes.
  const auto parts = upsilon_parts(Potential::constant(1.0), 3.0, StripParams(0.0, 0.0, 0.0));
  CHECK(parts.oscillatory >= 1.0 / 3.0 - 1e-12);
  double expect = 0.0;
  for (int i = 0; i <= 200000; ++i) {
    const double x = kPi * i / 200000;
    expect = std::max(expect, std::abs((1 - std::cos(6 * x)) / 6) + std::abs(std::sin(6 * x) / 6));
  }
  CHECK(std::abs(parts.oscillatory - expect) < 1e-6);
  CHECK_THROWS_AS(upsilon(Potential::zero(), 0.0, StripParams()), Error);
}

TEST_CASE("contraction condition") {
  CHECK(condition_holds(Potential::zero(), 1.0, StripParams(0.0, 0.0, 0.0)));
  const auto parts = upsilon_parts(Potential::zero(), 100.0, StripParams(0.0, 1.0, 0.0));
  CHECK(std::abs(parts.threshold - 1.0 / 128.0 / (65.0 * 65.0)) < 1e-18);
  CHECK(std::abs(parts.threshold - 1.849e-6) < 1e-9);
  CHECK_FALSE(condition_holds(Potential::constant(1.0), 2.0, StripParams(0.0, std::sqrt(kPi), 0.0)));
  CHECK_THROWS_AS(solve_phase(Potential::constant(1.0), 2.0, StripParams(0.0, std::sqrt(kPi), 0.0)),
                  Error);
}

TEST_CASE("free phase") {
  const auto f = solve_phase(Potential::zero(), 5.0, StripParams(0.0, 0.0, 0.0));
  CHECK(f.iterations == 1);
  for (std::size_t i = 0; i < f.grid.size(); ++i) CHECK(std::abs(f.theta[i] - 5.0 * f.grid[i]) < 1e-15);
  const auto field = amplitude(f, Potential::zero());
  for (auto r : field.r_amp) CHECK(std::abs(r - 1.0) < 1e-15);
  const auto t = reconstruct(field);
  for (std::size_t i = 0; i < t.grid.size(); ++i) {
    CHECK(std::abs(t.y[i] - std::sin(5 * t.grid[i]) / 5.0) < 1e-15);
    CHECK(std::abs(t.y1[i] - std::cos(5 * t.grid[i])) < 1e-15);
  }
}

TEST_CASE("first Picard iterate for a small constant") {
  const auto p = Potential::constant(0.01);
  const StripParams sp(0.0, 0.01 * std::sqrt(kPi), 0.0);
  const auto f = solve_phase(p, 50.0, sp);
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    const double x = f.grid[i];
    const double first = 0.01 * (1 - std::cos(100 * x)) / 100;
    CHECK(std::abs(f.f_pert[i] - first) < 1e-6);
  }
  CHECK(f.theta[0] == cd(0.0));
  const auto field = amplitude(f, p);
  CHECK(std::abs(field.r_amp[0] - 1.0) < 1e-15);
  for (std::size_t i = 0; i < f.grid.size(); ++i)
    CHECK(std::abs(field.r_amp[i] - std::exp(-0.01 * std::sin(100 * f.grid[i]) / 100)) < 1e-4);
}

TEST_CASE("polar representation matches direct integration") {
  const auto p = Potential::cosine_series({0.0, 1e-3, cd(0.0, 5e-4), -2e-4});
  const StripParams sp(0.1, l2_norm(p), 0.25);
  for (cd rho : {cd(30.0, 0.0), cd(40.0, 0.05)}) {
    REQUIRE(condition_holds(p, rho, sp));
    const auto field = amplitude(solve_phase(p, rho, sp), p);
    CHECK(field.ratio < 10.0);
    CHECK(detail::fixed_point_residual(field, p) < 1e-10);
    const auto polar = reconstruct(field);
    const auto direct = integrate(p, rho * rho, {0.0, 1.0}, 0.0, kPi, polar.grid);
    CHECK(sup_diff(polar.y, direct.y) < 1e-6);
    CHECK(sup_diff(polar.y1, direct.y1) < 1e-6);
  }
}

TEST_CASE("polar identity for real data") {
  const auto p = Potential::step(1.0, 2e-4).plus(Potential::cosine_series({0.0, 3e-4}));
  const StripParams sp(0.0, l2_norm(p), 0.0);
  const double rho = 60.0;
  REQUIRE(condition_holds(p, rho, sp));
  const auto field = amplitude(solve_phase(p, rho, sp), p);
  const auto t = reconstruct(field);
  for (std::size_t i = 0; i < t.grid.size(); ++i) {
    const double lhs = std::norm(field.r_amp[i]);
    const double rhs = std::norm(rho * t.y[i]) + std::norm(t.y1[i]);
    CHECK(std::abs(lhs - rhs) < 1e-8);
  }
}

TEST_CASE("unguarded iteration reports its own convergence") {
  const auto p = Potential::cosine_series({0.0, 0.3});
  const auto field = detail::picard_unguarded(p, 40.0, StripParams(0.0, 0.5, 0.25));
  CHECK(field.iterations > 0);
  const auto t = reconstruct(amplitude(field, p));
  const auto direct = integrate(p, 1600.0, {0.0, 1.0}, 0.0, kPi, t.grid);
  CHECK(sup_diff(t.y, direct.y) < 1e-6);
}
