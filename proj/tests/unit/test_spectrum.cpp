#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "quasispec/spectrum.hpp"

using namespace quasispec;

namespace {

/// Roots of sin(rho pi) + (c/rho) sin^2(rho pi / 2) on (0, top) by scan and bisection.
std::vector<double> delta_oracle(double c, double top) {
  auto g = [c](double r) { return std::sin(r * kPi) + c / r * std::pow(std::sin(r * kPi / 2), 2); };
  std::vector<double> roots;
  double a = 1e-3, ga = g(a);
  for (double b = a + 1e-3; b < top; b += 1e-3) {
    const double gb = g(b);
    if (ga == 0.0 || (ga < 0) != (gb < 0)) {
      double lo = a, hi = b;
      for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double m = 0.5 * (lo + hi);
        ((g(lo) < 0) != (g(m) < 0) ? hi : lo) = m;
      }
      roots.push_back(0.5 * (lo + hi));
    }
    a = b;
    ga = gb;
  }
  return roots;
}

/// c making rho = z/pi a double root of the step potential at pi/2, with sin z = z.
std::pair<cd, cd> engineered_double_root() {
  cd z(7.4977, 2.7687);
  for (int i = 0; i < 50; ++i) z -= (std::sin(z) - z) / (std::cos(z) - 1.0);
  const cd rho = z / kPi;
  const cd c = -2.0 * rho * std::cos(z / 2.0) / std::sin(z / 2.0);
  return {c, rho * rho};
}

const StripParams kStrip(1.0, 1.0, 0.25);

}  // namespace

TEST_CASE("counting on circles") {
  for (int n : {1, 3, 7, 20}) CHECK(count_in_disk(Potential::zero(), (n + 0.5) * (n + 0.5)) == n);
  CHECK(count_in_disk(Potential::zero(), 0.25) == 0);
  // rho = 3/2 is itself an eigenvalue root, so |lambda| = 2.25 is refused.
  const auto step = Potential::step(kPi / 2, 3.0);
  CHECK_THROWS_AS(count_in_disk(step, 2.25), Error);
  for (double r : {1.4, 1.6, 2.7}) {
    const auto oracle = delta_oracle(3.0, r);
    CHECK(count_in_disk(step, r * r) == static_cast<int>(oracle.size()));
  }
  CHECK_THROWS_AS(count_in_disk(Potential::zero(), 4.0), Error);
}

TEST_CASE("free and shifted spectra") {
  const auto free = localize(Potential::zero(), 5, kStrip);
  for (int n = 1; n <= 5; ++n) {
    CHECK(std::abs(free[n - 1].lambda - double(n * n)) < 1e-9 * n * n);
    CHECK(std::abs(free[n - 1].s) < 1e-9);
    CHECK(free[n - 1].multiplicity == 1);
  }
  const auto shifted = localize(Potential::linear(2.0), 3, kStrip);
  for (int n = 1; n <= 3; ++n) CHECK(std::abs(shifted[n - 1].lambda - double(n * n + 2)) < 1e-8);
}

TEST_CASE("delta potential against the transcendental oracle") {
  const auto roots = delta_oracle(3.0, 10.6);
  REQUIRE(roots.size() >= 10);
  const auto data = localize(Potential::step(kPi / 2, 3.0), 10, kStrip);
  for (int n = 0; n < 10; ++n) {
    CHECK(std::abs(data[n].rho - roots[n]) < 1e-8);
    CHECK(std::abs(data[n].lambda.imag()) < 1e-8);
  }
}

TEST_CASE("multiplicities") {
  CHECK(multiplicity_at(Potential::zero(), 9.0) == 1);
  const auto [c, lambda0] = engineered_double_root();
  const auto p = Potential::step(kPi / 2, c);
  CHECK(std::abs(char_function(p, lambda0)) < 1e-12);
  CHECK(multiplicity_at(p, lambda0) == 2);
  // Homotopy: a perturbed coupling splits the pair into two simple roots nearby.
  const auto q = Potential::step(kPi / 2, c + 1e-2);
  int simple = 0;
  for (const auto& d : localize(q, 6, kStrip))
    if (std::abs(d.lambda - lambda0) < 0.5) {
      CHECK(d.multiplicity == 1);
      ++simple;
    }
  CHECK(simple == 2);
  const auto data = localize(p, 6, kStrip);
  int doubles = 0;
  for (const auto& d : data)
    if (std::abs(d.lambda - lambda0) < 1e-6) {
      CHECK(d.multiplicity == 2);
      ++doubles;
    }
  CHECK(doubles == 2);
}

TEST_CASE("invariants over potentials") {
  const std::vector<Potential> zoo = {
      Potential::step(1.0, cd(1.0, 0.5)),
      Potential::cosine_series({0.3, cd(0.0, 0.4), 0.2}),
      Potential({{0.0, 1.5, {0.2, cd(0.0, 0.3)}}, {1.5, kPi, {-0.4}}}, {{2.5, 0.7}}, {})};
  for (const auto& p : zoo) {
    const auto data = localize(p, 12, kStrip);
    const auto shifted = localize(p.plus(Potential::linear(1.3)), 12, kStrip);
    const auto conj = localize(p.conj(), 12, kStrip);
    for (int n = 0; n < 12; ++n) {
      CHECK(std::abs(shifted[n].lambda - data[n].lambda - 1.3) < 1e-8 * std::max(1.0, std::abs(data[n].lambda)));
      bool found = false;
      for (const auto& d : conj) found = found || std::abs(d.lambda - std::conj(data[n].lambda)) < 1e-8 * std::abs(d.lambda);
      CHECK(found);
      CHECK(std::abs(char_function(p, data[n].lambda)) < 1e-9 * std::max(1.0, std::abs(data[n].lambda)));
    }
    for (int n : {3, 7, 11}) {
      int inside = 0;
      for (const auto& d : data)
        if (std::abs(d.lambda) < (n + 0.5) * (n + 0.5)) ++inside;
      CHECK(inside == count_in_disk(p, (n + 0.5) * (n + 0.5)));
    }
  }
  const auto real = localize(Potential::cosine_series({0.5, -1.0, 0.7}), 15, kStrip);
  for (const auto& d : real) {
    CHECK(std::abs(d.lambda.imag()) < 1e-8);
    CHECK(d.multiplicity == 1);
  }
}

TEST_CASE("remainders") {
  auto zero = remainders(localize(Potential::zero(), 8, kStrip), 0.25);
  CHECK(zero.weighted_sum < 1e-18);
  auto data = localize(Potential::linear(2.0), 40, kStrip);
  auto rep = remainders(data, 0.25);
  double expect = 0.0;
  for (int n = 1; n <= 40; ++n) {
    const double s = std::sqrt(n * n + 2.0) - n;
    CHECK(std::abs(rep.s_seq[n - 1] - s) < 1e-9);
    expect += s * s * std::sqrt(double(n));
    CHECK(std::abs(rep.tail_profile[n - 1] - expect) < 1e-9);
  }
  CHECK(std::abs(rep.weighted_sum - expect) < 1e-9);
  CHECK(std::abs(rep.norm() - std::sqrt(expect)) < 1e-9);
  CHECK(rep.last_decade_increment() < 0.05);
}

TEST_CASE("ball sweep") {
  const auto zero = ball_sweep(0.0, 0.25, 2, 10, 3);
  for (double v : zero.norms) CHECK(v < 1e-9);
  const auto a = ball_sweep(1.0, 0.25, 3, 20, 7);
  const auto b = ball_sweep(1.0, 0.25, 3, 20, 7);
  CHECK(a.norms == b.norms);
  const auto pots = ball_sample(1.0, 0.25, 3, 7);
  for (const auto& p : pots) CHECK(std::abs(sobolev_norm(p, 0.25) - 1.0) < 1e-12);
  const auto other = ball_sample(1.0, 0.25, 3, 8);
  CHECK(l2_distance(pots[0], other[0]) > 1e-3);
  CHECK(a.max_norm >= a.median_norm);
}

TEST_CASE("csv export") {
  std::ostringstream os;
  write_csv(os, localize(Potential::zero(), 1, kStrip));
  CHECK(os.str().rfind("n,re_lambda,im_lambda,re_s,im_s,multiplicity\n1,", 0) == 0);
}
