#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "quasispec/gauss.hpp"
#include "quasispec/potential.hpp"

using namespace quasispec;

TEST_CASE("eval_u on elementary potentials") {
  CHECK(std::abs(eval_u(Potential::zero(), 1.0)) == 0.0);
  CHECK(std::abs(eval_u(Potential::linear(2.0), kPi) - 2.0 * kPi) < 1e-14);
  const auto s = Potential::step(kPi / 2, 3.0);
  CHECK(std::abs(eval_u(s, kPi / 4)) == 0.0);
  CHECK(std::abs(eval_u(s, 3 * kPi / 4) - 3.0) < 1e-15);
  CHECK(std::abs(eval_u(s, kPi / 2) - 3.0) < 1e-15);
  CHECK(std::abs(s.left_limit(kPi / 2)) == 0.0);
  CHECK_THROWS_AS(eval_u(s, 4.0), Error);
}

TEST_CASE("sobolev_norm of cosines") {
  CHECK(sobolev_norm(Potential::zero(), 0.3) == 0.0);
  const auto c1 = Potential::cosine_series({0.0, 1.0});
  CHECK(std::abs(sobolev_norm(c1, 0.0) - std::sqrt(kPi / 2)) < 1e-12);
  CHECK(std::abs(sobolev_norm(c1, 0.0) - l2_norm(c1)) < 1e-10);
  const auto c3 = Potential::cosine_series({0.0, 0.0, 0.0, 1.0});
  CHECK(std::abs(sobolev_norm(c3, 0.25) - std::pow(10.0, 0.125) * std::sqrt(kPi / 2)) < 1e-12);
}

TEST_CASE("sobolev_norm is monotone in sigma and diverges for steps at sigma >= 1/2") {
  const auto s = Potential::step(1.0, 2.0).plus(Potential::linear(0.3, 0.1));
  double prev = 0.0;
  for (double sigma : {0.0, 0.1, 0.2, 0.3, 0.4}) {
    const double v = sobolev_norm(s, sigma);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK(std::abs(sobolev_norm(s, 0.0) - l2_norm(s)) < 1e-6 * l2_norm(s));
  CHECK(std::isinf(sobolev_norm(s, 0.75)));
}

TEST_CASE("fourier_strip closed forms") {
  CHECK(std::abs(fourier_strip(Potential::zero(), 5.0)) == 0.0);
  CHECK(std::abs(fourier_strip(Potential::constant(1.0), 2.0)) < 1e-14);
  CHECK(std::abs(fourier_strip(Potential::step(kPi / 2, 1.0), 4.0)) < 1e-14);
  const cd rho(3.3, 0.4);
  const cd expect = (std::exp(kI * rho * kPi) - 1.0) / (kI * rho);
  CHECK(std::abs(fourier_strip(Potential::constant(1.0), rho) - expect) < 1e-13);
  CHECK_THROWS_AS(fourier_strip(Potential::constant(1.0), cd(1.0, 2.0), StripParams(0.5, 1.0, 0.25)),
                  Error);
}

TEST_CASE("fourier_strip against Gauss quadrature for a mixed potential") {
  const Potential p({{0.0, 1.2, {0.5, -1.0, 0.25}}, {1.2, kPi, {cd(0.0, 1.0), 0.3}}},
                    {{2.0, cd(-0.7, 0.2)}}, {{0.1, 0.4}, {0.2}});
  const cd rho(7.3, 0.2);
  const auto rule = gauss_legendre(64);
  cd sum = 0.0;
  const double edges[] = {0.0, 1.2, 2.0, kPi};
  for (int k = 0; k < 3; ++k) {
    const double a = edges[k], b = edges[k + 1];
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double x = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[i];
      sum += 0.5 * (b - a) * rule.weights[i] * p(x) * std::exp(kI * rho * x);
    }
  }
  CHECK(std::abs(fourier_strip(p, rho) - sum) < 1e-12);
}

TEST_CASE("windowed_transform_seq") {
  const std::vector<cd> rhos = {1.0, 2.0, 3.0, 4.0};
  auto c = windowed_transform_seq(Potential::constant(1.0), kPi, rhos);
  CHECK(std::abs(c[0] - (-2.0 / kI)) < 1e-13);
  CHECK(std::abs(c[1]) < 1e-13);
  CHECK(std::abs(c[2] - (-2.0 / (3.0 * kI))) < 1e-13);
  for (auto v : windowed_transform_seq(Potential::zero(), 1.0, rhos)) CHECK(std::abs(v) == 0.0);
  const std::vector<cd> bad = {1.0, 2.3};
  CHECK_THROWS_AS(windowed_transform_seq(Potential::constant(1.0), 1.0, bad), Error);

  const std::vector<cd> shifted = {1.1, 2.1, 3.1};
  const auto cc = windowed_transform_seq(Potential::cosine_series({0.0, 0.0, 1.0}), kPi, shifted);
  for (std::size_t n = 0; n < shifted.size(); ++n) {
    const cd r = shifted[n];
    auto anti = [&](double t) {
      cd acc = 0.0;
      for (double w : {2.0, -2.0}) acc += 0.5 * std::exp(kI * (r + w) * t) / (kI * (r + w));
      return acc;
    };
    CHECK(std::abs(cc[n] - (anti(kPi) - anti(0.0))) < 1e-12);
  }
}

TEST_CASE("mollify") {
  const auto trig = Potential::cosine_series({0.2, 0.5, -0.3});
  CHECK(l2_distance(mollify(trig, 0.4), trig) < 1e-14);
  CHECK(mollify(Potential::zero(), 0.1).is_zero());
  const auto s = Potential::step(kPi / 2, 1.0);
  CHECK(l2_distance(mollify(s, 0.01), s) < 0.15);
  double prev = 1e300;
  for (double eps = 0.2; eps > 0.005; eps /= 2) {
    const double d = l2_distance(mollify(s, eps), s);
    CHECK(d <= prev + 1e-12);
    prev = d;
  }
}

TEST_CASE("StripParams validation") {
  const StripParams sp(0.1, 1.0, 0.25);
  CHECK(std::abs(sp.kappa - std::cosh(2 * kPi * 0.1)) < 1e-15);
  CHECK_THROWS_AS(StripParams(0.1, 1.0, 1.5), Error);
}

TEST_CASE("JSON round trip") {
  const auto j = nlohmann::json::parse(
      R"({"pieces":[{"from":0,"to":3.14159,"poly":[1.0,[0.0,2.0]]}],"jumps":[{"at":1.5708,"height":3.0}],"trig":{"cos":[0.5],"sin":[0.25]}})");
  const auto p = potential_from_json(j);
  const auto q = potential_from_json(potential_to_json(p));
  for (double x : {0.1, 1.0, 2.0, 3.0}) CHECK(std::abs(p(x) - q(x)) < 1e-15);
  CHECK(!p.is_real());
  CHECK_THROWS_AS(potential_from_json(nlohmann::json::parse(R"({"jumps":[{"at":4.0,"height":1}]})")),
                  Error);
}
