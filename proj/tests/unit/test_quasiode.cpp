#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "quasispec/quasiode.hpp"

using namespace quasispec;

namespace {

cd delta_char(double c, double a, cd rho) {
  return (std::sin(rho * kPi) + c / rho * std::sin(rho * a) * std::sin(rho * (kPi - a))) / rho;
}

std::vector<Potential> zoo() {
  return {Potential::zero(),
          Potential::step(kPi / 2, 3.0),
          Potential::linear(2.0),
          Potential::cosine_series({0.0, cd(0.0, 0.2)}),
          Potential({{0.0, 1.0, {0.3, 0.5}}, {1.0, kPi, {cd(0.1, -0.4)}}}, {{2.2, cd(0.5, 0.5)}},
                    {{0.0, 0.3, 0.0, -0.2}, {0.1}})};
}

const OdeOptions kGaussOnly{1e-10, 6, false};

}  // namespace

TEST_CASE("free equation") {
  const std::vector<double> xs = {0.0, 0.5, 1.0, 2.0, kPi};
  auto t = integrate(Potential::zero(), 4.0, {0.0, 1.0}, 0.0, kPi, xs, {}, kGaussOnly);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK(std::abs(t.y[i] - std::sin(2 * xs[i]) / 2.0) < 1e-11);
    CHECK(std::abs(t.y1[i] - std::cos(2 * xs[i])) < 1e-11);
  }
  auto t0 = integrate(Potential::zero(), 0.0, {0.0, 1.0}, 0.0, kPi, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(std::abs(t0.y[i] - xs[i]) < 1e-14);
}

TEST_CASE("delta potential two-segment oracle") {
  const auto p = Potential::step(kPi / 2, 3.0);
  for (bool fast : {true, false}) {
    const OdeOptions opts{1e-10, 6, fast};
    auto t = integrate(p, 1.0, {0.0, 1.0}, 0.0, kPi, std::vector<double>{1.0, kPi}, {}, opts);
    CHECK(std::abs(t.y[0] - std::sin(1.0)) < 1e-11);
    // Past the jump y' gains 3 y(pi/2) while y^[1] is continuous.
    const double ya = 1.0, dya = 0.0 + 3.0 * ya;
    const double x = kPi - kPi / 2;
    CHECK(std::abs(t.y[1] - (ya * std::cos(x) + dya * std::sin(x))) < 1e-10);
    CHECK(std::abs(char_function(p, 4.0, opts) - delta_char(3.0, kPi / 2, 2.0)) < 1e-11);
  }
}

TEST_CASE("char_function closed forms") {
  CHECK(std::abs(char_function(Potential::zero(), 4.0)) < 1e-14);
  CHECK(std::abs(char_function(Potential::zero(), 2.25, kGaussOnly) + 2.0 / 3.0) < 1e-11);
  const auto p = Potential::step(1.1, cd(0.5, -2.0));
  for (cd rho : {cd(3.7, 0.3), cd(12.2, -0.8), cd(0.4, 1.5)}) {
    const cd exact = delta_char(0.0, 1.1, rho) +
                     cd(0.5, -2.0) / (rho * rho) * std::sin(rho * 1.1) * std::sin(rho * (kPi - 1.1));
    CHECK(std::abs(char_function(p, rho * rho, kGaussOnly) - exact) < 1e-10 * std::max(1.0, std::abs(exact)));
  }
}

TEST_CASE("scaled characteristic value survives large imaginary parts") {
  const cd lambda = cd(0.0, 1.0) * 1e6;
  const auto v = char_function_scaled(Potential::zero(), lambda, kGaussOnly);
  const cd rho = principal_sqrt(lambda);
  // sin z ~ -exp(-iz)/(2i) for Im z >> 0, so log omega = -i rho pi + log(i/2) - log rho.
  const cd log_expect = -kI * rho * kPi + std::log(kI / 2.0) - std::log(rho);
  const cd diff = std::log(v.mantissa) + v.log_scale - log_expect;
  CHECK(std::abs(diff.real()) < 1e-7);
  CHECK(std::abs(std::exp(kI * diff.imag()) - 1.0) < 1e-6);
}

TEST_CASE("chain derivative matches closed form and finite differences") {
  auto v = char_chain_values(Potential::zero(), 1.0, 1);
  CHECK(std::abs(v[1] + kPi / 2) < 1e-9);

  const auto p = Potential::step(kPi / 2, 3.0);
  const cd lam(5.3, 0.0);
  const double h = 1e-4;
  const cd fd = (char_function(p, lam + h) - char_function(p, lam - h)) / (2 * h);
  const auto chain = char_chain_values(p, lam, 2);
  CHECK(std::abs(chain[1] - fd) < 1e-6 * std::abs(fd));
  const cd fd2 = (char_function(p, lam + h) - 2.0 * char_function(p, lam) + char_function(p, lam - h)) / (h * h);
  CHECK(std::abs(2.0 * chain[2] - fd2) < 1e-4 * std::abs(fd2));
  CHECK(std::abs(chain[0] - char_function(p, lam)) < 1e-10);

  const auto traces = char_chain(p, lam, 0);
  REQUIRE(traces.traces.size() == 1);
  CHECK(std::abs(traces.traces[0].y.back() - char_function(p, lam)) < 1e-10);
}

TEST_CASE("Wronskian constancy and forward/backward consistency over the zoo") {
  std::vector<double> xs;
  for (int i = 0; i <= 40; ++i) xs.push_back(kPi * i / 40);
  for (const auto& p : zoo()) {
    for (cd lam : {cd(3.0, 0.0), cd(-20.0, 5.0), cd(150.0, 30.0)}) {
      auto a = integrate(p, lam, {0.0, 1.0}, 0.0, kPi, xs, {}, kGaussOnly);
      auto b = integrate(p, lam, {1.0, 0.3}, 0.0, kPi, xs, {}, kGaussOnly);
      // Relative to the size of the products, which grow like exp(2 |Im rho| x).
      const cd w0 = wronskian(a, b, 0);
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const double scale = std::abs(a.y[i] * b.y1[i]) + std::abs(b.y[i] * a.y1[i]);
        CHECK(std::abs(wronskian(a, b, i) - w0) < 1e-8 * std::max(scale, std::abs(w0)));
      }
      auto back = integrate(p, lam, {a.y.back(), a.y1.back()}, kPi, 0.0, {}, {}, kGaussOnly);
      const double scale = std::max(1.0, std::abs(a.y1.back()));
      CHECK(std::abs(back.y.front()) < 1e-8 * scale);
      CHECK(std::abs(back.y1.front() - 1.0) < 1e-8 * scale);
    }
  }
}

TEST_CASE("conjugation symmetry and shift covariance") {
  for (const auto& p : zoo()) {
    for (cd lam : {cd(2.0, 1.0), cd(30.0, -4.0)}) {
      const cd a = char_function(p, lam);
      const cd b = char_function(p.conj(), std::conj(lam));
      CHECK(std::abs(b - std::conj(a)) < 1e-9 * std::max(1.0, std::abs(a)));
      const cd c = 1.7;
      const cd s = char_function(p.plus(Potential::linear(c)), lam);
      const cd t = char_function(p, lam - c);
      CHECK(std::abs(s - t) < 1e-8 * std::max(1.0, std::abs(t)));
    }
  }
}

TEST_CASE("forcing enters as l(y) = lambda y + f") {
  // u = 0, lambda = 0: -y'' = f with f = 1 gives y = x - x^2/2 for y(0) = 0, y'(0) = 1.
  const std::vector<double> xs = {1.0, 2.0};
  auto t = integrate(Potential::zero(), 0.0, {0.0, 1.0}, 0.0, kPi, xs, [](double) { return cd(1.0); });
  for (std::size_t i = 0; i < xs.size(); ++i)
    CHECK(std::abs(t.y[i] - (xs[i] - xs[i] * xs[i] / 2)) < 1e-11);
}

TEST_CASE("lagrange defect") {
  const auto grid = Grid::with_min_nodes({}, 512);
  auto fn = [&](auto&& f, auto&& f1) {
    DomainFunction d;
    for (double x : grid.nodes()) {
      d.f.push_back(f(x));
      d.f1.push_back(f1(x));
    }
    return d;
  };
  const auto f = fn([](double x) { return cd(std::sin(x)); }, [](double x) { return cd(std::cos(x)); });
  const auto g = fn([](double x) { return cd(std::sin(2 * x)); }, [](double x) { return cd(2 * std::cos(2 * x)); });
  CHECK(lagrange_defect(Potential::zero(), grid, f, g) < 1e-10);
  const auto zero = fn([](double) { return cd(0.0); }, [](double) { return cd(0.0); });
  CHECK(lagrange_defect(Potential::zero(), grid, zero, zero) == 0.0);

  // Domain functions of a complex smooth potential: f^[1] = f' - u f.
  const auto p = Potential::cosine_series({0.2, cd(0.0, 0.5)});
  auto quasi = [&](const Potential& q, auto&& h, auto&& dh) {
    return fn(h, [&](double x) { return dh(x) - q(x) * h(x); });
  };
  const auto f2 = quasi(p, [](double x) { return cd(x * (kPi - x)); }, [](double x) { return cd(kPi - 2 * x); });
  const auto g2 = quasi(p.conj(), [](double x) { return cd(std::sin(3 * x), 0.5 * std::sin(x)); },
                        [](double x) { return cd(3 * std::cos(3 * x), 0.5 * std::cos(x)); });
  CHECK(lagrange_defect(p, grid, f2, g2) < 1e-8);
}

TEST_CASE("csv export") {
  auto t = integrate(Potential::zero(), 1.0, {0.0, 1.0}, 0.0, kPi, std::vector<double>{0.0, 1.0});
  std::ostringstream os;
  write_csv(os, t);
  CHECK(os.str().rfind("x,re_y,im_y,re_y1,im_y1\n0,0,0,1,0\n", 0) == 0);
}
