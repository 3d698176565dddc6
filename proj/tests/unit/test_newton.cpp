#include <cmath>
#include <random>

#include "cot/error.hpp"
#include "cot/newton.hpp"
#include "doctest.h"

using namespace cot;
using doctest::Approx;

TEST_CASE("closed-form roots") {
  // 2 / (1 + x) - 1 vanishes at x = 1.
  auto logistic = [](double x) { return ValueAndSlope{2.0 / (1.0 + x) - 1.0, -2.0 / ((1.0 + x) * (1.0 + x))}; };
  NewtonOptions opt;
  opt.tol = 1e-14;
  CHECK(newton_root(logistic, 1e-3, opt).root == Approx(1.0).epsilon(1e-12));
  CHECK(newton_root(logistic, 1e3, opt).root == Approx(1.0).epsilon(1e-12));

  auto line = [](double x) { return ValueAndSlope{3.0 - x, -1.0}; };
  const NewtonResult r = newton_root(line, 1.0, opt);
  CHECK(r.root == Approx(3.0).epsilon(1e-14));
  CHECK(r.evaluations >= 2);
}

TEST_CASE("steep saturating equation keeps the residual below 1e-8 u") {
  // u - eta x / (1 + x) with eta = 1e6, u = 1: root x = 1 / (eta - 1).
  const double eta = 1e6, u = 1.0;
  auto h = [&](double x) {
    const double d = 1.0 + x;
    return ValueAndSlope{u - eta * x / d, -eta / (d * d)};
  };
  NewtonOptions opt;
  opt.tol = 1e-12;
  const NewtonResult r = newton_root(h, 1.0, opt);
  CHECK(std::abs(h(r.root).value) <= 1e-8 * u);
  CHECK(r.root == Approx(1.0 / (eta - 1.0)).epsilon(1e-10));
}

TEST_CASE("log coordinates reach roots far outside double range") {
  // h(t) = 0.25 - sigma(t - 800), the shape of a single saturating cell;
  // root t = 800 + ln(1/3), i.e. x far above DBL_MAX.
  auto h = [](double t) {
    const double s = 1.0 / (1.0 + std::exp(800.0 - t));
    return ValueAndSlope{0.25 - s, -s * (1.0 - s)};
  };
  NewtonOptions opt;
  opt.tol = 1e-12;
  CHECK(newton_root_log(h, 0.0, opt).root == Approx(800.0 - std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("randomized sums of logistic terms") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> w(0.1, 2.0), logc(-20.0, 20.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> weight(6), coef(6);
    double total = 0.0;
    for (std::size_t k = 0; k < 6; ++k) {
      weight[k] = w(rng);
      coef[k] = std::exp(logc(rng));
      total += weight[k];
    }
    std::uniform_real_distribution<double> frac(0.05, 0.95);
    const double mass = frac(rng) * total;
    auto h = [&](double x) {
      double value = mass, slope = 0.0;
      for (std::size_t k = 0; k < 6; ++k) {
        const double p = x * coef[k];
        value -= weight[k] * p / (1.0 + p);
        slope -= weight[k] * coef[k] / ((1.0 + p) * (1.0 + p));
      }
      return ValueAndSlope{value, slope};
    };
    NewtonOptions opt;
    opt.tol = 1e-13;
    const NewtonResult r = newton_root(h, 1.0, opt);
    CHECK(std::abs(h(r.root).value) <= 1e-9 * mass);
  }
}

TEST_CASE("invalid hints and unbracketable functions") {
  auto line = [](double x) { return ValueAndSlope{3.0 - x, -1.0}; };
  CHECK_THROWS_AS(newton_root(line, 0.0), Error);
  CHECK_THROWS_AS(newton_root(line, -1.0), Error);
  CHECK_THROWS_AS(newton_root_log(line, std::nan("")), Error);

  auto positive = [](double) { return ValueAndSlope{1.0, 0.0}; };
  NewtonOptions opt;
  opt.max_bracket_steps = 20;
  try {
    newton_root(positive, 1.0, opt);
    FAIL("expected a bracketing failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNewtonFailure);
  }
}
