#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rshe/error.hpp"
#include "rshe/quadrature.hpp"

using namespace rshe;

TEST(Gk15, ExactForPolynomials) {
  const auto r = gk15([](double x) { return x * x * x * x - 2 * x; }, 0.0, 2.0);
  EXPECT_NEAR(r.value, 32.0 / 5.0 - 4.0, 1e-13);
}

TEST(Integrate, SmoothAndSingular) {
  EXPECT_NEAR(integrate([](double x) { return std::exp(-x); }, 0.0, 10.0, 1e-12).value, 1.0 - std::exp(-10.0), 1e-12);
  // integrable endpoint singularity
  const auto r = integrate([](double x) { return std::pow(x, -0.6); }, 0.0, 1.0, 1e-10, 0.0, 500'000);
  EXPECT_NEAR(r.value, 1.0 / 0.4, 1e-7);
}

TEST(Integrate, BudgetExhaustionIsFlagged) {
  const auto r = integrate([](double x) { return std::sin(1.0 / x); }, 1e-6, 1.0, 1e-14, 0.0, 150);
  EXPECT_FALSE(r.converged);
  EXPECT_TRUE(std::isfinite(r.value));
}

TEST(IntegrateSplit, KinkAtInteriorPoint) {
  const auto r = integrate_split([](double x) { return std::abs(x - 0.3); }, {0.0, 0.3, 1.0}, 1e-12);
  EXPECT_NEAR(r.value, 0.5 * (0.09 + 0.49), 1e-13);
}

TEST(CosTail, AgainstClosedForm) {
  // int_T^inf cos(w tau) / (1 + tau^2) dtau, reference from a long direct quadrature
  const double w = 1.3, T = 2.0;
  auto f = [](double t) { return 1.0 / (1.0 + t * t); };
  auto df = [](double t) { return -2.0 * t / ((1 + t * t) * (1 + t * t)); };
  auto d3f = [](double t) {
    const double q = 1 + t * t;
    return 24.0 * t * (1 - t * t) / (q * q * q * q);
  };
  const auto tail = cos_tail(f, df, d3f, w, T, 1e-12);
  // exact: int_0^inf cos(w t)/(1+t^2) = pi/2 e^{-w}
  const auto head = integrate([&](double t) { return std::cos(w * t) * f(t); }, 0.0, T, 1e-14);
  EXPECT_NEAR(head.value + tail.value, 0.5 * std::numbers::pi * std::exp(-w), 1e-10);
}

TEST(QuadratureSpec, Validation) {
  QuadratureSpec q;
  EXPECT_NO_THROW(q.validate());
  q.rel_tol = 1e-11;
  EXPECT_ANY_THROW(q.validate());
  q.rel_tol = 1e-2;
  EXPECT_ANY_THROW(q.validate());
}
