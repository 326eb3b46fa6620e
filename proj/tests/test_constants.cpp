#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <random>

#include "rshe/constants.hpp"
#include "rshe/error.hpp"
#include "rshe/linear_she.hpp"
#include "rshe/quadrature.hpp"
#include "rshe/rng.hpp"

using namespace rshe;

namespace {
constexpr double kPi = std::numbers::pi;
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST(Gamma, MatchesStdTgammaOnWorkingRange) {
  for (double x = 0.01; x < 5.0; x += 0.0137) EXPECT_LT(rel(gamma_fn(x), std::tgamma(x)), 1e-13) << x;
}

TEST(Gamma, KnownValues) {
  EXPECT_NEAR(gamma_fn(0.5), std::sqrt(kPi), 1e-14);
  EXPECT_NEAR(gamma_fn(1.0), 1.0, 1e-14);
  EXPECT_NEAR(gamma_fn(4.0), 6.0, 1e-12);
}

TEST(Kappa, Values) {
  EXPECT_NEAR(kappa(0.5), 0.751126, 1e-6);
  EXPECT_NEAR(kappa(0.5), std::pow(kPi, -0.25), 1e-14);
  EXPECT_NEAR(kappa(0.3), 0.705547, 1e-6);
  EXPECT_NEAR(kappa(0.3) * kappa(0.3), 0.4977964, 1e-7);
}

TEST(Kappa, GammaIdentity) {
  for (double H : {0.26, 0.3, 0.37, 0.45, 0.5})
    EXPECT_LT(rel(kappa(H) * kappa(H) * gamma_fn(H), gamma_fn(2.0 * H)), 1e-14);
}

TEST(Kappa, DomainErrors) {
  EXPECT_THROW(kappa(0.25), DomainError);
  EXPECT_THROW(kappa(0.2), DomainError);
  EXPECT_THROW(kappa(0.51), DomainError);
  EXPECT_THROW(kappa_tilde(0.6), DomainError);
  EXPECT_THROW(spectral_constant(0.1), DomainError);
}

TEST(KappaTilde, Values) {
  EXPECT_NEAR(kappa_tilde(0.5), 0.631619, 1e-6);
  EXPECT_NEAR(kappa_tilde(0.5) * kappa_tilde(0.5), 1.0 / std::sqrt(2.0 * kPi), 1e-14);
  EXPECT_NEAR(kappa_tilde(0.3), 0.553561, 1e-6);
  EXPECT_NEAR(kappa_tilde(0.3) * kappa_tilde(0.3), 0.3064296, 1e-7);
}

TEST(KappaTilde, RatioIdentity) {
  for (double H = 0.2501; H <= 0.5; H += 0.0099) {
    const double r = kappa_tilde(H) * kappa_tilde(H) / (kappa(H) * kappa(H));
    EXPECT_LT(rel(r, std::pow(2.0, H - 1.0)), 1e-14);
  }
}

TEST(SpectralConstant, Values) {
  EXPECT_NEAR(spectral_constant(0.3), 0.115048, 1e-6);
  EXPECT_NEAR(spectral_constant(0.5), 1.0 / (2.0 * kPi), 1e-14);
  for (double H = 0.2501; H <= 0.5; H += 0.01) EXPECT_GT(spectral_constant(H), 0.0);
}

TEST(RhoH, Values) {
  for (double H : {0.1, 0.3, 0.7}) EXPECT_DOUBLE_EQ(rho_H(0, H), 1.0);
  EXPECT_NEAR(rho_H(1, 0.3), -0.384428, 1e-6);
  EXPECT_NEAR(rho_H(1, 0.3), 0.5 * (std::pow(2.0, 0.3) - 2.0), 1e-15);
}

TEST(RhoH, SymmetricAndDecaying) {
  for (long long k = 1; k < 50; ++k) EXPECT_DOUBLE_EQ(rho_H(k, 0.3), rho_H(-k, 0.3));
  for (long long k = 2; k <= 10000; ++k) ASSERT_LE(std::abs(rho_H(k, 0.3)), std::abs(rho_H(k - 1, 0.3))) << k;
}

TEST(RhoH, SquaredSumConverges) {
  double s = 0.0;
  for (long long k = 1; k <= 20000; ++k) {
    const double inc = rho_H(k, 0.3) * rho_H(k, 0.3);
    if (k >= 10000) ASSERT_LT(inc, 1e-8);
    s += inc;
  }
  EXPECT_TRUE(std::isfinite(s));
}

TEST(HeatKernel, Values) {
  EXPECT_NEAR(heat_kernel(1.0, 0.0), 0.282095, 1e-6);
  EXPECT_THROW(heat_kernel(0.0, 1.0), DomainError);
  EXPECT_THROW(heat_kernel(-1.0, 1.0), DomainError);
}

TEST(HeatKernel, Scaling) {
  for (double t : {0.1, 0.7, 3.0})
    for (double x : {-2.0, 0.0, 0.5, 4.0})
      EXPECT_LT(rel(heat_kernel(t, x), heat_kernel(1.0, x / std::sqrt(t)) / std::sqrt(t)), 1e-14);
}

TEST(HeatKernel, UnitMass) {
  const auto r = integrate([](double x) { return heat_kernel(1.0, x); }, -20.0, 20.0, 1e-14, 1e-15);
  EXPECT_NEAR(r.value, 1.0, 1e-12);
}

TEST(CovLinearShe, Values) {
  EXPECT_NEAR(cov_linear_she(1, 1, 0.3, 1), 0.306430, 1e-6);
  EXPECT_EQ(cov_linear_she(0, 2.0, 0.3, 1), 0.0);
  EXPECT_NEAR(cov_linear_she(1, 2, 0.3, 1), 0.0971672, 1e-7);
  EXPECT_THROW(cov_linear_she(-1, 1, 0.3), DomainError);
}

TEST(CovLinearShe, MatchesSpectralQuadrature) {
  for (double theta : {0.5, 1.0, 2.0}) {
    for (auto [s, t] : {std::pair{1.0, 2.0}, std::pair{1.0, 1.0}, std::pair{0.3, 0.8}}) {
      const auto q = cov_linear_she_spectral(s, t, 0.3, theta);
      EXPECT_LT(rel(q.value, cov_linear_she(s, t, 0.3, theta)), 1e-8) << s << " " << t << " " << theta;
    }
  }
}

TEST(CovLinearShe, DiagonalIsKappaTildeSquared) {
  for (double H : {0.3, 0.4})
    for (double t : {0.1, 1.0, 10.0})
      EXPECT_LT(rel(cov_linear_she(t, t, H, 1), kappa_tilde(H) * kappa_tilde(H) * std::pow(t, H)), 1e-12);
}

TEST(CovLinearShe, ThetaScaling) {
  for (double theta : {0.5, 2.0, 3.7})
    EXPECT_LT(rel(cov_linear_she(0.4, 1.3, 0.3, theta), std::pow(theta, -0.7) * cov_linear_she(0.4, 1.3, 0.3, 1)),
              1e-14);
}

TEST(CovT, Values) {
  EXPECT_NEAR(cov_T(1, 1, 0.3), 0.191366, 1e-6);
  EXPECT_EQ(cov_T(0, 1, 0.3), 0.0);
  EXPECT_LT(rel(cov_T_spectral(1, 1, 0.3).value, cov_T(1, 1, 0.3)), 1e-10);
  EXPECT_LT(rel(cov_T_spectral(0.5, 2.0, 0.4).value, cov_T(0.5, 2.0, 0.4)), 1e-10);
  EXPECT_THROW(cov_T(1, -1, 0.3), DomainError);
}

TEST(CovT, SelfSimilarity) {
  for (double a : {0.5, 2.0, 7.0})
    EXPECT_LT(rel(cov_T(a * 0.3, a * 1.1, 0.3), std::pow(a, 0.3) * cov_T(0.3, 1.1, 0.3)), 1e-13);
}

TEST(CovT, IncrementBound) {
  const double H = 0.3;
  const double inc = cov_T(1.1, 1.1, H) + cov_T(1, 1, H) - 2 * cov_T(1, 1.1, H);
  const double c61 = std::pow(2.0, H) * gamma_fn(1 + 2 * H) * gamma_fn(2 - H) * std::sin(H * kPi) / (16 * kPi);
  EXPECT_NEAR(c61, 0.0160876, 1e-7);
  EXPECT_LE(inc, c61 * 0.01);
}

TEST(Covariances, DecompositionIdentityOnRandomTriples) {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> time(0.0, 10.0), hurst(0.2501, 0.4999);
  for (int i = 0; i < 100; ++i) {
    const double s = time(gen), t = time(gen), H = hurst(gen);
    const double lhs = cov_T(s, t, H) + cov_linear_she(s, t, H, 1);
    const double rhs = kappa(H) * kappa(H) * cov_fbm(s, t, 0.5 * H);
    EXPECT_LT(std::abs(lhs - rhs) / rhs, 1e-12);
  }
}

TEST(CovFbm, Values) {
  EXPECT_DOUBLE_EQ(cov_fbm(1, 1, 0.3), 1.0);
  EXPECT_NEAR(cov_fbm(1, 2, 0.15), 0.615572, 1e-6);
  EXPECT_DOUBLE_EQ(cov_fbm(0.3, 0.9, 0.2), cov_fbm(0.9, 0.3, 0.2));
  EXPECT_THROW(cov_fbm(1, 1, 1.0), DomainError);
  EXPECT_THROW(cov_fbm(-1, 1, 0.3), DomainError);
}

TEST(Covariances, GramMatricesArePsd) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> time(0.0, 5.0);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 8 + 7 * trial;
    std::vector<double> ts(m);
    for (auto& t : ts) t = time(gen);
    for (int which = 0; which < 3; ++which) {
      Eigen::MatrixXd K(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          K(i, j) = which == 0 ? cov_linear_she(ts[i], ts[j], 0.3) : which == 1 ? cov_T(ts[i], ts[j], 0.3)
                                                                                : cov_fbm(ts[i], ts[j], 0.15);
      EXPECT_LT((K - K.transpose()).cwiseAbs().maxCoeff(), 1e-15);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10 * K.trace());
    }
  }
}

TEST(GaussianAbsMoment, Values) {
  EXPECT_NEAR(gaussian_abs_moment(2), 1.0, 1e-14);
  EXPECT_NEAR(gaussian_abs_moment(1), std::sqrt(2.0 / kPi), 1e-14);
  EXPECT_NEAR(gaussian_abs_moment(4), 3.0, 1e-13);
  EXPECT_NEAR(gaussian_abs_moment(2.0 / 0.3), 27.78614, 1e-4);
  EXPECT_THROW(gaussian_abs_moment(0.0), DomainError);
}

TEST(GaussianAbsMoment, FourthMomentMonteCarlo) {
  const std::size_t n = 1'000'000;
  std::vector<double> z(n);
  NormalStream({11, 0}).fill(z, 0);
  double m4 = 0.0, m8 = 0.0;
  for (double x : z) {
    m4 += x * x * x * x;
    m8 += x * x * x * x * x * x * x * x;
  }
  m4 /= n;
  m8 /= n;
  const double se = std::sqrt((m8 - m4 * m4) / n);
  EXPECT_LT(std::abs(m4 - gaussian_abs_moment(4)), 4 * se);
}

TEST(ModelParams, Validation) {
  ModelParams p;
  EXPECT_NO_THROW(p.validate());
  p.H = 0.5;
  EXPECT_THROW(p.validate(), DomainError);
  p.allow_white_noise = true;
  EXPECT_NO_THROW(p.validate());
  p = {};
  p.theta = 0.0;
  EXPECT_ANY_THROW(p.validate());
  p = {};
  p.sigma = "sin:2";
  EXPECT_NO_THROW(p.validate());
  p.sigma = "additive";
  EXPECT_NO_THROW(p.validate());
  p.sigma = "cube:1";
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(RegularityMeta, Fields) {
  const auto m = RegularityMeta::make(0.3, 1.0);
  EXPECT_DOUBLE_EQ(m.vartheta0, 0.15);
  EXPECT_GT(m.delta_max, 0.0);
  const auto m2 = RegularityMeta::make(0.3, 0.25);
  EXPECT_DOUBLE_EQ(m2.vartheta0, 0.125);
  EXPECT_GT(m2.delta_max, 0.0);
}
