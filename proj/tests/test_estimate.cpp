#include <gtest/gtest.h>

#include <cmath>

#include "rshe/constants.hpp"
#include "rshe/error.hpp"
#include "rshe/estimate.hpp"
#include "rshe/gauss_sampler.hpp"

using namespace rshe;

namespace {

std::vector<double> theta_hats(double theta, std::size_t N, std::size_t M, std::uint64_t root) {
  const auto paths = sample_linear_she(TimeGrid::unit(N), 0.3, theta, {root, 0}, M);
  std::vector<double> out;
  for (const auto& p : paths) out.push_back(estimate_theta(p, SigmaSpec::parse("additive"), 0.3));
  return out;
}

PathSample noisy_path(std::size_t N) {
  PathSample p;
  p.grid = TimeGrid::unit(N);
  for (std::size_t i = 0; i <= N; ++i) p.values.push_back(1.0 + 0.1 * std::sin(double(i * i % 17)));
  return p;
}

}  // namespace

TEST(EstimateTheta, ExactPaths) {
  for (double theta : {1.0, 2.0}) {
    const auto r = EstimateReport::summarize("theta", theta_hats(theta, 4096, 100, 21), theta);
    EXPECT_LE(*r.rel_error, 0.1) << theta;
    EXPECT_GE(r.mc.stderr_, 0.0);
  }
}

TEST(EstimateTheta, InversionIdentity) {
  // A path whose V_N equals kappa^2 exactly under sigma = 1.
  const std::size_t N = 64;
  const double H = 0.3;
  const double step = std::sqrt(kappa(H) * kappa(H) / std::pow(double(N), H - 1) / double(N));
  PathSample p;
  p.grid = TimeGrid::unit(N);
  for (std::size_t i = 0; i <= N; ++i) p.values.push_back((i % 2 ? step : 0.0));
  EXPECT_NEAR(estimate_theta(p, SigmaSpec::parse("additive"), H), 1.0, 1e-12);
}

TEST(EstimateTheta, ScaleConsistentAndMonotone) {
  const auto p = noisy_path(256);
  const auto sig = SigmaSpec::parse("linear:1");
  const double a = estimate_theta(p, sig, 0.3);
  auto q = p;
  for (double& x : q.values) x *= 7.0;
  EXPECT_NEAR(estimate_theta(q, sig, 0.3), a, 1e-12 * a);
  // Same sigma values, larger V_N.
  auto r = p;
  for (std::size_t i = 1; i < r.values.size(); i += 2) r.values[i] += 0.05;
  auto additive = SigmaSpec::parse("additive");
  EXPECT_LT(estimate_theta(r, additive, 0.3), estimate_theta(p, additive, 0.3));
}

TEST(EstimateTheta, DegenerateDenominator) {
  PathSample p;
  p.grid = TimeGrid::unit(8);
  p.values = {0, 0, 0, 0, 0, 0, 0, 0, 1};
  EXPECT_THROW(estimate_theta(p, SigmaSpec::parse("linear:1"), 0.3), DomainError);
}

TEST(EstimateTheta, ConsistencyTrend) {
  std::vector<double> err, se;
  for (std::size_t N : {1024u, 2048u, 4096u}) {
    const auto r = EstimateReport::summarize("theta", theta_hats(1.0, N, 100, 22), 1.0);
    err.push_back(std::abs(r.estimate - 1.0));
    se.push_back(r.mc.stderr_);
  }
  for (std::size_t i = 1; i < err.size(); ++i) EXPECT_LE(err[i], err[i - 1] + 2 * std::hypot(se[i], se[i - 1]));
}

TEST(EstimateH, ExactPaths) {
  const auto paths = sample_linear_she(TimeGrid::unit(4096), 0.3, 1.0, {23, 0}, 100);
  std::vector<double> h;
  for (const auto& p : paths) h.push_back(estimate_H(p).value);
  EXPECT_NEAR(McSummary::of(h).mean, 0.3, 0.03);
}

TEST(EstimateH, BrownianFlag) {
  const auto paths = sample_linear_she(TimeGrid::unit(4096), 0.5, 1.0, {24, 0}, 100);
  std::vector<double> h;
  for (const auto& p : paths) h.push_back(estimate_H(p).value);
  EXPECT_NEAR(McSummary::of(h).mean, 0.5, 0.03);
}

TEST(EstimateH, SmoothPathFlagged) {
  PathSample p;
  p.grid = TimeGrid::unit(256);
  for (std::size_t i = 0; i <= 256; ++i) p.values.push_back(std::sin(3 * p.grid.at(i)));
  const auto h = estimate_H(p);
  EXPECT_GT(h.value, 0.9);
  EXPECT_TRUE(h.out_of_model);
  p.values.assign(257, 1.0);
  EXPECT_THROW(estimate_H(p), DomainError);
  p.values.pop_back();
  p.grid = TimeGrid::unit(255);
  EXPECT_THROW(estimate_H(p), GridMismatch);
}

TEST(EstimateReport, JsonFields) {
  const auto r = EstimateReport::summarize("theta", {0.9, 1.1, 1.0}, 1.0);
  const auto j = r.to_json();
  EXPECT_EQ(j.at("estimator"), "theta");
  EXPECT_NEAR(j.at("estimate").get<double>(), 1.0, 1e-15);
  EXPECT_TRUE(j.contains("stderr"));
  EXPECT_TRUE(j.contains("rel_error"));
  const auto z = EstimateReport::summarize("theta", {0.1, -0.1}, 0.0);
  EXPECT_FALSE(z.rel_error.has_value());
}
