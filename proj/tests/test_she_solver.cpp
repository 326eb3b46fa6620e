#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "rshe/constants.hpp"
#include "rshe/error.hpp"
#include "rshe/she_solver.hpp"
#include "rshe/sigma.hpp"
#include "rshe/stats.hpp"

using namespace rshe;

namespace {

constexpr double kPi = std::numbers::pi;

SolverConfig small_config() {
  SolverConfig c;
  c.L = 16.0;
  c.n_modes = 128;
  c.dt = 1.0 / 256;
  c.t_end = 0.25;
  c.probes = {8.0};
  c.seed = {1, 0};
  return c;
}

// Direct O(n^2) normalized DFT, independent of the FFT wrapper.
std::vector<std::complex<double>> dft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    std::complex<double> s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += x[j] * std::polar(1.0, -2.0 * kPi * double(j * k % n) / double(n));
    out[k] = s / double(n);
  }
  return out;
}

}  // namespace

TEST(Sigma, RegistryAndChecks) {
  EXPECT_DOUBLE_EQ(SigmaSpec::parse("linear:2")(3.0), 6.0);
  EXPECT_DOUBLE_EQ(SigmaSpec::parse("sin:2")(0.5), std::sin(1.0));
  EXPECT_DOUBLE_EQ(SigmaSpec::parse("tanh:3")(0.5), 3.0 * std::tanh(0.5));
  EXPECT_DOUBLE_EQ(SigmaSpec::parse("zero")(4.0), 0.0);
  EXPECT_DOUBLE_EQ(SigmaSpec::parse("additive")(4.0), 1.0);
  EXPECT_TRUE(SigmaSpec::parse("additive").additive());
  for (const char* d : {"linear:1", "sin:1", "tanh:1", "zero"}) EXPECT_LT(std::abs(SigmaSpec::parse(d)(0.0)), 1e-14);
  EXPECT_NEAR(SigmaSpec::parse("linear:2").lipschitz_estimate(), 2.0, 1e-9);
  EXPECT_NEAR(SigmaSpec::parse("sin:3").lipschitz_estimate(), 3.0, 1e-3);
  EXPECT_THROW(SigmaSpec::parse("exp:1"), ConfigError);
  EXPECT_THROW(SigmaSpec::parse("linear:abc"), ConfigError);
  EXPECT_THROW(SigmaSpec::parse("linear:inf"), ConfigError);
  EXPECT_EQ(SigmaSpec::parse("sin:2").descriptor(), SigmaSpec::parse(SigmaSpec::parse("sin:2").descriptor()).descriptor());
}

TEST(SolverConfig, Validation) {
  SolverConfig c = small_config();
  EXPECT_NO_THROW(c.validate());
  c.n_modes = 96;
  EXPECT_THROW(c.validate(), ConfigError);
  c.n_modes = 32;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config();
  c.dt = c.t_end / 32;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config();
  c.probes = {16.0};
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config();
  c.dt = 0.0031;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config();
  c.params.u0 = "spike";
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(InitialCondition, Registry) {
  const auto zero = initial_condition("zero", 16);
  EXPECT_EQ(zero(3.0), 0.0);
  const auto bump = initial_condition("bump", 16);
  EXPECT_DOUBLE_EQ(bump(8.0), 1.0);
  EXPECT_DOUBLE_EQ(bump(9.0), 0.5);
  EXPECT_EQ(bump(10.5), 0.0);
  const auto b2 = initial_condition("bump:2,1,2", 16);
  EXPECT_NEAR(b2(15.5), 1.0 - std::sqrt(0.5), 1e-14);  // periodic distance 1.5
  const auto cosine = initial_condition("cosine:3,2", 16);
  EXPECT_NEAR(cosine(8.0), 3.0, 1e-14);
  EXPECT_NEAR(cosine(4.0), -3.0, 1e-14);
  EXPECT_THROW(initial_condition("cosine:1,1.5", 16), ConfigError);
  EXPECT_THROW(initial_condition("bump:1,2,3,4", 16), ConfigError);
}

TEST(Noise, ZeroModeAndHermitianSynthesis) {
  SolverConfig c = small_config();
  for (std::size_t s : {0u, 5u}) {
    const auto w = synthesize_noise_step(c, s);
    ASSERT_EQ(w.size(), c.n_modes);
    const auto co = dft(w);
    std::vector<cplx> a;
    noise_coefficients(c, s, a);
    EXPECT_LT(std::abs(co[0]), 1e-15);
    EXPECT_EQ(a[0], cplx{});
    for (std::size_t k = 1; k < a.size(); ++k) EXPECT_LT(std::abs(co[k] - a[k]), 1e-12);
    EXPECT_EQ(a.back().imag(), 0.0);
  }
}

TEST(Noise, SingleModeVariance) {
  SolverConfig c = small_config();
  const std::size_t M = 10000;
  double m = 0.0, m2 = 0.0;
  std::vector<cplx> a;
  for (std::size_t s = 0; s < M; ++s) {
    noise_coefficients(c, s, a);
    const double x = std::norm(a[1]);
    m += x;
    m2 += x * x;
  }
  m /= M;
  const double se = std::sqrt((m2 / M - m * m) / M);
  const double H = c.params.H;
  const double target = spectral_constant(H) * std::pow(2 * kPi / c.L, 2 - 2 * H) * c.dt;
  EXPECT_LT(std::abs(m - target), 4 * se);
}

TEST(Noise, TemporalWhiteness) {
  SolverConfig c = small_config();
  c.n_modes = 64;
  const std::size_t M = 10000;
  double m = 0.0, m2 = 0.0;
  for (std::size_t r = 0; r < M; ++r) {
    c.seed = {3, r};
    const auto w0 = synthesize_noise_step(c, 0);
    const auto w1 = synthesize_noise_step(c, 1);
    const double x = w0[10] * w1[10];
    m += x;
    m2 += x * x;
  }
  m /= M;
  EXPECT_LT(std::abs(m), 4 * std::sqrt((m2 / M - m * m) / M));
}

TEST(Noise, PrimitiveRoughnessExponent) {
  // The spatial primitive of one noise increment is an fBm with Hurst H in x.
  SolverConfig c = small_config();
  c.n_modes = 1024;
  const double dx = c.L / double(c.n_modes);
  const std::vector<std::size_t> lags = {4, 8, 16, 32};
  std::vector<double> sf(lags.size(), 0.0);
  for (std::size_t s = 0; s < 200; ++s) {
    const auto w = synthesize_noise_step(c, s);
    std::vector<double> prim(w.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) prim[j] = (acc += w[j] * dx);
    for (std::size_t l = 0; l < lags.size(); ++l)
      for (std::size_t j = 0; j < w.size(); ++j) {
        const double d = prim[(j + lags[l]) % w.size()] - prim[j];
        sf[l] += d * d;
      }
  }
  std::vector<double> lx, ly;
  for (std::size_t l = 0; l < lags.size(); ++l) {
    lx.push_back(std::log(double(lags[l])));
    ly.push_back(std::log(sf[l]));
  }
  EXPECT_NEAR(fit_line(lx, ly).slope, 2 * c.params.H, 0.15);
}

TEST(Solve, SpatialRoughnessExponent) {
  SolverConfig c = small_config();
  c.params.sigma = "additive";
  c.n_modes = 1024;
  c.t_end = 1.0;
  c.record_stride = 256;
  const std::vector<std::size_t> lags = {4, 8, 16, 32};
  std::vector<double> sf(lags.size(), 0.0);
  for (std::uint64_t r = 0; r < 20; ++r) {
    c.seed = {2, r};
    const auto tr = solve(c);
    const double* u = tr.field.data() + (tr.times.size() - 1) * c.n_modes;
    for (std::size_t l = 0; l < lags.size(); ++l)
      for (std::size_t j = 0; j < c.n_modes; ++j) {
        const double d = u[(j + lags[l]) % c.n_modes] - u[j];
        sf[l] += d * d;
      }
  }
  std::vector<double> lx, ly;
  for (std::size_t l = 0; l < lags.size(); ++l) {
    lx.push_back(std::log(double(lags[l])));
    ly.push_back(std::log(sf[l]));
  }
  EXPECT_NEAR(fit_line(lx, ly).slope, 2 * c.params.H, 0.15);
}

TEST(Step, NoiseFreeHeatFlow) {
  SolverConfig c = small_config();
  c.params.sigma = "zero";
  c.params.u0 = "bump";
  c.params.theta = 0.7;
  const auto tr = solve(c);
  const std::size_t n = c.n_modes;
  std::vector<double> u0(n);
  const auto f = initial_condition("bump", c.L);
  for (std::size_t j = 0; j < n; ++j) u0[j] = f(c.L * double(j) / double(n));
  const auto u0h = dft(u0);
  double dev = 0.0;
  const std::size_t last = tr.times.size() - 1;
  const double t = tr.times[last];
  for (std::size_t j = 0; j < n; ++j) {
    double u = u0h[0].real();
    for (std::size_t k = 1; k <= n / 2; ++k) {
      const double xi = 2 * kPi * double(k) / c.L;
      const double mult = (k == n / 2 ? 1.0 : 2.0) * std::exp(-c.params.theta * xi * xi * t);
      u += mult * (u0h[k] * std::polar(1.0, 2 * kPi * double(j * k % n) / double(n))).real();
    }
    dev = std::max(dev, std::abs(u - tr.field[last * n + j]));
  }
  EXPECT_LT(dev, 1e-12);
}

TEST(Step, MeanPreservedWithoutNoise) {
  SolverConfig c = small_config();
  c.params.sigma = "zero";
  c.params.u0 = "cosine:1,1";
  c.params.u0 = "bump:1.5,3,1";
  const auto tr = solve(c);
  const std::size_t n = c.n_modes;
  auto mean = [&](std::size_t row) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += tr.field[row * n + j];
    return s / double(n);
  };
  for (std::size_t r = 1; r < tr.times.size(); ++r) EXPECT_NEAR(mean(r), mean(0), 1e-14);
}

TEST(Step, AdditiveUpdateFormula) {
  SolverConfig c = small_config();
  c.params.sigma = "additive";
  std::vector<cplx> state(c.n_modes / 2 + 1);
  for (std::size_t k = 0; k < state.size(); ++k) state[k] = {0.01 * double(k), -0.02};
  state.back() = {0.3, 0.0};
  const auto w = synthesize_noise_step(c, 0);
  const auto next = step(state, w, c);
  const auto wh = dft(w);
  for (std::size_t k = 0; k < state.size(); ++k) {
    const double xi = 2 * kPi * double(k) / c.L;
    const double lam = c.params.theta * xi * xi * c.dt;
    const double nu = k == 0 ? 1.0 : std::sqrt((1 - std::exp(-2 * lam)) / (2 * lam));
    EXPECT_LT(std::abs(next[k] - (std::exp(-lam) * state[k] + nu * wh[k])), 1e-12) << k;
  }
  EXPECT_THROW(step(state, std::vector<double>(7), c), GridMismatch);
}

TEST(Solve, ZeroIsFixedPoint) {
  SolverConfig c = small_config();
  c.params.sigma = "linear:1";
  c.params.u0 = "zero";
  const auto tr = solve(c);
  for (double v : tr.field) ASSERT_EQ(v, 0.0);
}

TEST(Solve, RowZeroAndProbeColumns) {
  SolverConfig c = small_config();
  c.params.u0 = "bump";
  c.probes = {8.0, 3.3, 15.99};
  const auto tr = solve(c);
  const auto f = initial_condition("bump", c.L);
  for (std::size_t j = 0; j < c.n_modes; ++j) EXPECT_NEAR(tr.field[j], f(c.L * double(j) / double(c.n_modes)), 1e-14);
  ASSERT_EQ(tr.probe_sites.size(), 3u);
  EXPECT_EQ(tr.probe_sites[0], 64u);
  EXPECT_EQ(tr.probe_sites[1], 26u);
  EXPECT_EQ(tr.probe_sites[2], 0u);
  for (std::size_t p = 0; p < 3; ++p)
    for (std::size_t r = 0; r < tr.times.size(); ++r)
      EXPECT_EQ(tr.probe_paths[p].values[r], tr.field[r * c.n_modes + tr.probe_sites[p]]);
}

TEST(Solve, RecordStrideThinning) {
  SolverConfig c = small_config();
  c.params.u0 = "bump";
  const auto full = solve(c);
  c.record_stride = 4;
  const auto thin = solve(c);
  ASSERT_EQ(thin.times.size(), (full.times.size() - 1) / 4 + 1);
  for (std::size_t r = 0; r < thin.times.size(); ++r) {
    EXPECT_DOUBLE_EQ(thin.times[r], full.times[4 * r]);
    EXPECT_EQ(thin.probe_paths[0].values[r], full.probe_paths[0].values[4 * r]);
  }
}

TEST(Solve, DeterministicGivenSeed) {
  SolverConfig c = small_config();
  c.params.sigma = "sin:1";
  c.params.u0 = "bump";
  EXPECT_EQ(solve(c).field, solve(c).field);
  SolverConfig d = c;
  d.seed = {1, 1};
  EXPECT_NE(solve(c).field, solve(d).field);
}

TEST(Solve, BlowUpGuard) {
  SolverConfig c = small_config();
  c.params.u0 = "bump";
  c.blowup_threshold = 0.5;
  EXPECT_THROW(solve(c), NumericalError);
}

TEST(Solve, DealiasOptionRuns) {
  SolverConfig c = small_config();
  c.params.u0 = "bump";
  c.dealias = true;
  const auto tr = solve(c);
  for (double v : tr.field) ASSERT_TRUE(std::isfinite(v));
  EXPECT_NE(tr.field, solve(small_config()).field);
}

TEST(CrossValidate, AdditiveVarianceNearExact) {
  SolverConfig c;
  c.params.sigma = "additive";
  c.params.u0 = "zero";
  c.L = 32.0;
  c.n_modes = 2048;
  c.dt = 1.0 / 256;
  c.t_end = 1.0;
  c.record_stride = 64;
  c.probes.clear();
  for (int i = 0; i < 32; ++i) c.probes.push_back(double(i));
  c.seed = {5, 0};
  const auto r = cross_validate_linear(c, {0.25, 0.5, 1.0}, 100);
  EXPECT_LE(r.max_rel_dev, 0.1);
  ASSERT_EQ(r.target.size(), 3u);
  EXPECT_NEAR(r.target[2], 0.306430, 1e-6);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_LT(std::abs(r.variance[i] - r.grid_variance[i]), 4 * r.stderr_[i]) << i;
}

TEST(CrossValidate, GridVarianceFiniteSum) {
  SolverConfig c;
  c.params.sigma = "additive";
  c.params.u0 = "zero";
  struct Case {
    double L;
    std::size_t n;
    double theta, t, expected;
  };
  for (const Case& k : {Case{16, 4096, 1, 1.0, 0.2875228192499764}, Case{32, 2048, 2, 0.5, 0.1463214983955783},
                        Case{64, 8192, 1, 0.25, 0.1963670620239535}}) {
    c.L = k.L;
    c.n_modes = k.n;
    c.params.theta = k.theta;
    EXPECT_NEAR(linear_grid_variance(c, k.t), k.expected, 1e-13);
  }
  EXPECT_EQ(linear_grid_variance(c, 0.0), 0.0);
}

TEST(CrossValidate, WorkerCountInvariant) {
  SolverConfig c = small_config();
  c.params.sigma = "additive";
  c.record_stride = 16;
  const auto a = cross_validate_linear(c, {0.125, 0.25}, 6, 1);
  const auto b = cross_validate_linear(c, {0.125, 0.25}, 6, 3);
  EXPECT_EQ(a.variance, b.variance);
  EXPECT_EQ(a.stderr_, b.stderr_);
}

TEST(CrossValidate, Preconditions) {
  SolverConfig c = small_config();
  EXPECT_THROW(cross_validate_linear(c, {0.25}, 4), ConfigError);
  c.params.sigma = "additive";
  c.params.u0 = "bump";
  EXPECT_THROW(cross_validate_linear(c, {0.25}, 4), ConfigError);
  c.params.u0 = "zero";
  EXPECT_THROW(cross_validate_linear(c, {0.3}, 4), ConfigError);
}
