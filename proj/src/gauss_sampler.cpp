#include "rshe/gauss_sampler.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>

#include "rshe/constants.hpp"
#include "rshe/error.hpp"
#include "rshe/fft.hpp"

namespace rshe {

namespace {

std::string hex(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

double fgn_autocov(double lag, double hurst) {
  const double k = std::abs(lag);
  const double e = 2.0 * hurst;
  return 0.5 * (std::pow(k + 1.0, e) + std::pow(std::abs(k - 1.0), e) - 2.0 * std::pow(k, e));
}

}  // namespace

void TimeGrid::validate() const {
  if (!(t0 >= 0.0)) throw ConfigError("time grid must start at t0 >= 0");
  if (n < 2) throw ConfigError("time grid needs at least 2 points");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time grid spacing must be positive");
}

TimeGrid TimeGrid::unit(std::size_t N) {
  if (N < 1) throw ConfigError("unit grid needs N >= 1");
  return TimeGrid{0.0, N + 1, 1.0 / static_cast<double>(N)};
}

std::string TimeGrid::key() const { return hex(t0) + "/" + std::to_string(n) + "/" + hex(dt); }

Kernel linear_she_kernel(double H, double theta) {
  kappa(H);  // range check
  return {"linear_she(H=" + hex(H) + ",theta=" + hex(theta) + ")",
          [H, theta](double s, double t) { return cov_linear_she(s, t, H, theta); }};
}

Kernel t_process_kernel(double H) {
  kappa(H);
  return {"T(H=" + hex(H) + ")", [H](double s, double t) { return cov_T(s, t, H); }};
}

Kernel fbm_kernel(double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("fbm hurst must lie in (0,1)");
  return {"fbm(h=" + hex(hurst) + ")", [hurst](double s, double t) { return cov_fbm(s, t, hurst); }};
}

std::shared_ptr<const CholeskyFactor> factorize(const Kernel& kernel, const TimeGrid& grid) {
  grid.validate();
  auto factor = std::make_shared<CholeskyFactor>();
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double t = grid.at(i);
    if (kernel.cov(t, t) != 0.0) factor->active.push_back(i);
  }
  const auto m = static_cast<Eigen::Index>(factor->active.size());
  Eigen::MatrixXd gram(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double c = kernel.cov(grid.at(factor->active[i]), grid.at(factor->active[j]));
      gram(i, j) = c;
      gram(j, i) = c;
    }
  }
  if (m == 0) return factor;
  const double scale = gram.trace() / static_cast<double>(m);
  for (double lambda : {0.0, 1e-14, 1e-13, 1e-12, 1e-11, 1e-10}) {
    Eigen::MatrixXd a = gram;
    a.diagonal().array() += lambda * scale;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().allFinite()) {
      factor->lower = llt.matrixL();
      factor->jitter = lambda * scale;
      return factor;
    }
  }
  throw NumericalError("Cholesky factorization of '" + kernel.id + "' failed after jitter escalation");
}

namespace {
std::mutex& cache_mutex() {
  static std::mutex m;
  return m;
}
std::map<std::string, std::shared_ptr<const CholeskyFactor>>& cache() {
  static std::map<std::string, std::shared_ptr<const CholeskyFactor>> c;
  return c;
}
}  // namespace

std::shared_ptr<const CholeskyFactor> cached_factor(const Kernel& kernel, const TimeGrid& grid) {
  const std::string key = kernel.id + "@" + grid.key();
  std::lock_guard lock(cache_mutex());
  auto it = cache().find(key);
  if (it != cache().end()) return it->second;
  auto f = factorize(kernel, grid);
  cache().emplace(key, f);
  return f;
}

void clear_factor_cache() {
  std::lock_guard lock(cache_mutex());
  cache().clear();
}

std::vector<PathSample> cholesky_sample(const Kernel& kernel, const TimeGrid& grid, SeedStream seed,
                                        std::size_t n_paths) {
  const auto factor = cached_factor(kernel, grid);
  const auto m = static_cast<Eigen::Index>(factor->active.size());
  const NormalStream rng(seed);

  Eigen::MatrixXd z(m, static_cast<Eigen::Index>(n_paths));
  for (std::size_t p = 0; p < n_paths; ++p) {
    rng.fill(std::span<double>(z.col(static_cast<Eigen::Index>(p)).data(), static_cast<std::size_t>(m)),
             static_cast<std::uint64_t>(p) * grid.n);
  }
  Eigen::MatrixXd x(m, static_cast<Eigen::Index>(n_paths));
  if (m > 0) x.noalias() = factor->lower.triangularView<Eigen::Lower>() * z;

  std::vector<PathSample> out(n_paths);
  for (std::size_t p = 0; p < n_paths; ++p) {
    auto& path = out[p];
    path.grid = grid;
    path.values.assign(grid.n, 0.0);
    for (Eigen::Index i = 0; i < m; ++i) path.values[factor->active[i]] = x(i, static_cast<Eigen::Index>(p));
    path.kernel_id = kernel.id;
    path.seed = seed;
    path.path_index = p;
  }
  return out;
}

std::vector<double> fgn_circulant(std::size_t n, double hurst, SeedStream seed) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("fgn_circulant requires hurst in (0,1)");
  if (n < 1) throw ConfigError("fgn_circulant requires n >= 1");
  const std::size_t m = 2 * n;
  std::vector<std::complex<double>> row(m), lambda(m);
  for (std::size_t k = 0; k <= n; ++k) row[k] = fgn_autocov(static_cast<double>(k), hurst);
  for (std::size_t k = n + 1; k < m; ++k) row[k] = row[m - k];

  fft::ComplexPlan forward(m, -1);
  forward.execute(row, lambda);
  double lmax = 0.0, lmin = 0.0;
  for (const auto& l : lambda) {
    lmax = std::max(lmax, l.real());
    lmin = std::min(lmin, l.real());
  }
  if (lmin < -1e-9 * lmax) {
    std::clog << "warning: circulant embedding not nonnegative-definite (min eigenvalue " << lmin
              << "); falling back to Cholesky\n";
    const Kernel k{"fgn(h=" + hex(hurst) + ")",
                   [hurst](double s, double t) { return fgn_autocov(std::round(t - s), hurst); }};
    return cholesky_sample(k, TimeGrid{0.0, n, 1.0}, seed, 1).front().values;
  }

  const NormalStream rng(seed);
  std::vector<double> z(2 * m);
  rng.fill(z, 0);
  std::vector<std::complex<double>> a(m), y(m);
  const double inv_m = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double s = std::sqrt(std::max(lambda[k].real(), 0.0) * inv_m);
    a[k] = {s * z[2 * k], s * z[2 * k + 1]};
  }
  fft::ComplexPlan synth(m, -1);
  synth.execute(a, y);
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = y[j].real();
  return out;
}

std::vector<PathSample> sample_linear_she(const TimeGrid& grid, double H, double theta, SeedStream seed,
                                          std::size_t n_paths) {
  return cholesky_sample(linear_she_kernel(H, theta), grid, seed, n_paths);
}

std::vector<PathSample> sample_T_process(const TimeGrid& grid, double H, SeedStream seed, std::size_t n_paths) {
  return cholesky_sample(t_process_kernel(H), grid, seed, n_paths);
}

std::vector<PathSample> sample_fbm(const TimeGrid& grid, double hurst, SeedStream seed, std::size_t n_paths) {
  return cholesky_sample(fbm_kernel(hurst), grid, seed, n_paths);
}

DecomposeDiagnostic decompose_check(const std::vector<PathSample>& v_paths,
                                    const std::vector<PathSample>& t_paths, double H) {
  if (v_paths.empty() || v_paths.size() != t_paths.size())
    throw GridMismatch("decompose_check needs equally many v and T paths");
  const TimeGrid grid = v_paths.front().grid;
  for (std::size_t p = 0; p < v_paths.size(); ++p) {
    if (!(v_paths[p].grid == grid) || !(t_paths[p].grid == grid))
      throw GridMismatch("decompose_check: paths on different grids");
  }
  const double inv_kappa = 1.0 / kappa(H);
  const auto n = static_cast<Eigen::Index>(grid.n);
  const auto M = static_cast<Eigen::Index>(v_paths.size());
  Eigen::MatrixXd x(n, M);
  for (Eigen::Index p = 0; p < M; ++p)
    for (Eigen::Index i = 0; i < n; ++i)
      x(i, p) = inv_kappa * (v_paths[p].values[i] + t_paths[p].values[i]);
  const Eigen::MatrixXd emp = (x * x.transpose()) / static_cast<double>(M);

  DecomposeDiagnostic d;
  d.n_pairs = static_cast<std::size_t>(M);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double ti = grid.at(i), tj = grid.at(j);
      const double cij = cov_fbm(ti, tj, 0.5 * H);
      const double dev = std::abs(emp(i, j) - cij);
      d.max_abs_dev = std::max(d.max_abs_dev, dev);
      const double var = cov_fbm(ti, ti, 0.5 * H) * cov_fbm(tj, tj, 0.5 * H) + cij * cij;
      if (var > 0.0) d.max_z = std::max(d.max_z, dev / std::sqrt(var / static_cast<double>(M)));
    }
  }
  return d;
}

}  // namespace rshe
