#pragma once

// Exact samplers for the Gaussian processes attached to the linear equation:
// the temporal path v(., x), the smooth perturbation T, fBm(H/2) and
// fractional Gaussian noise.

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rshe/rng.hpp"

namespace rshe {

/// Uniform grid t_i = t0 + i*dt, i = 0..n-1.
struct TimeGrid {
  double t0 = 0.0;
  std::size_t n = 2;
  double dt = 1.0;

  double at(std::size_t i) const noexcept { return t0 + static_cast<double>(i) * dt; }
  double end() const noexcept { return at(n - 1); }
  void validate() const;
  /// The dyadic-style grid t_i = i/N on [0, 1] (N + 1 points).
  static TimeGrid unit(std::size_t N);
  /// Grid identity used for cache keys and mismatch checks.
  std::string key() const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

/// Named covariance function. The id must determine cov completely.
struct Kernel {
  std::string id;
  std::function<double(double, double)> cov;
};

Kernel linear_she_kernel(double H, double theta = 1.0);
Kernel t_process_kernel(double H);
Kernel fbm_kernel(double hurst);

struct PathSample {
  TimeGrid grid;
  std::vector<double> values;
  std::string kernel_id;
  SeedStream seed;
  std::size_t path_index = 0;
};

/// Lower Cholesky factor of a kernel's Gram matrix, restricted to the grid
/// points with nonzero variance (points where the kernel vanishes are pinned
/// to exactly 0).
struct CholeskyFactor {
  std::vector<std::size_t> active;  // grid indices with K(t,t) > 0
  Eigen::MatrixXd lower;
  double jitter = 0.0;              // added diagonal (absolute)
};

/// Factorizes with the jitter policy lambda * trace / n, lambda in
/// {0, 1e-14, ..., 1e-10}. Throws NumericalError beyond that.
std::shared_ptr<const CholeskyFactor> factorize(const Kernel& kernel, const TimeGrid& grid);

/// Shared read-only factor cache keyed by (kernel id, grid). Thread-safe.
std::shared_ptr<const CholeskyFactor> cached_factor(const Kernel& kernel, const TimeGrid& grid);
void clear_factor_cache();

/// n_paths exact samples. Path p consumes normal draws [p*n, (p+1)*n) of the
/// stream, so a fixed (seed, p) always yields the same path.
std::vector<PathSample> cholesky_sample(const Kernel& kernel, const TimeGrid& grid, SeedStream seed,
                                        std::size_t n_paths);

/// Stationary fGn of length n with autocovariance
/// 0.5(|k+1|^{2h} + |k-1|^{2h} - 2|k|^{2h}) via circulant embedding
/// (Davies-Harte). Falls back to Cholesky if the embedding is not
/// nonnegative-definite to 1e-9 relative.
std::vector<double> fgn_circulant(std::size_t n, double hurst, SeedStream seed);

std::vector<PathSample> sample_linear_she(const TimeGrid& grid, double H, double theta, SeedStream seed,
                                          std::size_t n_paths);
std::vector<PathSample> sample_T_process(const TimeGrid& grid, double H, SeedStream seed, std::size_t n_paths);
std::vector<PathSample> sample_fbm(const TimeGrid& grid, double hurst, SeedStream seed, std::size_t n_paths);

struct DecomposeDiagnostic {
  double max_abs_dev = 0.0;  // max_ij |C_emp - cov_fbm(t_i, t_j, H/2)|
  double max_z = 0.0;        // max_ij of the deviation in MC standard errors
  std::size_t n_pairs = 0;
};

/// Empirical covariance of kappa^{-1}(v + T) against fBm(H/2).
DecomposeDiagnostic decompose_check(const std::vector<PathSample>& v_paths,
                                    const std::vector<PathSample>& t_paths, double H);

}  // namespace rshe
