#pragma once
// Spectral exponential-Euler solver for
//   du = theta u_xx dt + sigma(u) dW   on the torus [0, L),
// with W white in time and spatial spectral density c11 |xi|^{1-2H}.
//
// Fourier convention: u_hat[k] = (1/n) sum_j u_j exp(-2 pi i jk/n), k = 0..n/2,
// so u_j = sum over all k of u_hat[k] exp(2 pi i jk/n).
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rshe/constants.hpp"
#include "rshe/gauss_sampler.hpp"
#include "rshe/rng.hpp"
#include "rshe/sigma.hpp"

namespace rshe {

using cplx = std::complex<double>;

struct SolverConfig {
  ModelParams params;
  double L = 16.0;
  std::size_t n_modes = 4096;
  double dt = 2.5e-4;
  double t_end = 1.0;
  std::vector<double> probes{8.0};
  std::size_t record_stride = 1;
  SeedStream seed;
  bool dealias = false;      // 2/3-rule truncation of the sigma(u) w product
  bool store_field = true;   // keep the full (time x site) matrix
  double blowup_threshold = 1e8;

  void validate() const;
  std::size_t n_steps() const;
};

/// Initial-condition registry:
///   zero
///   bump:A,c,w    A (1 + cos(pi (x - c) / w)) / 2 for |x - c| < w (periodic distance), else 0
///   cosine:A,m    A cos(2 pi m x / L)
/// Missing bump parameters default to A = 1, c = L/2, w = 2.
std::function<double(double)> initial_condition(const std::string& descriptor, double L);

/// Per-step noise coefficients a_k, k = 0..n/2: complex Gaussian with
/// E|a_k|^2 = c11 |xi_k|^{1-2H} (2 pi / L) dt, a_0 = 0, a_{n/2} real.
/// Draws come from normal indices [step * n, (step + 1) * n) of cfg.seed.
void noise_coefficients(const SolverConfig& cfg, std::size_t step_index, std::vector<cplx>& a);

/// The noise increment as a real field on the n collocation sites.
std::vector<double> synthesize_noise_step(const SolverConfig& cfg, std::size_t step_index);

/// Reusable per-trajectory workspace (FFT plans and buffers). Not shared
/// between threads.
class SpectralStepper {
 public:
  explicit SpectralStepper(const SolverConfig& cfg);
  ~SpectralStepper();
  SpectralStepper(const SpectralStepper&) = delete;
  SpectralStepper& operator=(const SpectralStepper&) = delete;

  /// u_hat <- exp(-theta xi^2 dt) u_hat + nu_k * [sigma(u) w]^_k, given the
  /// noise coefficients a (w is their synthesis).
  void advance(std::vector<cplx>& u_hat, const std::vector<cplx>& a);
  void to_physical(const std::vector<cplx>& u_hat, std::vector<double>& u);
  void to_spectral(const std::vector<double>& u, std::vector<cplx>& u_hat);
  const std::vector<double>& decay() const noexcept { return decay_; }
  const std::vector<double>& nu() const noexcept { return nu_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::vector<double> decay_;
  std::vector<double> nu_;
};

/// One step from a spectral state and a physical noise field.
std::vector<cplx> step(const std::vector<cplx>& state, const std::vector<double>& noise, const SolverConfig& cfg);

struct FieldTrajectory {
  std::vector<double> times;
  std::size_t n_sites = 0;
  std::vector<double> field;  // row-major (times x sites); empty unless store_field
  std::vector<PathSample> probe_paths;
  std::vector<std::size_t> probe_sites;
  SolverConfig config_echo;
};

/// Throws NumericalError on non-finite values or max|u| above the threshold.
FieldTrajectory solve(const SolverConfig& cfg);

struct CrossValidationReport {
  std::vector<double> times;
  std::vector<double> variance;   // pooled probe variance
  std::vector<double> stderr_;    // its MC standard error
  std::vector<double> target;     // theta^{H-1} kappa_tilde^2 t^H
  std::vector<double> grid_variance;  // exact variance of the discretized equation
  std::vector<double> rel_dev;
  double max_rel_dev = 0.0;
  double max_rel_stderr = 0.0;    // stderr / target at the worst point
  std::size_t n_paths = 0;
};

/// Exact site variance of the additive-mode solver from zero data at time t
/// (any dt): sum over k of 2 c11 |xi_k|^{1-2H} (2 pi / L) (1 - e^{-2 theta xi_k^2 t}) / (2 theta xi_k^2),
/// with weight 1 at the Nyquist mode.
double linear_grid_variance(const SolverConfig& cfg, double t);

/// Additive mode, zero initial data: variance at the probes against the
/// exact law of v. Trajectory p uses stream (cfg.seed.root_seed, p). The
/// variance at each time is pooled over cfg.probes.
CrossValidationReport cross_validate_linear(const SolverConfig& cfg, const std::vector<double>& check_times,
                                            std::size_t n_paths, std::size_t workers = 1);

}  // namespace rshe
