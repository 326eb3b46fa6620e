#pragma once
// Temporal statistics of a path at a fixed spatial probe.
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rshe/gauss_sampler.hpp"
#include "rshe/sigma.hpp"

namespace rshe {

/// Ensemble mean with its Monte Carlo standard error.
struct McSummary {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t count = 0;
  static McSummary of(const std::vector<double>& xs);
};

/// values[i + eps_steps] - values[i].
std::vector<double> increment(const PathSample& path, std::size_t eps_steps);

/// True iff the grid is t_i = i/N on [0, 1] (N + 1 points).
bool is_unit_grid(const TimeGrid& grid, std::size_t N);

/// Coarsens a path on t_i = i/M to t_i = i/N (N divides M). Throws
/// GridMismatch if the grids do not align.
PathSample dyadic_restriction(const PathSample& path, std::size_t N);

struct QVarReport {
  std::size_t N = 0;
  double V_N = 0.0;
  double target = 0.0;
  double rel_error = 0.0;
  std::optional<McSummary> mc;
};

/// V_N = N^{H-1} sum (u(t_{i+1}) - u(t_i))^2 on t_i = i/N; target defaults to kappa^2.
QVarReport quadratic_variation(const PathSample& path, double H, std::optional<double> target = std::nullopt);

/// theta^{H-1} kappa^2 (1/N) sum_{i<N} sigma(u(t_i))^2.
double qvar_target(const PathSample& path, const SigmaSpec& sigma, double H, double theta = 1.0);

struct DecayReport {
  std::vector<std::size_t> N;
  std::vector<double> mse;  // mean (V_N - kappa^2)^2 over the ensemble
  double slope = 0.0;
  double slope_stderr = 0.0;
};

/// Regression slope of log mean (V_N - kappa^2)^2 on log N, each path
/// restricted dyadically to every N in N_list.
DecayReport qvar_variance_decay(const std::vector<PathSample>& paths, const std::vector<std::size_t>& N_list,
                                double H);

/// Weight functions by name: "one", "identity", "tanh".
std::function<double(double)> weight_function(const std::string& name);

struct PowerVariation {
  double value = 0.0;
  double target = 0.0;
};

/// sum_j phi(u_j) |u_{j+1} - u_j|^{2/H} on a dyadic unit grid, and the plug-in
/// target theta^{(H-1)/H} kappa^{2/H} E|N|^{2/H} (1/2^n) sum_j phi(u_j) |sigma(u_j)|^{2/H}.
PowerVariation weighted_power_variation(const PathSample& path, const std::function<double(double)>& phi,
                                        const SigmaSpec& sigma, double H, double theta = 1.0);

/// Dyadic levels eps = 2^{-k} for k from k_hi down to k_lo (increasing eps).
std::vector<double> dyadic_levels(int k_lo, int k_hi);

/// For each eps: sup over grid lags r <= eps of
///   |u(t + r) - u(t)| / (r^{H/2} sqrt(2 max(loglog(1/r), 1))).
std::vector<double> khinchin_statistic(const PathSample& path, std::size_t t_index,
                                       const std::vector<double>& eps_levels, double H);

/// min over eps of sup_{r <= eps} |u(r) - u(0)| / (eps / max(loglog(1/eps), 1))^{H/2}.
double chung_statistic(const PathSample& path, const std::vector<double>& eps_levels, double H);

struct LILReport {
  std::vector<double> eps_grid;
  std::vector<double> khinchin;  // per level
  double khinchin_stat = 0.0;    // value at the largest level
  double chung_stat = 0.0;
  double reference = 0.0;
};

/// Both statistics at the origin; reference = kappa_tilde(H).
LILReport lil_at_origin(const PathSample& path, const std::vector<double>& eps_levels, double H);

struct ScalingReport {
  std::vector<double> eps;
  std::vector<double> second_moment;
  double slope = 0.0;
  double slope_stderr = 0.0;
};

/// Least-squares slope of log E|u(t+eps) - u(t)|^2 against log eps; the
/// expectation is the ensemble average over paths and anchor indices.
ScalingReport scaling_exponent(const std::vector<PathSample>& paths, const std::vector<std::size_t>& anchors,
                               const std::vector<std::size_t>& eps_steps);

/// Same regression with E|v(t+eps) - v(t)|^2 computed from cov_linear_she.
ScalingReport exact_scaling_exponent(double H, double theta, double t, const std::vector<double>& eps);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace rshe
