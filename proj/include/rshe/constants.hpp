#pragma once

// Closed-form constants and covariance kernels for the rough stochastic heat
// equation  du = theta * u_xx dt + sigma(u) dW,  with W white in time and
// fractional (Hurst H in (1/4, 1/2)) in space.

#include <string>

namespace rshe {

/// Lanczos approximation of Gamma on (0, 5); >= 13 significant digits.
double gamma_fn(double x);

/// kappa = (Gamma(2H) / Gamma(H))^{1/2}: temporal fBm(H/2) scale of the
/// linear equation at a fixed point.
double kappa(double H);

/// kappa_tilde = (Gamma(2H) / (2^{1-H} Gamma(H)))^{1/2}: scale at t = 0.
double kappa_tilde(double H);

/// c_{1,1} = Gamma(2H+1) sin(pi H) / (2 pi), the spectral density constant.
double spectral_constant(double H);

/// fGn autocovariance 0.5(|k+1|^H + |k-1|^H - 2|k|^H).
double rho_H(long long k, double H);

/// Heat kernel of d^2/dx^2: (4 pi t)^{-1/2} exp(-x^2 / 4t).
double heat_kernel(double t, double x);

/// Temporal covariance E[v(s,x) v(t,x)] of the linear equation with
/// diffusivity theta and zero initial data:
///   theta^{H-1} (kappa^2 / 2) [(s+t)^H - |t-s|^H].
double cov_linear_she(double s, double t, double H, double theta = 1.0);

/// Covariance of the smooth perturbation T(t):
///   (kappa^2 / 2) [s^H + t^H - (s+t)^H].
double cov_T(double s, double t, double H);

/// fBm covariance 0.5(s^{2h} + t^{2h} - |t-s|^{2h}).
double cov_fbm(double s, double t, double hurst);

/// E|N|^p for a standard Gaussian N.
double gaussian_abs_moment(double p);

/// Throws DomainError unless 1/4 < H < 1/2, or H == 1/2 with the flag set.
void check_hurst(double H, bool allow_white_noise = false);

/// Model parameters of the (parametrized) equation. sigma and u0 are
/// registry descriptors (see sigma.hpp and she_solver.hpp).
struct ModelParams {
  double H = 0.3;
  double theta = 1.0;
  std::string sigma = "linear:1";
  std::string u0 = "zero";
  bool allow_white_noise = false;

  /// Checks the Hurst range, theta > 0 and that sigma parses with sigma(0)=0
  /// (the additive mode is exempt).
  void validate() const;
};

/// Reporting-only regularity metadata.
struct RegularityMeta {
  double beta0 = 1.0;
  double vartheta0 = 0.0;
  double delta_max = 0.0;

  static RegularityMeta make(double H, double beta0);
};

}  // namespace rshe
