#pragma once

// Deterministic spectral-domain checks on the linear equation
//   dv = v_xx dt + dW,  v(0, .) = 0.
// Everything here is quadrature; no Monte Carlo.

#include <limits>
#include <vector>

#include <json.hpp>

#include "rshe/quadrature.hpp"

namespace rshe {

/// Frequency band {max(|tau|^{H/2}, |xi|^H) in [a, b)}; b may be +infinity.
struct SpectralBand {
  double a = 0.0;
  double b = std::numeric_limits<double>::infinity();

  void validate() const;
};

struct BandMoment {
  double value = 0.0;
  double achieved_tol = 0.0;  // estimated relative error
  bool converged = true;
};

/// Second moment of the band-limited harmonizable component v_x(band, t):
///   (c11 / 2pi) * iint_band (phi1^2 + phi2^2) / (xi^4 + tau^2) |xi|^{1-2H} dtau dxi,
/// phi1 = cos(tau t) - exp(-t xi^2), phi2 = -sin(tau t). The 1/2pi makes the
/// full band reproduce E|v(t,x)|^2 = kappa_tilde^2 t^H.
BandMoment band_second_moment(const SpectralBand& band, double t, double H, const QuadratureSpec& q = {});

struct TailBoundResult {
  double a = 0.0, b = 0.0, t = 0.0, H = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;
  double achieved_tol = 0.0;
};

/// lhs = ||v - v([a,b))||_2 from band moments; rhs from the explicit bounds
///   rhs^2 = 8 c11/(1-H) t^2 a^{2(2-H)/H} + 10(2-H) c11/(H(1-H)) b^{-2}.
/// ok iff lhs <= rhs (1 + 2 rel_tol).
TailBoundResult tail_bound_check(double a, double b, double t, double H, const QuadratureSpec& q = {});

struct KernelScalingReport {
  double beta = 0.0;
  std::vector<double> t;
  std::vector<double> integral;  // I(t)
  double max_ratio_deviation = 0.0;
  bool converged = true;
};

/// I(t) = iint |p_t(x+h) - p_t(x)|^2 |h|^{-1-2 beta} dh dx by quadrature, and
/// max over pairs of |I(t1) t1^{1/2+beta} / (I(t2) t2^{1/2+beta}) - 1|.
KernelScalingReport verify_kernel_scaling(double beta, const std::vector<double>& t_list,
                                          const QuadratureSpec& q = {});

struct GreenFinitenessReport {
  double value = 0.0;
  std::vector<double> radii;   // truncation radius per refinement level
  std::vector<double> levels;  // value per level
  double last_change = 0.0;    // relative change at the finest level
  bool finite = false;         // false = divergence flag
};

/// iint |e^{-(x+h)^2} - e^{-x^2}|^2 |h|^{2H-2} |x|^{2 theta_exp} dh dx with
/// refinement over the truncation radius (asymptotic tail added at each level).
GreenFinitenessReport verify_green_finiteness(double H, double theta_exp, const QuadratureSpec& q = {});

/// Spectral representation of cov_T:
///   (Gamma(1+2H) sin(pi H) / 4pi) int (1-e^{-s xi^2})(1-e^{-t xi^2}) |xi|^{-1-2H} dxi.
QuadResult cov_T_spectral(double s, double t, double H, double rel_tol = 1e-11);

/// Spectral representation of cov_linear_she:
///   c11 int_0^{s^t} int e^{-theta (t+s-2r) xi^2} |xi|^{1-2H} dxi dr.
QuadResult cov_linear_she_spectral(double s, double t, double H, double theta = 1.0, double rel_tol = 1e-10);

nlohmann::json to_record(const TailBoundResult& r);

}  // namespace rshe
