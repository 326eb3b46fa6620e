#include "rshe/constants.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rshe/error.hpp"
#include "rshe/sigma.hpp"

namespace rshe {

namespace {

constexpr double kPi = std::numbers::pi;

// Lanczos coefficients, g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

void check_kernel_range(double H) {
  if (!(H > 0.25 && H <= 0.5)) {
    std::ostringstream os;
    os << "Hurst parameter " << H << " outside (1/4, 1/2]";
    throw DomainError(os.str());
  }
}

void check_times(double s, double t) {
  if (!(s >= 0.0 && t >= 0.0)) throw DomainError("negative time in covariance kernel");
}

}  // namespace

double gamma_fn(double x) {
  if (!(x > 0.0) || x > 171.0) throw DomainError("gamma_fn: argument outside (0, 171]");
  if (x < 0.5) {
    // reflection
    return kPi / (std::sin(kPi * x) * gamma_fn(1.0 - x));
  }
  const double z = x - 1.0;
  double a = kLanczos[0];
  const double t = z + kLanczosG + 0.5;
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (z + static_cast<double>(i));
  return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

double kappa(double H) {
  check_kernel_range(H);
  return std::sqrt(gamma_fn(2.0 * H) / gamma_fn(H));
}

double kappa_tilde(double H) {
  check_kernel_range(H);
  return std::sqrt(gamma_fn(2.0 * H) / (std::pow(2.0, 1.0 - H) * gamma_fn(H)));
}

double spectral_constant(double H) {
  check_kernel_range(H);
  return gamma_fn(2.0 * H + 1.0) * std::sin(kPi * H) / (2.0 * kPi);
}

double rho_H(long long k, double H) {
  const double a = std::abs(static_cast<double>(k));
  return 0.5 * (std::pow(a + 1.0, H) + std::pow(std::abs(a - 1.0), H) - 2.0 * std::pow(a, H));
}

double heat_kernel(double t, double x) {
  if (!(t > 0.0)) throw DomainError("heat_kernel requires t > 0");
  return std::exp(-x * x / (4.0 * t)) / std::sqrt(4.0 * kPi * t);
}

double cov_linear_she(double s, double t, double H, double theta) {
  check_times(s, t);
  if (!(theta > 0.0)) throw DomainError("cov_linear_she requires theta > 0");
  const double k2 = kappa(H) * kappa(H);
  return std::pow(theta, H - 1.0) * 0.5 * k2 * (std::pow(s + t, H) - std::pow(std::abs(t - s), H));
}

double cov_T(double s, double t, double H) {
  check_times(s, t);
  const double k2 = kappa(H) * kappa(H);
  return 0.5 * k2 * (std::pow(s, H) + std::pow(t, H) - std::pow(s + t, H));
}

double cov_fbm(double s, double t, double hurst) {
  check_times(s, t);
  if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("cov_fbm requires hurst in (0,1)");
  const double e = 2.0 * hurst;
  return 0.5 * (std::pow(s, e) + std::pow(t, e) - std::pow(std::abs(t - s), e));
}

double gaussian_abs_moment(double p) {
  if (!(p > 0.0)) throw DomainError("gaussian_abs_moment requires p > 0");
  return std::pow(2.0, 0.5 * p) * gamma_fn(0.5 * (p + 1.0)) / std::sqrt(kPi);
}

void check_hurst(double H, bool allow_white_noise) {
  if (H > 0.25 && H < 0.5) return;
  if (H == 0.5 && allow_white_noise) return;
  std::ostringstream os;
  os << "Hurst parameter " << H << " outside (1/4, 1/2)";
  if (H == 0.5) os << " (H = 1/2 needs the white-noise compatibility flag)";
  throw DomainError(os.str());
}

void ModelParams::validate() const {
  check_hurst(H, allow_white_noise);
  if (!(theta > 0.0)) throw DomainError("theta must be positive");
  (void)SigmaSpec::parse(sigma);
}

RegularityMeta RegularityMeta::make(double H, double beta0) {
  RegularityMeta m;
  m.beta0 = beta0;
  m.vartheta0 = 0.5 * std::min(H, beta0);
  const double v = m.vartheta0;
  m.delta_max = std::min((2.0 - H) * v / (2.0 * (2.0 + v)), (2.0 - H) * (1.0 - 2.0 * H) / (2.0 * (5.0 - 2.0 * H)));
  return m;
}

}  // namespace rshe
