#include "rshe/linear_she.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rshe/constants.hpp"
#include "rshe/error.hpp"

namespace rshe {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// (phi1^2 + phi2^2) / (xi^4 + tau^2), evaluated without cancellation near 0.
double band_integrand(double tau, double xi2, double t) {
  const double s = std::sin(0.5 * tau * t);
  const double phi1 = -2.0 * s * s - std::expm1(-t * xi2);
  const double phi2 = std::sin(tau * t);
  const double den = xi2 * xi2 + tau * tau;
  if (den == 0.0) return t * t;  // limit along tau = 0: (t xi^2)^2 / xi^4
  return (phi1 * phi1 + phi2 * phi2) / den;
}

// int_0^T band_integrand dtau, panel by panel over half-periods pi/t.
QuadResult tau_integral(double T, double xi2, double t, double rel_tol) {
  QuadResult out;
  if (T <= 0.0) return out;
  const double half_period = kPi / t;
  auto g = [xi2, t](double tau) { return band_integrand(tau, xi2, t); };
  // The peak of 1/(xi^4+tau^2) has width xi^2; resolve it separately.
  double lo = 0.0;
  if (xi2 > 0.0 && xi2 < half_period) {
    const double edge = std::min(T, xi2);
    out += integrate(g, 0.0, edge, rel_tol, 0.0, 20'000);
    lo = edge;
  }
  for (double k = std::floor(lo / half_period) + 1.0; lo < T; k += 1.0) {
    const double hi = std::min(T, k * half_period);
    if (hi <= lo) continue;
    QuadResult piece = gk15(g, lo, hi);
    if (piece.abs_error > rel_tol * std::abs(piece.value)) piece = integrate(g, lo, hi, rel_tol, 0.0, 20'000);
    out += piece;
    lo = hi;
  }
  return out;
}

// Quarter-plane prefactor: 4 (symmetry) * c11 / (2 pi).
double quarter_prefactor(double H) { return 2.0 * spectral_constant(H) / kPi; }

// Band [0, A): rectangle xi < A^{1/H}, tau < A^{2/H}.
QuadResult rect_moment(double A, double t, double H, double rel_tol, std::size_t budget) {
  if (A <= 0.0) return {};
  const double X = std::pow(A, 1.0 / H);
  const double T = std::pow(A, 2.0 / H);
  const double inner_tol = 0.1 * rel_tol;
  auto f = [&](double xi) {
    if (xi == 0.0) return 0.0;
    return std::pow(xi, 1.0 - 2.0 * H) * tau_integral(T, xi * xi, t, inner_tol).value;
  };
  QuadResult r = integrate(f, 0.0, X, rel_tol, 0.0, budget);
  const double pre = quarter_prefactor(H);
  r.value *= pre;
  r.abs_error *= pre;
  return r;
}

// c11 int_X^inf xi^{-1-2H} (1 - e^{-2 t xi^2}) dxi (full tau line, band xi >= X).
QuadResult xi_tail_full_tau(double X, double t, double H, double rel_tol) {
  const double c11 = spectral_constant(H);
  const double R = std::max(X, 5.0 / std::sqrt(t));  // e^{-2 t R^2} <= e^{-50}
  auto f = [&](double xi) { return -std::expm1(-2.0 * t * xi * xi) * std::pow(xi, -1.0 - 2.0 * H); };
  QuadResult r;
  if (R > X) r = integrate(f, X, R, rel_tol, 0.0, 100'000);
  // Beyond R the exponential is below e^{-50}; integrate the power law exactly.
  r.value += std::pow(R, -2.0 * H) / (2.0 * H);
  r.value *= c11;
  r.abs_error *= c11;
  return r;
}

// Band [B, inf) computed directly: {xi >= X} plus {xi < X, tau >= T}.
QuadResult tail_moment(double B, double t, double H, double rel_tol, std::size_t budget) {
  const double X = std::pow(B, 1.0 / H);
  const double T = std::pow(B, 2.0 / H);
  QuadResult r = xi_tail_full_tau(X, t, H, rel_tol);
  auto f = [&](double xi) {
    const double c = xi * xi;
    // int_T^inf (1 + e^{-2tc}) / (c^2 + tau^2) dtau
    const double smooth = (1.0 + std::exp(-2.0 * t * c)) * (c > 0.0 ? std::atan(c / T) / c : 1.0 / T);
    const double scale = 1.0 / std::max(T, c);
    auto fn = [c](double tau) { return 1.0 / (c * c + tau * tau); };
    auto d1 = [c](double tau) {
      const double q = c * c + tau * tau;
      return -2.0 * tau / (q * q);
    };
    auto d3 = [c](double tau) {
      const double q = c * c + tau * tau;
      return 24.0 * tau * (c * c - tau * tau) / (q * q * q * q);
    };
    const double osc = cos_tail(fn, d1, d3, t, T, 1e-3 * rel_tol * scale).value;
    return std::pow(xi, 1.0 - 2.0 * H) * (smooth - 2.0 * std::exp(-t * c) * osc);
  };
  QuadResult part2 = integrate(f, 0.0, X, rel_tol, 0.0, budget);
  const double pre = quarter_prefactor(H);
  part2.value *= pre;
  part2.abs_error *= pre;
  r += part2;
  return r;
}

BandMoment finish(const QuadResult& r) {
  BandMoment m;
  m.value = r.value;
  m.achieved_tol = r.value != 0.0 ? r.abs_error / std::abs(r.value) : r.abs_error;
  m.converged = r.converged;
  return m;
}

}  // namespace

void SpectralBand::validate() const {
  if (!(a >= 0.0) || !(b >= a) || std::isnan(b)) throw DomainError("spectral band requires 0 <= a <= b <= inf");
}

BandMoment band_second_moment(const SpectralBand& band, double t, double H, const QuadratureSpec& q) {
  band.validate();
  q.validate();
  if (!(t > 0.0)) throw DomainError("band_second_moment requires t > 0");
  kappa(H);
  if (band.a == band.b) return {};
  if (std::isinf(band.b)) {
    if (band.a == 0.0) return finish(xi_tail_full_tau(0.0, t, H, q.rel_tol));
    return finish(tail_moment(band.a, t, H, q.rel_tol, q.max_evals));
  }
  QuadResult r = rect_moment(band.b, t, H, q.rel_tol, q.max_evals);
  if (band.a > 0.0) {
    const QuadResult inner = rect_moment(band.a, t, H, q.rel_tol, q.max_evals);
    r.value -= inner.value;
    r.abs_error += inner.abs_error;
    r.evals += inner.evals;
    r.converged = r.converged && inner.converged;
  }
  return finish(r);
}

TailBoundResult tail_bound_check(double a, double b, double t, double H, const QuadratureSpec& q) {
  if (!(a >= 0.0 && b > a)) throw DomainError("tail_bound_check requires 0 <= a < b");
  if (!(t > 0.0)) throw DomainError("tail_bound_check requires t > 0");
  TailBoundResult r{a, b, t, H};
  double err = 0.0, sq = 0.0;
  if (a > 0.0) {
    const BandMoment low = band_second_moment({0.0, a}, t, H, q);
    sq += low.value;
    err += low.achieved_tol * std::abs(low.value);
  }
  if (!std::isinf(b)) {
    const BandMoment high = band_second_moment({b, kInf}, t, H, q);
    sq += high.value;
    err += high.achieved_tol * std::abs(high.value);
  }
  r.lhs = std::sqrt(std::max(sq, 0.0));
  r.achieved_tol = sq > 0.0 ? err / sq : 0.0;
  const double c11 = spectral_constant(H);
  double rhs2 = 0.0;
  if (a > 0.0) rhs2 += 8.0 * c11 / (1.0 - H) * t * t * std::pow(a, 2.0 * (2.0 - H) / H);
  if (!std::isinf(b)) rhs2 += 10.0 * (2.0 - H) * c11 / (H * (1.0 - H)) / (b * b);
  r.rhs = std::sqrt(rhs2);
  r.ok = r.lhs <= r.rhs * (1.0 + 2.0 * q.rel_tol);
  return r;
}

KernelScalingReport verify_kernel_scaling(double beta, const std::vector<double>& t_list, const QuadratureSpec& q) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("verify_kernel_scaling requires beta in (0,1)");
  q.validate();
  KernelScalingReport rep;
  rep.beta = beta;
  rep.t = t_list;
  const double inner_tol = 0.1 * q.rel_tol;
  for (double t : t_list) {
    if (!(t > 0.0)) throw DomainError("verify_kernel_scaling requires t > 0");
    const double W = 12.0 * std::sqrt(t);
    // D(h) = int |p_t(x+h) - p_t(x)|^2 dx
    auto D = [&](double h) {
      auto g = [&](double x) {
        const double d = heat_kernel(t, x + h) - heat_kernel(t, x);
        return d * d;
      };
      return integrate_split(g, {-h - W, -h, -0.5 * h, 0.0, W}, inner_tol, 0.0,
                             50'000)
          .value;
    };
    const double h_star = std::sqrt(320.0 * t);  // cross term below e^{-40}
    auto f = [&](double h) { return h == 0.0 ? 0.0 : std::pow(h, -1.0 - 2.0 * beta) * D(h); };
    QuadResult r = integrate(f, 0.0, h_star, q.rel_tol, 0.0, q.max_evals);
    // For h >= h_star the two kernels no longer overlap: D(h) = 2 int p_t^2 = 2 / sqrt(8 pi t).
    const double tail = 2.0 / std::sqrt(8.0 * kPi * t) * std::pow(h_star, -2.0 * beta) / (2.0 * beta);
    rep.integral.push_back(2.0 * (r.value + tail));
    rep.converged = rep.converged && r.converged;
  }
  for (std::size_t i = 0; i < t_list.size(); ++i) {
    for (std::size_t j = 0; j < t_list.size(); ++j) {
      const double ri = rep.integral[i] * std::pow(t_list[i], 0.5 + beta);
      const double rj = rep.integral[j] * std::pow(t_list[j], 0.5 + beta);
      rep.max_ratio_deviation = std::max(rep.max_ratio_deviation, std::abs(ri / rj - 1.0));
    }
  }
  return rep;
}

GreenFinitenessReport verify_green_finiteness(double H, double theta_exp, const QuadratureSpec& q) {
  kappa(H);
  q.validate();
  if (!(theta_exp > 0.0 && theta_exp < 0.5 - H))
    throw DomainError("verify_green_finiteness requires 0 < theta_exp < 1/2 - H");
  const double inner_tol = 0.1 * q.rel_tol;
  // inner(x) = int |e^{-(x+h)^2} - e^{-x^2}|^2 |h|^{2H-2} dh, x >= 0.
  auto inner = [&](double x) {
    const double ex = std::exp(-x * x);
    auto g = [&](double h) {
      if (h == 0.0) return 0.0;
      const double d = std::exp(-(x + h) * (x + h)) - ex;
      return d * d * std::pow(std::abs(h), 2.0 * H - 2.0);
    };
    const double K = x + 8.0;
    QuadResult r;
    if (x > 0.0) {
      r = integrate_split(g, {-K, -2.0 * x, -x, 0.0, K}, inner_tol, 0.0, 100'000);
    } else {
      r = integrate_split(g, {-K, 0.0, K}, inner_tol, 0.0, 100'000);
    }
    // |h| > K: only the constant e^{-2x^2} |h|^{2H-2} survives.
    return r.value + 2.0 * ex * ex * std::pow(K, 2.0 * H - 1.0) / (1.0 - 2.0 * H);
  };
  auto f = [&](double x) { return std::pow(x, 2.0 * theta_exp) * inner(x); };
  // Large-x expansion: inner(x) ~ sqrt(pi/2) x^{2H-2} (1 + c2 / x^2 + c4 / x^4).
  auto tail = [&](double R) {
    const double e1 = 2.0 * theta_exp + 2.0 * H - 1.0;
    const double c2 = (2.0 - 2.0 * H) * (3.0 - 2.0 * H) / 8.0;
    const double c4 = c2 * (4.0 - 2.0 * H) * (5.0 - 2.0 * H) * 3.0 / 48.0;
    return std::sqrt(kPi / 2.0) * (std::pow(R, e1) / (-e1) + c2 * std::pow(R, e1 - 2.0) / (2.0 - e1) +
                                   c4 * std::pow(R, e1 - 4.0) / (4.0 - e1));
  };
  GreenFinitenessReport rep;
  double accumulated = 0.0, prev_R = 0.0;
  for (double R : {8.0, 16.0, 32.0, 64.0}) {
    accumulated += integrate(f, prev_R, R, q.rel_tol, 0.0, q.max_evals).value;
    prev_R = R;
    rep.radii.push_back(R);
    rep.levels.push_back(2.0 * (accumulated + tail(R)));
  }
  rep.value = rep.levels.back();
  const double prev = rep.levels[rep.levels.size() - 2];
  rep.last_change = std::abs(rep.value - prev) / std::abs(rep.value);
  rep.finite = std::isfinite(rep.value) && rep.last_change <= q.rel_tol;
  return rep;
}

QuadResult cov_T_spectral(double s, double t, double H, double rel_tol) {
  if (!(s >= 0.0 && t >= 0.0)) throw DomainError("cov_T_spectral requires s, t >= 0");
  const double c11 = spectral_constant(H);
  if (s == 0.0 || t == 0.0) return {};
  const double R = std::sqrt(60.0 / std::min(s, t));
  auto f = [&](double xi) {
    if (xi == 0.0) return 0.0;
    return std::expm1(-s * xi * xi) * std::expm1(-t * xi * xi) * std::pow(xi, -1.0 - 2.0 * H);
  };
  QuadResult r = integrate_split(f, {0.0, 1.0 / std::sqrt(std::max(s, t)), R}, rel_tol, 0.0, 400'000);
  r.value += std::pow(R, -2.0 * H) / (2.0 * H);
  // Prefactor Gamma(1+2H) sin(pi H) / 4pi = c11 / 2, doubled for the negative half-line.
  r.value *= c11;
  r.abs_error *= c11;
  return r;
}

QuadResult cov_linear_she_spectral(double s, double t, double H, double theta, double rel_tol) {
  if (!(s >= 0.0 && t >= 0.0)) throw DomainError("cov_linear_she_spectral requires s, t >= 0");
  const double c11 = spectral_constant(H);
  const double m = std::min(s, t);
  if (m == 0.0) return {};
  // r = m - w^{1/H} removes the (t+s-2r)^{H-1} endpoint singularity.
  auto inner = [&](double a) {
    auto g = [&](double xi) { return std::exp(-a * xi * xi) * std::pow(xi, 1.0 - 2.0 * H); };
    const double R = std::sqrt(60.0 / a);
    return 2.0 * integrate_split(g, {0.0, R / 8.0, R}, 0.01 * rel_tol, 0.0, 100'000).value;
  };
  auto f = [&](double w) {
    const double u = std::pow(w, 1.0 / H);
    const double a = theta * (std::abs(t - s) + 2.0 * u);
    if (a == 0.0) return 0.0;
    return inner(a) * std::pow(w, 1.0 / H - 1.0) / H;
  };
  QuadResult r = integrate(f, 0.0, std::pow(m, H), rel_tol, 0.0, 200'000);
  r.value *= c11;
  r.abs_error *= c11;
  return r;
}

nlohmann::json to_record(const TailBoundResult& r) {
  return {{"check", "tail_bound"},
          {"params", {{"a", r.a}, {"b", std::isinf(r.b) ? nlohmann::json("inf") : nlohmann::json(r.b)}, {"t", r.t}, {"H", r.H}}},
          {"lhs", r.lhs},
          {"rhs", r.rhs},
          {"ok", r.ok},
          {"achieved_tol", r.achieved_tol}};
}

}  // namespace rshe
