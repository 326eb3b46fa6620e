#include "rshe/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rshe/constants.hpp"
#include "rshe/error.hpp"

namespace rshe {

namespace {

double loglog_guard(double r) { return std::max(std::log(std::log(1.0 / r)), 1.0); }

std::size_t unit_N(const PathSample& path) {
  if (path.values.size() != path.grid.n) throw GridMismatch("path length differs from its grid");
  const std::size_t N = path.grid.n - 1;
  if (N < 2 || !is_unit_grid(path.grid, N)) throw GridMismatch("path must lie on t_i = i/N over [0, 1]");
  return N;
}

std::size_t eps_to_steps(double eps, double dt) {
  const double k = eps / dt;
  const double r = std::round(k);
  if (r < 1.0 || std::abs(k - r) > 1e-9 * k) throw std::range_error("eps level not resolvable on the grid");
  return static_cast<std::size_t>(r);
}

}  // namespace

McSummary McSummary::of(const std::vector<double>& xs) {
  McSummary s;
  s.count = xs.size();
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stderr_ = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  return s;
}

std::vector<double> increment(const PathSample& path, std::size_t eps_steps) {
  const auto& v = path.values;
  if (eps_steps == 0 || eps_steps >= v.size()) throw std::range_error("increment lag out of range");
  std::vector<double> out(v.size() - eps_steps);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = v[i + eps_steps] - v[i];
  return out;
}

bool is_unit_grid(const TimeGrid& grid, std::size_t N) {
  if (grid.n != N + 1 || grid.t0 != 0.0) return false;
  return std::abs(grid.dt * static_cast<double>(N) - 1.0) < 1e-12;
}

PathSample dyadic_restriction(const PathSample& path, std::size_t N) {
  const std::size_t M = unit_N(path);
  if (N == 0 || M % N != 0) throw GridMismatch("grid of size " + std::to_string(M) + " cannot be restricted to " +
                                               std::to_string(N));
  const std::size_t stride = M / N;
  PathSample out = path;
  out.grid = TimeGrid::unit(N);
  out.values.resize(N + 1);
  for (std::size_t i = 0; i <= N; ++i) out.values[i] = path.values[i * stride];
  return out;
}

QVarReport quadratic_variation(const PathSample& path, double H, std::optional<double> target) {
  const std::size_t N = unit_N(path);
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double d = path.values[i + 1] - path.values[i];
    s += d * d;
  }
  QVarReport r;
  r.N = N;
  r.V_N = std::pow(static_cast<double>(N), H - 1.0) * s;
  r.target = target ? *target : kappa(H) * kappa(H);
  r.rel_error = r.target != 0.0 ? std::abs(r.V_N - r.target) / std::abs(r.target) : 0.0;
  return r;
}

double qvar_target(const PathSample& path, const SigmaSpec& sigma, double H, double theta) {
  const std::size_t N = unit_N(path);
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double g = sigma(path.values[i]);
    s += g * g;
  }
  const double k = kappa(H);
  return std::pow(theta, H - 1.0) * k * k * s / static_cast<double>(N);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("fit_line needs at least 2 matching points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = y[i] - f.intercept - f.slope * x[i];
      rss += e * e;
    }
    f.slope_stderr = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  }
  return f;
}

DecayReport qvar_variance_decay(const std::vector<PathSample>& paths, const std::vector<std::size_t>& N_list,
                                double H) {
  if (N_list.size() < 3) throw std::invalid_argument("qvar_variance_decay needs at least 3 levels of N");
  if (paths.size() < 2) throw std::invalid_argument("qvar_variance_decay needs an ensemble of at least 2 paths");
  const double k2 = kappa(H) * kappa(H);
  DecayReport rep;
  std::vector<double> lx, ly;
  for (std::size_t N : N_list) {
    double mse = 0.0;
    for (const auto& p : paths) {
      const double d = quadratic_variation(dyadic_restriction(p, N), H).V_N - k2;
      mse += d * d;
    }
    mse /= static_cast<double>(paths.size());
    rep.N.push_back(N);
    rep.mse.push_back(mse);
    lx.push_back(std::log(static_cast<double>(N)));
    ly.push_back(std::log(mse));
  }
  const LineFit f = fit_line(lx, ly);
  rep.slope = f.slope;
  rep.slope_stderr = f.slope_stderr;
  return rep;
}

std::function<double(double)> weight_function(const std::string& name) {
  if (name == "one") return [](double) { return 1.0; };
  if (name == "identity") return [](double u) { return u; };
  if (name == "tanh") return [](double u) { return std::tanh(u); };
  throw ConfigError("unknown weight function '" + name + "'");
}

PowerVariation weighted_power_variation(const PathSample& path, const std::function<double(double)>& phi,
                                        const SigmaSpec& sigma, double H, double theta) {
  const std::size_t N = unit_N(path);
  if ((N & (N - 1)) != 0) throw GridMismatch("weighted power variation needs 2^n + 1 points");
  const double p = 2.0 / H;
  double sum = 0.0, tsum = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    const double u = path.values[j];
    const double w = phi(u);
    sum += w * std::pow(std::abs(path.values[j + 1] - u), p);
    tsum += w * std::pow(std::abs(sigma(u)), p);
  }
  const double c = std::pow(kappa(H), p) * gaussian_abs_moment(p) * std::pow(theta, (H - 1.0) / H);
  return {sum, c * tsum / static_cast<double>(N)};
}

std::vector<double> dyadic_levels(int k_lo, int k_hi) {
  if (k_lo > k_hi) throw std::invalid_argument("dyadic_levels needs k_lo <= k_hi");
  std::vector<double> out;
  for (int k = k_hi; k >= k_lo; --k) out.push_back(std::ldexp(1.0, -k));
  return out;
}

std::vector<double> khinchin_statistic(const PathSample& path, std::size_t t_index,
                                       const std::vector<double>& eps_levels, double H) {
  const auto& v = path.values;
  if (t_index >= v.size()) throw std::range_error("t_index outside the path");
  std::vector<double> out;
  double running = 0.0;
  std::size_t done = 0;
  for (double eps : eps_levels) {
    const std::size_t k = eps_to_steps(eps, path.grid.dt);
    if (t_index + k >= v.size()) throw std::range_error("eps level exceeds the path");
    for (std::size_t j = done + 1; j <= k; ++j) {
      const double r = static_cast<double>(j) * path.grid.dt;
      const double ratio = std::abs(v[t_index + j] - v[t_index]) / (std::pow(r, 0.5 * H) * std::sqrt(2.0 * loglog_guard(r)));
      running = std::max(running, ratio);
    }
    done = std::max(done, k);
    out.push_back(running);
  }
  return out;
}

double chung_statistic(const PathSample& path, const std::vector<double>& eps_levels, double H) {
  const auto& v = path.values;
  if (eps_levels.empty()) throw std::range_error("chung_statistic needs at least one eps level");
  double best = std::numeric_limits<double>::infinity();
  for (double eps : eps_levels) {
    const std::size_t k = eps_to_steps(eps, path.grid.dt);
    if (k >= v.size()) throw std::range_error("eps level exceeds the path");
    double sup = 0.0;
    for (std::size_t j = 1; j <= k; ++j) sup = std::max(sup, std::abs(v[j] - v[0]));
    best = std::min(best, sup / std::pow(eps / loglog_guard(eps), 0.5 * H));
  }
  return best;
}

LILReport lil_at_origin(const PathSample& path, const std::vector<double>& eps_levels, double H) {
  LILReport r;
  r.eps_grid = eps_levels;
  r.khinchin = khinchin_statistic(path, 0, eps_levels, H);
  r.khinchin_stat = r.khinchin.back();
  r.chung_stat = chung_statistic(path, eps_levels, H);
  r.reference = kappa_tilde(H);
  return r;
}

ScalingReport scaling_exponent(const std::vector<PathSample>& paths, const std::vector<std::size_t>& anchors,
                               const std::vector<std::size_t>& eps_steps) {
  if (eps_steps.size() < 4) throw std::invalid_argument("scaling_exponent needs at least 4 eps levels");
  if (paths.empty() || anchors.empty()) throw std::invalid_argument("scaling_exponent needs paths and anchors");
  ScalingReport rep;
  std::vector<double> lx, ly;
  for (std::size_t k : eps_steps) {
    double s = 0.0;
    for (const auto& p : paths) {
      for (std::size_t a : anchors) {
        if (k == 0 || a + k >= p.values.size()) throw std::range_error("eps level exceeds the path");
        const double d = p.values[a + k] - p.values[a];
        s += d * d;
      }
    }
    s /= static_cast<double>(paths.size() * anchors.size());
    const double eps = static_cast<double>(k) * paths.front().grid.dt;
    rep.eps.push_back(eps);
    rep.second_moment.push_back(s);
    lx.push_back(std::log(eps));
    ly.push_back(std::log(s));
  }
  const LineFit f = fit_line(lx, ly);
  rep.slope = f.slope;
  rep.slope_stderr = f.slope_stderr;
  return rep;
}

ScalingReport exact_scaling_exponent(double H, double theta, double t, const std::vector<double>& eps) {
  if (eps.size() < 4) throw std::invalid_argument("exact_scaling_exponent needs at least 4 eps levels");
  ScalingReport rep;
  std::vector<double> lx, ly;
  for (double e : eps) {
    const double m = cov_linear_she(t + e, t + e, H, theta) + cov_linear_she(t, t, H, theta) -
                     2.0 * cov_linear_she(t, t + e, H, theta);
    rep.eps.push_back(e);
    rep.second_moment.push_back(m);
    lx.push_back(std::log(e));
    ly.push_back(std::log(m));
  }
  const LineFit f = fit_line(lx, ly);
  rep.slope = f.slope;
  rep.slope_stderr = f.slope_stderr;
  return rep;
}

}  // namespace rshe
