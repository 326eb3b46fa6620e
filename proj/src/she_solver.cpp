#include "rshe/she_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rshe/error.hpp"
#include "rshe/fft.hpp"
#include "rshe/parallel.hpp"

namespace rshe {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::vector<double> parse_numbers(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("bad initial-condition parameter '" + item + "'");
    }
    if (used != item.size() || !std::isfinite(v)) throw ConfigError("bad initial-condition parameter '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::size_t nearest_site(double x, double L, std::size_t n) {
  const double h = L / static_cast<double>(n);
  return static_cast<std::size_t>(std::llround(x / h)) % n;
}

}  // namespace

void SolverConfig::validate() const {
  params.validate();
  if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError("L must be positive");
  if (!is_pow2(n_modes) || n_modes < 64) throw ConfigError("n_modes must be a power of two >= 64");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be positive");
  if (!(dt > 0.0) || dt > t_end / 64.0 * (1.0 + 1e-12)) throw ConfigError("dt must satisfy 0 < dt <= t_end/64");
  const double steps = t_end / dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * steps) throw ConfigError("t_end must be a multiple of dt");
  if (record_stride == 0) throw ConfigError("record_stride must be >= 1");
  if (probes.empty()) throw ConfigError("at least one probe is required");
  for (double x : probes)
    if (!(x >= 0.0 && x < L)) throw ConfigError("probes must lie in [0, L)");
  if (!(blowup_threshold > 0.0)) throw ConfigError("blowup_threshold must be positive");
  initial_condition(params.u0, L);
}

std::size_t SolverConfig::n_steps() const { return static_cast<std::size_t>(std::llround(t_end / dt)); }

std::function<double(double)> initial_condition(const std::string& descriptor, double L) {
  const auto colon = descriptor.find(':');
  const std::string id = descriptor.substr(0, colon);
  const std::vector<double> p =
      colon == std::string::npos ? std::vector<double>{} : parse_numbers(descriptor.substr(colon + 1));
  if (id == "zero") {
    if (!p.empty()) throw ConfigError("zero takes no parameters");
    return [](double) { return 0.0; };
  }
  if (id == "bump") {
    if (p.size() > 3) throw ConfigError("bump takes at most 3 parameters");
    const double A = p.size() > 0 ? p[0] : 1.0;
    const double c = p.size() > 1 ? p[1] : 0.5 * L;
    const double w = p.size() > 2 ? p[2] : 2.0;
    if (!(w > 0.0 && w <= 0.5 * L)) throw ConfigError("bump width must be in (0, L/2]");
    return [A, c, w, L](double x) {
      double d = std::fmod(std::abs(x - c), L);
      d = std::min(d, L - d);
      return d < w ? 0.5 * A * (1.0 + std::cos(kPi * d / w)) : 0.0;
    };
  }
  if (id == "cosine") {
    if (p.size() > 2) throw ConfigError("cosine takes at most 2 parameters");
    const double A = p.size() > 0 ? p[0] : 1.0;
    const double m = p.size() > 1 ? p[1] : 1.0;
    if (m != std::round(m)) throw ConfigError("cosine wavenumber must be an integer");
    return [A, m, L](double x) { return A * std::cos(2.0 * kPi * m * x / L); };
  }
  throw ConfigError("unknown initial condition '" + descriptor + "'");
}

namespace {

// sqrt of the per-mode variance; index n/2 holds the real Nyquist amplitude.
std::vector<double> noise_amplitudes(const SolverConfig& cfg) {
  const std::size_t half = cfg.n_modes / 2;
  const double H = cfg.params.H;
  const double c11 = spectral_constant(H);
  const double dxi = 2.0 * kPi / cfg.L;
  std::vector<double> amp(half + 1, 0.0);
  for (std::size_t k = 1; k <= half; ++k) {
    const double s = c11 * std::pow(dxi * static_cast<double>(k), 1.0 - 2.0 * H) * dxi * cfg.dt;
    amp[k] = k < half ? std::sqrt(0.5 * s) : std::sqrt(s);
  }
  return amp;
}

void fill_noise(const SeedStream& seed, const std::vector<double>& amp, std::size_t step_index,
                std::vector<double>& z, std::vector<cplx>& a) {
  const std::size_t half = amp.size() - 1;
  const std::size_t n = 2 * half;
  z.resize(n);
  NormalStream(seed).fill(z, static_cast<std::uint64_t>(step_index) * n);
  a.resize(half + 1);
  a[0] = {};
  for (std::size_t k = 1; k < half; ++k) a[k] = {amp[k] * z[2 * k - 2], amp[k] * z[2 * k - 1]};
  a[half] = {amp[half] * z[n - 2], 0.0};
}

}  // namespace

void noise_coefficients(const SolverConfig& cfg, std::size_t step_index, std::vector<cplx>& a) {
  std::vector<double> z;
  fill_noise(cfg.seed, noise_amplitudes(cfg), step_index, z, a);
}

struct SpectralStepper::Impl {
  explicit Impl(std::size_t n) : plan(n), x(n), w(n), g(n / 2 + 1), tmp(n / 2 + 1) {}
  fft::RealPlan plan;
  std::vector<double> x, w;
  std::vector<cplx> g, tmp;
  SigmaSpec sigma;
  bool additive = false;
  bool zero = false;
  std::size_t cutoff = 0;
};

SpectralStepper::SpectralStepper(const SolverConfig& cfg) : impl_(std::make_unique<Impl>(cfg.n_modes)) {
  const std::size_t n = cfg.n_modes;
  const std::size_t half = n / 2;
  impl_->sigma = SigmaSpec::parse(cfg.params.sigma);
  impl_->additive = impl_->sigma.additive();
  impl_->zero = impl_->sigma.kind() == SigmaSpec::Kind::Zero;
  impl_->cutoff = cfg.dealias ? n / 3 : half;
  decay_.resize(half + 1);
  nu_.resize(half + 1);
  const double dxi = 2.0 * kPi / cfg.L;
  for (std::size_t k = 0; k <= half; ++k) {
    const double xi = dxi * static_cast<double>(k);
    const double lam = cfg.params.theta * xi * xi * cfg.dt;
    decay_[k] = std::exp(-lam);
    nu_[k] = k == 0 ? 1.0 : std::sqrt(-std::expm1(-2.0 * lam) / (2.0 * lam));
  }
}

SpectralStepper::~SpectralStepper() = default;

void SpectralStepper::to_physical(const std::vector<cplx>& u_hat, std::vector<double>& u) {
  impl_->tmp = u_hat;
  impl_->plan.backward(impl_->tmp, u);
}

void SpectralStepper::to_spectral(const std::vector<double>& u, std::vector<cplx>& u_hat) {
  impl_->plan.forward(u, u_hat);
  const double inv = 1.0 / static_cast<double>(u.size());
  for (auto& c : u_hat) c *= inv;
}

void SpectralStepper::advance(std::vector<cplx>& u_hat, const std::vector<cplx>& a) {
  const std::size_t m = u_hat.size();
  if (a.size() != m) throw GridMismatch("noise and state resolution differ");
  auto& im = *impl_;
  if (im.zero) {
    for (std::size_t k = 0; k < m; ++k) u_hat[k] *= decay_[k];
    return;
  }
  if (im.additive) {
    for (std::size_t k = 0; k < m; ++k) u_hat[k] = decay_[k] * u_hat[k] + nu_[k] * a[k];
    return;
  }
  im.tmp = a;
  im.plan.backward(im.tmp, im.w);
  im.tmp = u_hat;
  im.plan.backward(im.tmp, im.x);
  const std::size_t n = im.x.size();
  for (std::size_t j = 0; j < n; ++j) im.x[j] = im.sigma(im.x[j]) * im.w[j];
  im.plan.forward(im.x, im.g);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < m; ++k) {
    const cplx forcing = k <= im.cutoff ? nu_[k] * inv * im.g[k] : cplx{};
    u_hat[k] = decay_[k] * u_hat[k] + forcing;
  }
}

std::vector<cplx> step(const std::vector<cplx>& state, const std::vector<double>& noise, const SolverConfig& cfg) {
  if (noise.size() != cfg.n_modes || state.size() != cfg.n_modes / 2 + 1)
    throw GridMismatch("state and noise resolution must match n_modes");
  SpectralStepper stepper(cfg);
  std::vector<cplx> a;
  stepper.to_spectral(noise, a);
  std::vector<cplx> out = state;
  stepper.advance(out, a);
  return out;
}

std::vector<double> synthesize_noise_step(const SolverConfig& cfg, std::size_t step_index) {
  std::vector<cplx> a;
  noise_coefficients(cfg, step_index, a);
  fft::RealPlan plan(cfg.n_modes);
  std::vector<double> w;
  plan.backward(a, w);
  return w;
}

FieldTrajectory solve(const SolverConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n_modes;
  const std::size_t steps = cfg.n_steps();
  const double h = cfg.L / static_cast<double>(n);
  SpectralStepper stepper(cfg);

  FieldTrajectory tr;
  tr.n_sites = n;
  tr.config_echo = cfg;
  for (double x : cfg.probes) tr.probe_sites.push_back(nearest_site(x, cfg.L, n));

  std::vector<double> u(n);
  const auto u0 = initial_condition(cfg.params.u0, cfg.L);
  for (std::size_t j = 0; j < n; ++j) u[j] = u0(h * static_cast<double>(j));
  std::vector<cplx> u_hat, a;
  std::vector<double> z;
  const std::vector<double> amp = noise_amplitudes(cfg);
  stepper.to_spectral(u, u_hat);

  std::vector<std::vector<double>> columns(tr.probe_sites.size());
  auto record = [&](std::size_t m) {
    tr.times.push_back(static_cast<double>(m) * cfg.dt);
    if (cfg.store_field) tr.field.insert(tr.field.end(), u.begin(), u.end());
    for (std::size_t p = 0; p < columns.size(); ++p) columns[p].push_back(u[tr.probe_sites[p]]);
  };
  record(0);
  const bool need_physical_each_step = !SigmaSpec::parse(cfg.params.sigma).additive();
  for (std::size_t m = 1; m <= steps; ++m) {
    fill_noise(cfg.seed, amp, m - 1, z, a);
    stepper.advance(u_hat, a);
    const bool rec = m % cfg.record_stride == 0;
    if (rec || need_physical_each_step) {
      stepper.to_physical(u_hat, u);
      double peak = 0.0;
      for (double v : u) {
        if (!std::isfinite(v)) throw NumericalError("non-finite value at step " + std::to_string(m));
        peak = std::max(peak, std::abs(v));
      }
      if (peak > cfg.blowup_threshold)
        throw NumericalError("blow-up: max|u| = " + std::to_string(peak) + " at step " + std::to_string(m));
    }
    if (rec) record(m);
  }
  const TimeGrid grid{0.0, tr.times.size(), cfg.dt * static_cast<double>(cfg.record_stride)};
  for (std::size_t p = 0; p < columns.size(); ++p) {
    PathSample ps;
    ps.grid = grid;
    ps.values = std::move(columns[p]);
    ps.kernel_id = "she:" + cfg.params.sigma;
    ps.seed = cfg.seed;
    ps.path_index = p;
    tr.probe_paths.push_back(std::move(ps));
  }
  return tr;
}

double linear_grid_variance(const SolverConfig& cfg, double t) {
  if (!(t >= 0.0)) throw DomainError("linear_grid_variance requires t >= 0");
  const double H = cfg.params.H;
  const double theta = cfg.params.theta;
  const double c11 = spectral_constant(H);
  const double dxi = 2.0 * std::numbers::pi / cfg.L;
  const std::size_t half = cfg.n_modes / 2;
  double v = 0.0;
  for (std::size_t k = 1; k <= half; ++k) {
    const double xi = dxi * static_cast<double>(k);
    const double a = theta * xi * xi;
    const double mult = k == half ? 1.0 : 2.0;
    v += mult * c11 * std::pow(xi, 1.0 - 2.0 * H) * dxi * (-std::expm1(-2.0 * a * t)) / (2.0 * a);
  }
  return v;
}

CrossValidationReport cross_validate_linear(const SolverConfig& cfg, const std::vector<double>& check_times,
                                            std::size_t n_paths, std::size_t workers) {
  cfg.validate();
  if (!SigmaSpec::parse(cfg.params.sigma).additive()) throw ConfigError("cross-validation requires sigma = additive");
  if (cfg.params.u0 != "zero") throw ConfigError("cross-validation requires u0 = zero");
  if (n_paths < 2) throw ConfigError("cross-validation requires at least 2 paths");
  const double rec_dt = cfg.dt * static_cast<double>(cfg.record_stride);
  std::vector<std::size_t> rows;
  for (double t : check_times) {
    const double r = t / rec_dt;
    if (!(t > 0.0) || t > cfg.t_end * (1.0 + 1e-12) || std::abs(r - std::round(r)) > 1e-9 * r)
      throw ConfigError("check times must be positive recorded instants");
    rows.push_back(static_cast<std::size_t>(std::llround(r)));
  }
  SolverConfig run_cfg = cfg;
  run_cfg.store_field = false;
  // Per path: mean over probes of u^2 at each check time (the mean is 0).
  auto per_path = parallel_map(n_paths, workers, [&](std::size_t p) {
    SolverConfig c = run_cfg;
    c.seed = SeedStream{cfg.seed.root_seed, p};
    const FieldTrajectory tr = solve(c);
    std::vector<double> out(rows.size(), 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (const auto& path : tr.probe_paths) out[i] += path.values[rows[i]] * path.values[rows[i]];
      out[i] /= static_cast<double>(tr.probe_paths.size());
    }
    return out;
  });
  CrossValidationReport rep;
  rep.n_paths = n_paths;
  const double H = cfg.params.H;
  const double kt = kappa_tilde(H);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double mean = 0.0;
    for (const auto& v : per_path) mean += v[i];
    mean /= static_cast<double>(n_paths);
    double ss = 0.0;
    for (const auto& v : per_path) ss += (v[i] - mean) * (v[i] - mean);
    const double se = std::sqrt(ss / static_cast<double>(n_paths - 1) / static_cast<double>(n_paths));
    const double t = check_times[i];
    const double target = std::pow(cfg.params.theta, H - 1.0) * kt * kt * std::pow(t, H);
    rep.times.push_back(t);
    rep.variance.push_back(mean);
    rep.stderr_.push_back(se);
    rep.target.push_back(target);
    rep.grid_variance.push_back(linear_grid_variance(cfg, t));
    rep.rel_dev.push_back(std::abs(mean - target) / target);
    if (rep.rel_dev.back() >= rep.max_rel_dev) {
      rep.max_rel_dev = rep.rel_dev.back();
      rep.max_rel_stderr = se / target;
    }
  }
  return rep;
}

}  // namespace rshe
