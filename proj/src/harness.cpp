#include "rshe/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>

#include "rshe/error.hpp"
#include "rshe/estimate.hpp"
#include "rshe/gauss_sampler.hpp"
#include "rshe/linear_she.hpp"
#include "rshe/parallel.hpp"
#include "rshe/path_io.hpp"
#include "rshe/stats.hpp"

namespace rshe {

namespace {

using ojson = nlohmann::ordered_json;

struct StatRow {
  std::string stat;
  double n_or_eps = 0.0;
  double value = 0.0;
  double target = 0.0;
  double rel_error = 0.0;
  double stderr_ = 0.0;
};

double rel(double value, double target) { return target != 0.0 ? std::abs(value - target) / std::abs(target) : 0.0; }

std::string band(double lo, double hi) { return "[" + io::fmt(lo) + ", " + io::fmt(hi) + "]"; }

class Artifacts {
 public:
  explicit Artifacts(const ExperimentConfig& cfg) : cfg_(cfg), dir_(cfg.output.dir) {
    std::filesystem::create_directories(dir_);
    write_json("manifest.json", cfg.manifest());
  }

  void write_json(const std::string& name, const nlohmann::json& j) const {
    std::ofstream out(dir_ / name);
    out << j.dump(2) << '\n';
  }

  void records(const std::vector<ojson>& rows) const {
    if (rows.empty()) return;
    if (cfg_.output.format == "json") {
      std::ofstream out(dir_ / "records.jsonl");
      for (const auto& r : rows) out << r.dump() << '\n';
      return;
    }
    std::ofstream out(dir_ / "records.csv");
    bool first = true;
    for (const auto& [k, v] : rows.front().items()) {
      out << (first ? "" : ",") << k;
      first = false;
    }
    out << '\n';
    for (const auto& r : rows) {
      first = true;
      for (const auto& [k, v] : r.items()) {
        out << (first ? "" : ",");
        first = false;
        if (v.is_number_float()) {
          out << io::fmt(v.get<double>());
        } else if (v.is_string()) {
          out << v.get<std::string>();
        } else {
          out << v.dump();
        }
      }
      out << '\n';
    }
  }

  void stats(const std::vector<StatRow>& rows) const {
    if (rows.empty()) return;
    std::ofstream out(dir_ / "stats.csv");
    out << "stat,N_or_eps,value,target,rel_error,stderr\n";
    for (const auto& r : rows)
      out << r.stat << ',' << io::fmt(r.n_or_eps) << ',' << io::fmt(r.value) << ',' << io::fmt(r.target) << ','
          << io::fmt(r.rel_error) << ',' << io::fmt(r.stderr_) << '\n';
  }

  void path(const PathSample& p, std::size_t index, const std::string& column = "value",
            std::optional<std::size_t> probe = std::nullopt) const {
    if (!cfg_.output.write_paths) return;
    std::filesystem::create_directories(dir_ / "paths");
    char name[64];
    if (probe)
      std::snprintf(name, sizeof name, "path_%05zu_probe_%zu.csv", index, *probe);
    else
      std::snprintf(name, sizeof name, "path_%05zu.csv", index);
    io::write_path_csv(dir_ / "paths" / name, p, column);
  }

  void matrix(const std::string& name, const io::Matrix& m) const { io::write_matrix(dir_ / name, m); }

 private:
  const ExperimentConfig& cfg_;
  std::filesystem::path dir_;
};

struct Context {
  const ExperimentConfig& cfg;
  Artifacts& art;
  RunResult& res;
  std::vector<StatRow> rows;
  std::vector<ojson> records;

  void check(const std::string& stat, double mean, double se, std::size_t count, double target,
             const std::string& rule, bool pass) {
    res.checks.push_back({stat, mean, se, count, target, rule, pass});
  }
};

Kernel model_kernel(const ExperimentConfig& cfg) {
  if (cfg.kernel == "T") return t_process_kernel(cfg.model.H);
  if (cfg.kernel == "fbm") return fbm_kernel(0.5 * cfg.model.H);
  return linear_she_kernel(cfg.model.H, cfg.model.theta);
}

std::vector<PathSample> exact_ensemble(const ExperimentConfig& cfg, const Kernel& kernel, const TimeGrid& grid) {
  const auto plan = seed_plan(cfg.mc.root_seed, cfg.mc.n_paths);
  cached_factor(kernel, grid);
  return parallel_map(plan.size(), cfg.mc.workers, [&](std::size_t i) {
    PathSample p = cholesky_sample(kernel, grid, plan[i], 1).front();
    p.path_index = i;
    return p;
  });
}

void write_exact_paths(const Context& ctx, const std::vector<PathSample>& paths) {
  for (std::size_t i = 0; i < paths.size(); ++i) ctx.art.path(paths[i], i);
}

struct SolverOutcome {
  bool ok = false;
  std::string error;
  FieldTrajectory traj;
};

SolverConfig solver_config(const ExperimentConfig& cfg) {
  SolverConfig s = cfg.solver;
  s.params = cfg.model;
  return s;
}

std::vector<SolverOutcome> solver_ensemble(Context& ctx, bool keep_field_of_first) {
  const auto& cfg = ctx.cfg;
  const auto plan = seed_plan(cfg.mc.root_seed, cfg.mc.n_paths);
  auto out = parallel_map(plan.size(), cfg.mc.workers, [&](std::size_t i) {
    SolverConfig s = solver_config(cfg);
    s.seed = plan[i];
    s.store_field = s.store_field && keep_field_of_first && i == 0;
    SolverOutcome o;
    try {
      o.traj = solve(s);
      o.ok = true;
    } catch (const NumericalError& e) {
      o.error = e.what();
    }
    return o;
  });
  ojson items = ojson::array();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].ok) {
      for (std::size_t p = 0; p < out[i].traj.probe_paths.size(); ++p) {
        PathSample path = out[i].traj.probe_paths[p];
        path.path_index = i;
        ctx.art.path(path, i, "u", p);
      }
    } else {
      ++ctx.res.aborted;
      items.push_back({{"index", i}, {"message", out[i].error}});
    }
  }
  ctx.res.summary["aborts"] = {{"count", ctx.res.aborted}, {"items", items}};
  return out;
}

// ---------------------------------------------------------------- experiments

void run_verify_constants(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const double H = cfg.model.H;
  const double tol = cfg.tol.constants_rel;
  ctx.res.summary["constants"] = {{"H", H},
                                  {"kappa", kappa(H)},
                                  {"kappa_tilde", kappa_tilde(H)},
                                  {"c11", spectral_constant(H)},
                                  {"gaussian_abs_moment_2_over_H", gaussian_abs_moment(2.0 / H)}};
  // Identity residuals on random (s, t, H) triples.
  const NormalStream rng(seed_plan(cfg.mc.root_seed, 1).front());
  double r_kappa = 0.0, r_decomp = 0.0, r_diag = 0.0;
  const std::size_t n = 100;
  for (std::size_t i = 0; i < n; ++i) {
    const auto u = rng.uniforms(2 * i);
    const auto w = rng.uniforms(2 * i + 1);
    const double s = 10.0 * u[0], t = 10.0 * u[1];
    const double h = 0.25 + 0.25 * (1e-3 + 0.998 * w[0]);
    const double k2 = kappa(h) * kappa(h), kt2 = kappa_tilde(h) * kappa_tilde(h);
    r_kappa = std::max(r_kappa, rel(kt2 / k2, std::pow(2.0, h - 1.0)));
    const double fb = k2 * cov_fbm(s, t, 0.5 * h);
    r_decomp = std::max(r_decomp, std::abs(cov_T(s, t, h) + cov_linear_she(s, t, h, 1.0) - fb) / std::abs(fb));
    r_diag = std::max(r_diag, rel(cov_linear_she(t, t, h, 1.0), kt2 * std::pow(t, h)));
    ctx.records.push_back(ojson{{"s", s}, {"t", t}, {"H", h}});
  }
  ctx.check("kappa_tilde_ratio_residual", r_kappa, 0.0, n, 0.0, "< " + io::fmt(tol), r_kappa < tol);
  ctx.check("decomposition_residual", r_decomp, 0.0, n, 0.0, "< " + io::fmt(tol), r_decomp < tol);
  ctx.check("diagonal_residual", r_diag, 0.0, n, 0.0, "< " + io::fmt(tol), r_diag < tol);
  ctx.rows.push_back({"kappa_tilde_ratio_residual", double(n), r_kappa, 0.0, r_kappa, 0.0});
  ctx.rows.push_back({"decomposition_residual", double(n), r_decomp, 0.0, r_decomp, 0.0});
  ctx.rows.push_back({"diagonal_residual", double(n), r_diag, 0.0, r_diag, 0.0});

  // Quadrature oracles at the configured H.
  const double qtol = cfg.tol.quadrature_rel;
  QuadratureSpec q;
  q.rel_tol = 1e-9;
  double worst_T = 0.0, worst_band = 0.0;
  for (double t : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const double quad = cov_T_spectral(t, t, H).value;
    const double band_val = band_second_moment({0.0, std::numeric_limits<double>::infinity()}, t, H, q).value;
    const double kt2 = kappa_tilde(H) * kappa_tilde(H) * std::pow(t, H);
    worst_T = std::max(worst_T, rel(quad, cov_T(t, t, H)));
    worst_band = std::max(worst_band, rel(band_val, kt2));
    ctx.rows.push_back({"cov_T_spectral", t, quad, cov_T(t, t, H), rel(quad, cov_T(t, t, H)), 0.0});
    ctx.rows.push_back({"band_full", t, band_val, kt2, rel(band_val, kt2), 0.0});
  }
  const double cls = cov_linear_she_spectral(1.0, 2.0, H, cfg.model.theta).value;
  const double cls_closed = cov_linear_she(1.0, 2.0, H, cfg.model.theta);
  ctx.rows.push_back({"cov_linear_she_spectral", 2.0, cls, cls_closed, rel(cls, cls_closed), 0.0});
  ctx.check("cov_T_vs_spectral", worst_T, 0.0, 5, 0.0, "< " + io::fmt(qtol), worst_T < qtol);
  ctx.check("band_full_vs_kappa_tilde", worst_band, 0.0, 5, 0.0, "< " + io::fmt(qtol), worst_band < qtol);
  ctx.check("cov_linear_she_vs_spectral", rel(cls, cls_closed), 0.0, 1, 0.0, "< " + io::fmt(qtol),
            rel(cls, cls_closed) < qtol);
}

void run_sample(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const Kernel kernel = model_kernel(cfg);
  const TimeGrid grid = TimeGrid::unit(cfg.N);
  const auto paths = exact_ensemble(cfg, kernel, grid);
  write_exact_paths(ctx, paths);
  ctx.art.matrix("paths.bin", io::paths_to_matrix(paths));
  std::vector<double> sq;
  for (const auto& p : paths) {
    sq.push_back(p.values.back() * p.values.back());
    ctx.records.push_back(ojson{{"path", p.path_index}, {"value_at_1", p.values.back()}});
  }
  const McSummary m = McSummary::of(sq);
  const double target = kernel.cov(1.0, 1.0);
  ctx.rows.push_back({"variance_at_1", 1.0, m.mean, target, rel(m.mean, target), m.stderr_});
  const bool pass = paths.size() < 2 || std::abs(m.mean - target) <= cfg.tol.sample_z * m.stderr_;
  ctx.check("variance_at_1", m.mean, m.stderr_, m.count, target, "within " + io::fmt(cfg.tol.sample_z) + " stderr",
            pass);
}

void run_solve(Context& ctx) {
  const auto& cfg = ctx.cfg;
  auto outs = solver_ensemble(ctx, true);
  if (!outs.empty() && outs.front().ok && !outs.front().traj.field.empty()) {
    const auto& tr = outs.front().traj;
    io::Matrix m{static_cast<std::uint32_t>(tr.times.size()), static_cast<std::uint32_t>(tr.n_sites), tr.field};
    ctx.art.matrix("field.bin", m);
  }
  const bool linear = SigmaSpec::parse(cfg.model.sigma).additive() && cfg.model.u0 == "zero";
  std::vector<double> pooled;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    ojson r{{"path", i}, {"status", outs[i].ok ? "ok" : "aborted"}};
    if (outs[i].ok) {
      double s = 0.0;
      for (std::size_t p = 0; p < outs[i].traj.probe_paths.size(); ++p) {
        const double u = outs[i].traj.probe_paths[p].values.back();
        r["u_end_probe_" + std::to_string(p)] = u;
        s += u * u;
      }
      pooled.push_back(s / static_cast<double>(outs[i].traj.probe_paths.size()));
    }
    ctx.records.push_back(r);
  }
  const McSummary m = McSummary::of(pooled);
  const double H = cfg.model.H;
  const double target =
      linear ? std::pow(cfg.model.theta, H - 1.0) * kappa_tilde(H) * kappa_tilde(H) * std::pow(cfg.solver.t_end, H)
             : 0.0;
  ctx.rows.push_back({"probe_second_moment_at_t_end", cfg.solver.t_end, m.mean, target, rel(m.mean, target), m.stderr_});
  if (linear && m.count > 0) {
    const double dev = rel(m.mean, target);
    ctx.check("additive_variance_at_t_end", m.mean, m.stderr_, m.count, target,
              "relative deviation <= " + io::fmt(cfg.tol.cross_rel), dev <= cfg.tol.cross_rel);
  }
}

void run_qvar(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const double H = cfg.model.H;
  const double theta = cfg.model.theta;
  if (cfg.source == "exact") {
    const auto paths = exact_ensemble(cfg, linear_she_kernel(H, theta), TimeGrid::unit(cfg.N));
    write_exact_paths(ctx, paths);
    std::vector<double> v;
    const double target = std::pow(theta, H - 1.0) * kappa(H) * kappa(H);
    for (const auto& p : paths) {
      const QVarReport q = quadratic_variation(p, H, target);
      v.push_back(q.V_N);
      ctx.records.push_back(ojson{{"path", p.path_index}, {"N", q.N}, {"V_N", q.V_N}, {"target", q.target}});
    }
    const McSummary m = McSummary::of(v);
    ctx.rows.push_back({"V_N", double(cfg.N), m.mean, target, rel(m.mean, target), m.stderr_});
    ctx.check("mean_V_N", m.mean, m.stderr_, m.count, target, "within " + io::fmt(cfg.tol.qvar_z) + " stderr",
              paths.size() < 2 || std::abs(m.mean - target) <= cfg.tol.qvar_z * m.stderr_);
    if (cfg.N >= 8 && paths.size() >= 2 && theta == 1.0) {
      const DecayReport d = qvar_variance_decay(paths, {cfg.N / 4, cfg.N / 2, cfg.N}, H);
      for (std::size_t i = 0; i < d.N.size(); ++i) ctx.rows.push_back({"mse_V_N", double(d.N[i]), d.mse[i], 0.0, 0.0, 0.0});
      ctx.rows.push_back({"decay_slope", 0.0, d.slope, -1.0, rel(d.slope, -1.0), d.slope_stderr});
      ctx.check("variance_decay_slope", d.slope, d.slope_stderr, paths.size(), -1.0,
                band(cfg.tol.decay_lo, cfg.tol.decay_hi), d.slope >= cfg.tol.decay_lo && d.slope <= cfg.tol.decay_hi);
    }
    return;
  }
  const SigmaSpec sigma = SigmaSpec::parse(cfg.model.sigma);
  auto outs = solver_ensemble(ctx, false);
  std::vector<double> ratio;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    if (!outs[i].ok) continue;
    const PathSample p = dyadic_restriction(outs[i].traj.probe_paths.front(), cfg.N);
    const double target = qvar_target(p, sigma, H, theta);
    const QVarReport q = quadratic_variation(p, H, target);
    ratio.push_back(q.V_N / target);
    ctx.records.push_back(ojson{{"path", i}, {"N", q.N}, {"V_N", q.V_N}, {"target", target}, {"ratio", q.V_N / target}});
  }
  const McSummary m = McSummary::of(ratio);
  ctx.rows.push_back({"V_N_over_target", double(cfg.N), m.mean, 1.0, rel(m.mean, 1.0), m.stderr_});
  ctx.check("mean_ratio", m.mean, m.stderr_, m.count, 1.0, band(cfg.tol.ratio_lo, cfg.tol.ratio_hi),
            m.count > 0 && m.mean >= cfg.tol.ratio_lo && m.mean <= cfg.tol.ratio_hi);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void run_lil(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const double H = cfg.model.H;
  const std::size_t steps = std::size_t{1} << (cfg.eps_hi - cfg.eps_lo);
  const TimeGrid grid{0.0, steps + 1, std::ldexp(1.0, -cfg.eps_hi)};
  const auto paths = exact_ensemble(cfg, linear_she_kernel(H, cfg.model.theta), grid);
  write_exact_paths(ctx, paths);
  const auto levels = dyadic_levels(cfg.eps_lo, cfg.eps_hi);
  const double reference = kappa_tilde(H) * std::pow(cfg.model.theta, 0.5 * (H - 1.0));
  std::vector<double> kh, ch;
  std::size_t inside = 0;
  bool chung_ok = true;
  for (const auto& p : paths) {
    const LILReport r = lil_at_origin(p, levels, H);
    kh.push_back(r.khinchin_stat);
    ch.push_back(r.chung_stat);
    const double x = r.khinchin_stat / reference;
    if (x >= cfg.tol.lil_lo && x <= cfg.tol.lil_hi) ++inside;
    chung_ok = chung_ok && std::isfinite(r.chung_stat) && r.chung_stat > 0.0;
    ctx.records.push_back(ojson{{"path", p.path_index}, {"khinchin", r.khinchin_stat}, {"chung", r.chung_stat}});
  }
  const double frac = static_cast<double>(inside) / static_cast<double>(paths.size());
  const McSummary mk = McSummary::of(kh);
  const McSummary mc = McSummary::of(ch);
  ctx.rows.push_back({"khinchin", levels.back(), mk.mean, reference, rel(mk.mean, reference), mk.stderr_});
  ctx.rows.push_back({"khinchin_fraction_in_envelope", levels.back(), frac, cfg.tol.lil_fraction, 0.0, 0.0});
  ctx.rows.push_back({"chung", levels.back(), mc.mean, 0.0, 0.0, mc.stderr_});
  ctx.check("khinchin_envelope_fraction", frac, 0.0, paths.size(), cfg.tol.lil_fraction,
            ">= " + io::fmt(cfg.tol.lil_fraction) + " inside " + band(cfg.tol.lil_lo, cfg.tol.lil_hi) + " x kappa_tilde",
            frac >= cfg.tol.lil_fraction);
  ctx.check("chung_positive_finite", mc.mean, mc.stderr_, paths.size(), 0.0, "all > 0 and finite", chung_ok);
  if (paths.size() >= 2) {
    const std::size_t half = paths.size() / 2;
    const double m1 = median({ch.begin(), ch.begin() + static_cast<std::ptrdiff_t>(half)});
    const double m2 = median({ch.begin() + static_cast<std::ptrdiff_t>(half), ch.end()});
    const double dev = std::abs(m1 / m2 - 1.0);
    ctx.rows.push_back({"chung_batch_median_ratio", 0.0, m1 / m2, 1.0, dev, 0.0});
    ctx.check("chung_batch_stability", m1 / m2, 0.0, paths.size(), 1.0,
              "|ratio - 1| <= " + io::fmt(cfg.tol.chung_stability), dev <= cfg.tol.chung_stability);
  }
}

void run_pvar(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const double H = cfg.model.H;
  const auto paths = exact_ensemble(cfg, linear_she_kernel(H, cfg.model.theta), TimeGrid::unit(cfg.N));
  write_exact_paths(ctx, paths);
  const auto phi = weight_function(cfg.weight);
  const SigmaSpec one = SigmaSpec::parse("additive");
  std::vector<double> val, tgt, diff;
  for (const auto& p : paths) {
    const PowerVariation pv = weighted_power_variation(p, phi, one, H, cfg.model.theta);
    val.push_back(pv.value);
    tgt.push_back(pv.target);
    diff.push_back(pv.value - pv.target);
    ctx.records.push_back(ojson{{"path", p.path_index}, {"value", pv.value}, {"target", pv.target}});
  }
  const McSummary mv = McSummary::of(val), mt = McSummary::of(tgt), md = McSummary::of(diff);
  ctx.rows.push_back({"weighted_power_variation", double(cfg.N), mv.mean, mt.mean, rel(mv.mean, mt.mean), mv.stderr_});
  if (cfg.weight == "one") {
    ctx.check("power_variation_mean", mv.mean, mv.stderr_, mv.count, mt.mean,
              "relative deviation <= " + io::fmt(cfg.tol.pvar_rel), rel(mv.mean, mt.mean) <= cfg.tol.pvar_rel);
  } else {
    ctx.check("power_variation_mean_difference", md.mean, md.stderr_, md.count, 0.0, "within 4 stderr",
              paths.size() < 2 || std::abs(md.mean) <= 4.0 * md.stderr_);
  }
}

void run_estimate(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const double H = cfg.model.H;
  const double theta = cfg.model.theta;
  const auto paths = exact_ensemble(cfg, linear_she_kernel(H, theta), TimeGrid::unit(cfg.N));
  write_exact_paths(ctx, paths);
  const SigmaSpec one = SigmaSpec::parse("additive");
  std::vector<std::size_t> levels;
  for (std::size_t n = cfg.N; n >= 4 && levels.size() < 3; n /= 2) levels.insert(levels.begin(), n);
  std::vector<std::vector<double>> th(levels.size());
  std::vector<double> hh;
  std::size_t flagged = 0;
  for (const auto& p : paths) {
    ojson r{{"path", p.path_index}};
    for (std::size_t l = 0; l < levels.size(); ++l) {
      const double e = estimate_theta(dyadic_restriction(p, levels[l]), one, H);
      th[l].push_back(e);
      r["theta_hat_N" + std::to_string(levels[l])] = e;
    }
    const HurstEstimate h = estimate_H(p);
    hh.push_back(h.value);
    flagged += h.out_of_model ? 1 : 0;
    r["H_hat"] = h.value;
    r["out_of_model"] = h.out_of_model;
    ctx.records.push_back(r);
  }
  nlohmann::json reports = nlohmann::json::array();
  std::vector<double> errs, ses;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    EstimateReport rep = EstimateReport::summarize("theta", th[l], theta);
    errs.push_back(*rep.rel_error);
    ses.push_back(rep.mc.stderr_ / theta);
    nlohmann::json j = rep.to_json();
    j["N"] = levels[l];
    reports.push_back(j);
    ctx.rows.push_back({"theta_hat", double(levels[l]), rep.estimate, theta, *rep.rel_error, rep.mc.stderr_});
  }
  EstimateReport hrep = EstimateReport::summarize("H", hh, H);
  hrep.out_of_model = flagged;
  nlohmann::json hj = hrep.to_json();
  hj["N"] = cfg.N;
  reports.push_back(hj);
  ctx.res.summary["estimates"] = reports;
  ctx.rows.push_back({"H_hat", double(cfg.N), hrep.estimate, H, *hrep.rel_error, hrep.mc.stderr_});
  ctx.check("theta_hat_mean", th.back().empty() ? 0.0 : McSummary::of(th.back()).mean,
            McSummary::of(th.back()).stderr_, th.back().size(), theta,
            "relative deviation <= " + io::fmt(cfg.tol.theta_rel), errs.back() <= cfg.tol.theta_rel);
  ctx.check("H_hat_mean", hrep.estimate, hrep.mc.stderr_, hh.size(), H, "absolute deviation <= " + io::fmt(cfg.tol.hurst_abs),
            std::abs(hrep.estimate - H) <= cfg.tol.hurst_abs);
  bool trend = true;
  for (std::size_t l = 1; l < errs.size(); ++l) trend = trend && errs[l] <= errs[l - 1] + 2.0 * ses[l];
  ctx.check("theta_consistency_trend", errs.back(), 0.0, paths.size(), 0.0,
            "relative error non-increasing in N (2 stderr slack)", trend);
}

void run_tailbounds(Context& ctx) {
  const auto& cfg = ctx.cfg;
  QuadratureSpec q;
  q.rel_tol = 1e-8;
  std::size_t ok = 0, total = 0;
  for (double t : {0.5, 1.0}) {
    for (double a : {0.25, 0.5, 1.0, 1.5, 2.0}) {
      for (double b : {4.0, 8.0}) {
        const TailBoundResult r = tail_bound_check(a, b, t, cfg.model.H, q);
        ++total;
        ok += r.ok ? 1 : 0;
        const nlohmann::json j = to_record(r);
        ctx.records.push_back(ojson(j));
        ctx.rows.push_back({"tail_bound_lhs", b, r.lhs, r.rhs, r.rhs > 0 ? r.lhs / r.rhs : 0.0, r.achieved_tol});
      }
    }
  }
  ctx.check("tail_bounds_hold", double(ok), 0.0, total, double(total), "all grid points lhs <= rhs", ok == total);
}

void run_scaling(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const double H = cfg.model.H;
  std::vector<double> eps;
  for (int k = 12; k >= 4; --k) eps.push_back(std::ldexp(1.0, -k));
  const ScalingReport ex = exact_scaling_exponent(H, cfg.model.theta, 1.0, eps);
  for (std::size_t i = 0; i < ex.eps.size(); ++i)
    ctx.rows.push_back({"exact_increment_second_moment", ex.eps[i], ex.second_moment[i], 0.0, 0.0, 0.0});
  ctx.rows.push_back({"exact_slope", 0.0, ex.slope, H, rel(ex.slope, H), ex.slope_stderr});
  ctx.check("exact_slope", ex.slope, ex.slope_stderr, ex.eps.size(), H, "+/- " + io::fmt(cfg.tol.exact_slope_abs),
            std::abs(ex.slope - H) <= cfg.tol.exact_slope_abs);

  std::vector<PathSample> paths;
  if (cfg.source == "exact") {
    paths = exact_ensemble(cfg, linear_she_kernel(H, cfg.model.theta), TimeGrid::unit(cfg.N));
    write_exact_paths(ctx, paths);
  } else {
    auto outs = solver_ensemble(ctx, false);
    for (auto& o : outs)
      if (o.ok) paths.push_back(std::move(o.traj.probe_paths.front()));
  }
  if (paths.empty()) return;
  const std::vector<std::size_t> steps = {4, 8, 16, 32, 64};
  const std::size_t last = paths.front().values.size() - 1;
  std::vector<std::size_t> anchors;
  for (std::size_t i = 1; i <= 8 && 64 * i <= last; ++i) anchors.push_back(last - 64 * i);
  if (anchors.empty()) throw ConfigError("scaling needs at least 129 recorded points");
  const ScalingReport mc = scaling_exponent(paths, anchors, steps);
  for (std::size_t i = 0; i < mc.eps.size(); ++i) {
    ctx.rows.push_back({"path_increment_second_moment", mc.eps[i], mc.second_moment[i], 0.0, 0.0, 0.0});
  }
  for (std::size_t i = 0; i < paths.size(); ++i) ctx.records.push_back(ojson{{"path", i}, {"value_at_end", paths[i].values.back()}});
  ctx.rows.push_back({"path_slope", 0.0, mc.slope, H, rel(mc.slope, H), mc.slope_stderr});
  ctx.check("path_slope", mc.slope, mc.slope_stderr, paths.size(), H, "+/- " + io::fmt(cfg.tol.solver_slope_abs),
            std::abs(mc.slope - H) <= cfg.tol.solver_slope_abs);
}

}  // namespace

std::vector<SeedStream> seed_plan(std::uint64_t root_seed, std::size_t n_paths) {
  std::vector<SeedStream> out(n_paths);
  for (std::size_t i = 0; i < n_paths; ++i) out[i] = SeedStream{root_seed, i};
  return out;
}

nlohmann::json EnsembleSummary::to_json() const {
  return {{"stat", stat}, {"mean", mean}, {"stderr", stderr_}, {"count", count},
          {"target", target}, {"tolerance", tolerance}, {"pass", pass}};
}

RunResult run(const ExperimentConfig& cfg) {
  cfg.validate();
  Artifacts art(cfg);
  RunResult res;
  res.summary = {{"experiment", cfg.experiment}, {"n_paths", cfg.mc.n_paths}};
  Context ctx{cfg, art, res, {}, {}};
  const std::string& e = cfg.experiment;
  if (e == "verify-constants") run_verify_constants(ctx);
  else if (e == "sample") run_sample(ctx);
  else if (e == "solve") run_solve(ctx);
  else if (e == "qvar") run_qvar(ctx);
  else if (e == "lil") run_lil(ctx);
  else if (e == "pvar") run_pvar(ctx);
  else if (e == "estimate") run_estimate(ctx);
  else if (e == "tailbounds") run_tailbounds(ctx);
  else if (e == "scaling") run_scaling(ctx);
  clear_factor_cache();

  bool pass = true;
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : res.checks) {
    checks.push_back(c.to_json());
    pass = pass && c.pass;
  }
  const double abort_frac = cfg.mc.n_paths ? static_cast<double>(res.aborted) / static_cast<double>(cfg.mc.n_paths) : 0.0;
  if (abort_frac > cfg.tol.abort_fraction) res.exit_code = kExitAborts;
  else if (!pass) res.exit_code = kExitTolerance;
  if (!res.summary.contains("aborts")) res.summary["aborts"] = {{"count", 0}, {"items", nlohmann::json::array()}};
  res.summary["count"] = cfg.mc.n_paths - res.aborted;
  res.summary["checks"] = checks;
  res.summary["pass"] = res.exit_code == kExitPass;
  res.summary["exit_code"] = res.exit_code;
  art.records(ctx.records);
  art.stats(ctx.rows);
  art.write_json("summary.json", res.summary);
  return res;
}

}  // namespace rshe
