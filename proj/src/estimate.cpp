#include "rshe/estimate.hpp"

#include <cmath>

#include "rshe/constants.hpp"
#include "rshe/error.hpp"

namespace rshe {

namespace {

constexpr double kOutOfModelH = 0.75;

double raw_square_sum(const PathSample& p) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < p.values.size(); ++i) {
    const double d = p.values[i + 1] - p.values[i];
    s += d * d;
  }
  return s;
}

}  // namespace

EstimateReport EstimateReport::summarize(const std::string& estimator, const std::vector<double>& estimates,
                                         std::optional<double> truth) {
  EstimateReport r;
  r.estimator = estimator;
  r.mc = McSummary::of(estimates);
  r.estimate = r.mc.mean;
  r.truth = truth;
  if (truth && *truth != 0.0) r.rel_error = std::abs(r.estimate - *truth) / std::abs(*truth);
  return r;
}

nlohmann::json EstimateReport::to_json() const {
  nlohmann::json j = {{"estimator", estimator},
                      {"estimate", estimate},
                      {"mean", mc.mean},
                      {"stderr", mc.stderr_},
                      {"count", mc.count},
                      {"out_of_model", out_of_model}};
  j["truth"] = truth ? nlohmann::json(*truth) : nlohmann::json(nullptr);
  j["rel_error"] = rel_error ? nlohmann::json(*rel_error) : nlohmann::json(nullptr);
  if (estimator == "theta") j["h_mode"] = h_mode;
  return j;
}

double estimate_theta(const PathSample& path, const SigmaSpec& sigma, double H) {
  const QVarReport q = quadratic_variation(path, H);
  const double denom = qvar_target(path, sigma, H, 1.0);
  if (!(denom > 0.0)) throw DomainError("theta estimate undefined: sigma(u(t_i)) = 0 for all i");
  if (!(q.V_N > 0.0)) throw DomainError("theta estimate undefined: zero quadratic variation");
  return std::pow(q.V_N / denom, 1.0 / (H - 1.0));
}

HurstEstimate estimate_H(const PathSample& path) {
  const std::size_t M = path.grid.n - 1;
  if (M < 4 || M % 2 != 0 || !is_unit_grid(path.grid, M)) throw GridMismatch("estimate_H needs t_i = i/(2N) on [0, 1]");
  const double s_fine = raw_square_sum(path);
  const double s_coarse = raw_square_sum(dyadic_restriction(path, M / 2));
  if (!(s_fine > 0.0 && s_coarse > 0.0)) throw DomainError("H estimate undefined: zero increment sum");
  HurstEstimate h;
  h.value = 1.0 - std::log2(s_fine / s_coarse);
  h.out_of_model = h.value > kOutOfModelH;
  return h;
}

}  // namespace rshe
