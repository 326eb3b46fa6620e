#pragma once
// Parameter inference from temporal observations on a dyadic grid.
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rshe/gauss_sampler.hpp"
#include "rshe/sigma.hpp"
#include "rshe/stats.hpp"

namespace rshe {

struct EstimateReport {
  std::string estimator;  // "theta" or "H"
  double estimate = 0.0;  // ensemble mean of the point estimates
  McSummary mc;
  std::optional<double> truth;
  std::optional<double> rel_error;
  std::string h_mode = "known";  // for theta: how H was obtained ("known" or "estimated")
  std::size_t out_of_model = 0;  // estimates flagged as out-of-model

  static EstimateReport summarize(const std::string& estimator, const std::vector<double>& estimates,
                                  std::optional<double> truth);
  nlohmann::json to_json() const;
};

/// theta_hat = [V_N / (kappa^2 (1/N) sum sigma(u(t_i))^2)]^{1/(H-1)} on t_i = i/N.
/// Throws DomainError if sigma vanishes on every t_i (i < N).
double estimate_theta(const PathSample& path, const SigmaSpec& sigma, double H);

struct HurstEstimate {
  double value = 0.0;
  bool out_of_model = false;  // value > 0.75: increments too smooth for a rough path
};

/// H_hat = 1 - log2(S_{2N} / S_N) with S_N the raw sum of squared increments
/// on t_i = i/N, for a path on t_i = i/(2N).
HurstEstimate estimate_H(const PathSample& path);

}  // namespace rshe
