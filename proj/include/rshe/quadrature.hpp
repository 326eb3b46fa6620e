#pragma once

#include <cstddef>
#include <functional>
#include <string>

namespace rshe {

/// Adaptive-rule selection and budget for deterministic quadrature.
struct QuadratureSpec {
  std::string rule = "gk15-adaptive";
  double rel_tol = 1e-9;
  std::size_t max_evals = 2'000'000;

  void validate() const;
};

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  std::size_t evals = 0;
  bool converged = true;

  QuadResult& operator+=(const QuadResult& o) {
    value += o.value;
    abs_error += o.abs_error;
    evals += o.evals;
    converged = converged && o.converged;
    return *this;
  }
};

using Integrand = std::function<double(double)>;

/// One Gauss-Kronrod (7, 15) panel on [a, b]; abs_error = |K15 - G7|.
QuadResult gk15(const Integrand& f, double a, double b);

/// Globally adaptive bisection on [a, b] (finite). Stops when the summed
/// error estimate is below max(abs_tol, rel_tol * |I|) or the eval budget
/// is spent (converged = false).
QuadResult integrate(const Integrand& f, double a, double b, double rel_tol, double abs_tol = 0.0,
                     std::size_t max_evals = 200'000);

/// Integrates over [a, b] after splitting at the given interior points.
QuadResult integrate_split(const Integrand& f, std::initializer_list<double> points, double rel_tol,
                           double abs_tol = 0.0, std::size_t max_evals = 200'000);

/// Tail integral  int_T^inf cos(omega tau) f(tau) dtau  for f smooth, positive
/// and decaying at least like tau^{-2}. Sums panels between consecutive zeros of
/// sin(omega tau) up to a cutoff M, then adds the integration-by-parts boundary
/// terms -cos(omega M) f'(M)/omega^2 + cos(omega M) f'''(M)/omega^4. The cutoff is
/// the first zero past T with |f'''(M)|/omega^4 and |f'(M)|/omega^2 small enough.
QuadResult cos_tail(const Integrand& f, const Integrand& df, const Integrand& d3f, double omega, double T,
                    double abs_tol);

}  // namespace rshe
