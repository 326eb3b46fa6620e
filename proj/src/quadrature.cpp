#include "rshe/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <vector>

#include "rshe/error.hpp"

namespace rshe {

namespace {

// QUADPACK qk15 abscissae and weights.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  QuadResult r;
  bool operator<(const Panel& o) const { return r.abs_error < o.r.abs_error; }
};

}  // namespace

void QuadratureSpec::validate() const {
  if (!(rel_tol >= 1e-10 && rel_tol <= 1e-3)) throw ConfigError("quadrature rel_tol must lie in [1e-10, 1e-3]");
  if (max_evals < 15) throw ConfigError("quadrature budget too small");
  if (rule != "gk15-adaptive") throw ConfigError("unknown quadrature rule '" + rule + "'");
}

QuadResult gk15(const Integrand& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double fsum = f(centre - dx) + f(centre + dx);
    kron += kWgk[j] * fsum;
    if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
  }
  QuadResult r;
  r.value = kron * half;
  r.abs_error = std::abs((kron - gauss) * half);
  r.evals = 15;
  return r;
}

QuadResult integrate(const Integrand& f, double a, double b, double rel_tol, double abs_tol,
                     std::size_t max_evals) {
  if (a == b) return {};
  std::priority_queue<Panel> heap;
  QuadResult first = gk15(f, a, b);
  heap.push({a, b, first});
  double value = first.value;
  double error = first.abs_error;
  std::size_t evals = first.evals;
  while (error > std::max(abs_tol, rel_tol * std::abs(value))) {
    if (evals + 30 > max_evals) break;
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Cannot bisect further in floating point; accept the panel.
      heap.push(worst);
      break;
    }
    const QuadResult left = gk15(f, worst.a, mid);
    const QuadResult right = gk15(f, mid, worst.b);
    evals += 30;
    value += left.value + right.value - worst.r.value;
    error += left.abs_error + right.abs_error - worst.r.abs_error;
    heap.push({worst.a, mid, left});
    heap.push({mid, worst.b, right});
  }
  // Re-sum in a fixed order for a stable result.
  std::vector<Panel> panels;
  panels.reserve(heap.size());
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  QuadResult out;
  for (const auto& p : panels) {
    out.value += p.r.value;
    out.abs_error += p.r.abs_error;
  }
  out.evals = evals;
  out.converged = out.abs_error <= std::max(abs_tol, rel_tol * std::abs(out.value)) * (1.0 + 1e-12);
  return out;
}

QuadResult integrate_split(const Integrand& f, std::initializer_list<double> points, double rel_tol,
                           double abs_tol, std::size_t max_evals) {
  std::vector<double> pts(points);
  QuadResult total;
  if (pts.size() < 2) return total;
  const std::size_t pieces = pts.size() - 1;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    total += integrate(f, pts[i], pts[i + 1], rel_tol, abs_tol / static_cast<double>(pieces),
                       max_evals / pieces);
  }
  total.converged = total.converged || total.abs_error <= std::max(abs_tol, rel_tol * std::abs(total.value));
  return total;
}

QuadResult cos_tail(const Integrand& f, const Integrand& df, const Integrand& d3f, double omega, double T,
                    double abs_tol) {
  if (!(omega > 0.0)) throw DomainError("cos_tail requires omega > 0");
  const double half_period = std::numbers::pi / omega;
  QuadResult out;
  // First zero of sin(omega tau) strictly after T.
  double lo = T;
  double hi = (std::floor(T / half_period) + 1.0) * half_period;
  const double w2 = omega * omega;
  const double w4 = w2 * w2;
  for (std::size_t panels = 0;; ++panels) {
    auto g = [&](double tau) { return std::cos(omega * tau) * f(tau); };
    QuadResult piece = gk15(g, lo, hi);
    if (piece.abs_error > 1e-3 * abs_tol) piece = integrate(g, lo, hi, 1e-13, 1e-3 * abs_tol, 20'000);
    out += piece;
    lo = hi;
    hi += half_period;
    const double r3 = std::abs(d3f(lo)) / w4;
    if (r3 < 0.1 * abs_tol || panels > 2'000'000) {
      const double c = std::cos(omega * lo);
      out.value += -c * df(lo) / w2 + c * d3f(lo) / w4;
      out.abs_error += r3;
      break;
    }
  }
  return out;
}

}  // namespace rshe
