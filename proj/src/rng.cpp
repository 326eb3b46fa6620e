#include "rshe/rng.hpp"

#include <cmath>
#include <numbers>

namespace rshe {

double NormalStream::normal(std::uint64_t draw) const noexcept {
  const auto u = uniforms(draw >> 1);
  const double radius = std::sqrt(-2.0 * std::log(u[0]));
  const double angle = 2.0 * std::numbers::pi * u[1];
  return (draw & 1) ? radius * std::sin(angle) : radius * std::cos(angle);
}

void NormalStream::fill(std::span<double> out, std::uint64_t first_draw) const noexcept {
  std::size_t i = 0;
  const std::size_t n = out.size();
  if (n == 0) return;
  if (first_draw & 1) {
    out[i++] = normal(first_draw);
  }
  std::uint64_t draw = first_draw + i;
  for (; i + 1 < n; i += 2, draw += 2) {
    const auto u = uniforms(draw >> 1);
    const double radius = std::sqrt(-2.0 * std::log(u[0]));
    const double angle = 2.0 * std::numbers::pi * u[1];
    out[i] = radius * std::cos(angle);
    out[i + 1] = radius * std::sin(angle);
  }
  if (i < n) out[i] = normal(draw);
}

}  // namespace rshe
