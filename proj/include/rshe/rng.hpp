#pragma once

// Counter-based Gaussian variates. Every normal draw is addressed by
// (root_seed, stream_index, draw_index), so any trajectory can be generated
// on any worker, in any order, with bit-identical results.

#include <array>
#include <cstdint>
#include <span>

namespace rshe {

namespace detail {
inline constexpr std::uint32_t kPhiloxW32A = 0x9E3779B9;
inline constexpr std::uint32_t kPhiloxW32B = 0xBB67AE85;
inline constexpr std::uint32_t kPhiloxM4x32A = 0xD2511F53;
inline constexpr std::uint32_t kPhiloxM4x32B = 0xCD9E8D57;

// 53-bit uniform in the open interval (0, 1).
inline double to_open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}
}  // namespace detail

/// Philox4x32-10 block function (Salmon et al. 2011).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) noexcept {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(detail::kPhiloxM4x32A) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(detail::kPhiloxM4x32B) * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    key[0] += detail::kPhiloxW32A;
    key[1] += detail::kPhiloxW32B;
  }
  return ctr;
}

/// Per-trajectory random substream identifier.
struct SeedStream {
  std::uint64_t root_seed = 0;
  std::uint64_t stream_index = 0;

  friend bool operator==(const SeedStream&, const SeedStream&) = default;
};

/// Random-access standard normal generator for one SeedStream.
class NormalStream {
 public:
  explicit NormalStream(SeedStream seed) noexcept : seed_(seed) {}

  /// Two uniforms in (0, 1) from counter block `block`.
  std::array<double, 2> uniforms(std::uint64_t block) const noexcept {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
        static_cast<std::uint32_t>(seed_.stream_index), static_cast<std::uint32_t>(seed_.stream_index >> 32)};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_.root_seed),
                                              static_cast<std::uint32_t>(seed_.root_seed >> 32)};
    const auto r = philox4x32(ctr, key);
    const std::uint64_t a = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
    const std::uint64_t b = (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
    return {detail::to_open_unit(a), detail::to_open_unit(b)};
  }

  /// Normal number `draw` (Box-Muller on block draw/2).
  double normal(std::uint64_t draw) const noexcept;

  /// Fills out[i] = normal(first_draw + i).
  void fill(std::span<double> out, std::uint64_t first_draw) const noexcept;

  SeedStream seed() const noexcept { return seed_; }

 private:
  SeedStream seed_;
};

}  // namespace rshe
