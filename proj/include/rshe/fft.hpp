#pragma once

// Thin RAII wrappers over FFTW plans. Plan creation and destruction are
// serialized behind a global mutex; execution on private buffers is
// thread-safe.

#include <complex>
#include <cstddef>
#include <vector>

namespace rshe::fft {

/// Unnormalized complex DFT of length n, sign -1 (forward) or +1 (backward).
class ComplexPlan {
 public:
  ComplexPlan(std::size_t n, int sign);
  ~ComplexPlan();
  ComplexPlan(const ComplexPlan&) = delete;
  ComplexPlan& operator=(const ComplexPlan&) = delete;

  /// out[j] = sum_k in[k] exp(sign * 2 pi i jk / n)
  void execute(std::vector<std::complex<double>>& in, std::vector<std::complex<double>>& out) const;

 private:
  std::size_t n_;
  void* plan_;
  std::complex<double>* in_;
  std::complex<double>* out_;
};

/// Real <-> half-complex pair of length n (n/2 + 1 coefficients).
class RealPlan {
 public:
  explicit RealPlan(std::size_t n);
  ~RealPlan();
  RealPlan(const RealPlan&) = delete;
  RealPlan& operator=(const RealPlan&) = delete;

  /// Unnormalized forward transform: spec[k] = sum_j x[j] exp(-2 pi i jk/n).
  void forward(const std::vector<double>& x, std::vector<std::complex<double>>& spec);
  /// Synthesis: x[j] = sum over all k of spec[k] exp(+2 pi i jk/n), using
  /// Hermitian symmetry. spec is left unspecified afterwards.
  void backward(std::vector<std::complex<double>>& spec, std::vector<double>& x);

  std::size_t size() const noexcept { return n_; }

 private:
  std::size_t n_;
  void* fwd_;
  void* bwd_;
  double* real_;
  std::complex<double>* cplx_;
};

}  // namespace rshe::fft
