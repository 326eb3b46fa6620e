#include "rshe/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

namespace rshe::fft {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

ComplexPlan::ComplexPlan(std::size_t n, int sign) : n_(n) {
  std::lock_guard lock(planner_mutex());
  in_ = reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * n));
  out_ = reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * n));
  plan_ = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in_),
                           reinterpret_cast<fftw_complex*>(out_), sign, FFTW_ESTIMATE);
}

ComplexPlan::~ComplexPlan() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  fftw_free(in_);
  fftw_free(out_);
}

void ComplexPlan::execute(std::vector<std::complex<double>>& in, std::vector<std::complex<double>>& out) const {
  std::copy(in.begin(), in.end(), in_);
  fftw_execute(static_cast<fftw_plan>(plan_));
  out.assign(out_, out_ + n_);
}

RealPlan::RealPlan(std::size_t n) : n_(n) {
  std::lock_guard lock(planner_mutex());
  real_ = static_cast<double*>(fftw_malloc(sizeof(double) * n));
  cplx_ = reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
  fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), real_, reinterpret_cast<fftw_complex*>(cplx_), FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(cplx_), real_, FFTW_ESTIMATE);
}

RealPlan::~RealPlan() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
  fftw_free(real_);
  fftw_free(cplx_);
}

void RealPlan::forward(const std::vector<double>& x, std::vector<std::complex<double>>& spec) {
  std::copy(x.begin(), x.end(), real_);
  fftw_execute(static_cast<fftw_plan>(fwd_));
  spec.assign(cplx_, cplx_ + n_ / 2 + 1);
}

void RealPlan::backward(std::vector<std::complex<double>>& spec, std::vector<double>& x) {
  std::copy(spec.begin(), spec.end(), cplx_);
  fftw_execute(static_cast<fftw_plan>(bwd_));
  x.assign(real_, real_ + n_);
}

}  // namespace rshe::fft
