#include <fftw3.h>

#include <mutex>

#include "oscsing/operator.hpp"

namespace oscsing::detail {

namespace {

// The FFTW planner is not reentrant.
std::mutex planner_mutex;

std::size_t good_size(std::size_t n) {
  std::size_t best = SIZE_MAX;
  for (std::size_t p2 = 1; p2 < 2 * n; p2 *= 2)
    for (std::size_t p3 = p2; p3 < 2 * n; p3 *= 3)
      for (std::size_t p5 = p3; p5 < 2 * n; p5 *= 5)
        if (p5 >= n && p5 < best) best = p5;
  return best;
}

}  // namespace

struct Convolver::Impl {
  std::size_t n = 0;
  std::size_t kernel_len = 0;
  std::size_t max_len = 0;
  fftw_complex* spectrum = nullptr;
  fftw_complex* work = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex);
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    fftw_free(spectrum);
    fftw_free(work);
  }
};

Convolver::Convolver(const std::vector<cdouble>& kernel, std::size_t max_signal_len)
    : impl_(std::make_unique<Impl>()) {
  Impl& s = *impl_;
  s.kernel_len = kernel.size();
  s.max_len = max_signal_len;
  if (kernel.empty() || max_signal_len == 0) return;
  s.n = good_size(kernel.size() + max_signal_len - 1);
  s.spectrum = fftw_alloc_complex(s.n);
  s.work = fftw_alloc_complex(s.n);
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    const int ni = static_cast<int>(s.n);
    s.forward = fftw_plan_dft_1d(ni, s.work, s.work, FFTW_FORWARD, FFTW_ESTIMATE);
    s.backward = fftw_plan_dft_1d(ni, s.work, s.work, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < s.n; ++i) {
    const cdouble v = i < kernel.size() ? kernel[i] : cdouble{};
    s.work[i][0] = v.real();
    s.work[i][1] = v.imag();
  }
  fftw_execute(s.forward);
  for (std::size_t i = 0; i < s.n; ++i) {
    s.spectrum[i][0] = s.work[i][0];
    s.spectrum[i][1] = s.work[i][1];
  }
}

Convolver::~Convolver() = default;
Convolver::Convolver(Convolver&&) noexcept = default;
Convolver& Convolver::operator=(Convolver&&) noexcept = default;

std::vector<cdouble> Convolver::apply(const std::vector<cdouble>& signal) const {
  const Impl& s = *impl_;
  if (signal.empty() || s.kernel_len == 0) return {};
  if (signal.size() > s.max_len) throw std::invalid_argument("signal longer than the convolver allows");
  for (std::size_t i = 0; i < s.n; ++i) {
    const cdouble v = i < signal.size() ? signal[i] : cdouble{};
    s.work[i][0] = v.real();
    s.work[i][1] = v.imag();
  }
  fftw_execute(s.forward);
  for (std::size_t i = 0; i < s.n; ++i) {
    const cdouble p = cdouble(s.work[i][0], s.work[i][1]) * cdouble(s.spectrum[i][0], s.spectrum[i][1]);
    s.work[i][0] = p.real();
    s.work[i][1] = p.imag();
  }
  fftw_execute(s.backward);
  const std::size_t out_n = signal.size() + s.kernel_len - 1;
  std::vector<cdouble> out(out_n);
  const double scale = 1.0 / static_cast<double>(s.n);
  for (std::size_t i = 0; i < out_n; ++i) out[i] = cdouble(s.work[i][0], s.work[i][1]) * scale;
  return out;
}

std::vector<cdouble> fft_convolve(const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
  if (a.empty() || b.empty()) return {};
  return Convolver(b, a.size()).apply(a);
}

}  // namespace oscsing::detail
