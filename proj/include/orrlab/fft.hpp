#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <span>

#include "orrlab/core.hpp"

namespace orrlab {

namespace detail {
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// Unnormalized complex DFT of fixed length backed by FFTW.
///
/// Plans are created with FFTW_UNALIGNED so that execute() may be called
/// concurrently on arbitrary caller buffers.
class Fft {
 public:
  explicit Fft(std::size_t n) : n_(n) {
    std::lock_guard lock(detail::fftw_planner_mutex());
    auto* a = fftw_alloc_complex(n);
    auto* b = fftw_alloc_complex(n);
    fwd_ = fftw_plan_dft_1d(static_cast<int>(n), a, b, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    bwd_ = fftw_plan_dft_1d(static_cast<int>(n), a, b, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(a);
    fftw_free(b);
    if (!fwd_ || !bwd_) throw Error("fft: plan creation failed");
  }
  ~Fft() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  std::size_t size() const { return n_; }

  /// out[m] = sum_j in[j] exp(-2 pi i j m / n)
  void forward(std::span<const cplx> in, std::span<cplx> out) const { run(fwd_, in, out); }
  /// out[j] = sum_m in[m] exp(+2 pi i j m / n)
  void backward(std::span<const cplx> in, std::span<cplx> out) const { run(bwd_, in, out); }

 private:
  void run(fftw_plan p, std::span<const cplx> in, std::span<cplx> out) const {
    if (in.size() != n_ || out.size() != n_) throw Error("fft: length mismatch");
    // FFTW does not write to the input of an out-of-place complex transform.
    auto* src = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data()));
    auto* dst = reinterpret_cast<fftw_complex*>(out.data());
    fftw_execute_dft(p, src, dst);
  }

  std::size_t n_;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

/// Shared plan cache keyed by transform length.
inline std::shared_ptr<const Fft> fft_for(std::size_t n) {
  static std::mutex m;
  static std::map<std::size_t, std::shared_ptr<const Fft>> cache;
  std::lock_guard lock(m);
  auto& slot = cache[n];
  if (!slot) slot = std::make_shared<const Fft>(n);
  return slot;
}

}  // namespace orrlab
