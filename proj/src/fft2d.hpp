#ifndef KAPDIRAC_SRC_FFT2D_HPP_
#define KAPDIRAC_SRC_FFT2D_HPP_

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <span>

namespace kapdirac::detail {

/// Unnormalized 2D complex DFT pair over an nx-by-ny row-major array.
class Fft2D {
 public:
  Fft2D(int nx, int ny) : n_(static_cast<std::size_t>(nx) * ny) {
    auto* buf = fftw_alloc_complex(n_);
    std::lock_guard lock(planner_mutex());
    forward_ = fftw_plan_dft_2d(nx, ny, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    backward_ = fftw_plan_dft_2d(nx, ny, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
  }
  ~Fft2D() { release(); }
  Fft2D(const Fft2D&) = delete;
  Fft2D& operator=(const Fft2D&) = delete;
  Fft2D(Fft2D&& o) noexcept : n_(o.n_), forward_(o.forward_), backward_(o.backward_) {
    o.forward_ = o.backward_ = nullptr;
  }
  Fft2D& operator=(Fft2D&& o) noexcept {
    if (this != &o) {
      release();
      n_ = o.n_;
      forward_ = o.forward_;
      backward_ = o.backward_;
      o.forward_ = o.backward_ = nullptr;
    }
    return *this;
  }

  void forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const {
    fftw_execute_dft(forward_, cast(in), cast(out));
  }
  void backward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const {
    fftw_execute_dft(backward_, cast(in), cast(out));
  }
  std::size_t size() const { return n_; }

 private:
  static fftw_complex* cast(std::span<const std::complex<double>> s) {
    return reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(s.data()));
  }
  static std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
  }
  void release() {
    std::lock_guard lock(planner_mutex());
    if (forward_) fftw_destroy_plan(forward_);
    if (backward_) fftw_destroy_plan(backward_);
    forward_ = backward_ = nullptr;
  }

  std::size_t n_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace kapdirac::detail

#endif  // KAPDIRAC_SRC_FFT2D_HPP_
