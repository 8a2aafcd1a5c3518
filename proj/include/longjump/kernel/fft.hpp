#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace longjump {

// Real 1-D convolution workspace of a fixed power-of-two transform size.
// Each slot is one in-place r2c/c2r buffer (2*(n/2+1) doubles), so memory
// stays close to the minimum needed for the convolutions we run.  Plans are
// built once with FFTW_ESTIMATE and reused across all slots.
class FftConvolver {
 public:
  FftConvolver(std::size_t n, int slots) : n_(n), nc_(n / 2 + 1) {
    if (n_ == 0 || (n_ & (n_ - 1)) != 0)
      throw std::invalid_argument("transform size must be a power of two");
    if (slots < 1) throw std::invalid_argument("need at least one slot");
    for (int s = 0; s < slots; ++s) {
      double* buf = fftw_alloc_real(2 * nc_);
      if (buf == nullptr) throw std::bad_alloc();
      slots_.push_back(buf);
    }
    fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), slots_[0],
                                reinterpret_cast<fftw_complex*>(slots_[0]),
                                FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_),
                                reinterpret_cast<fftw_complex*>(slots_[0]),
                                slots_[0], FFTW_ESTIMATE);
    if (fwd_ == nullptr || inv_ == nullptr)
      throw std::runtime_error("failed to create FFT plans");
  }

  FftConvolver(const FftConvolver&) = delete;
  FftConvolver& operator=(const FftConvolver&) = delete;

  ~FftConvolver() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
    for (auto* s : slots_) fftw_free(s);
  }

  std::size_t size() const { return n_; }
  int slot_count() const { return static_cast<int>(slots_.size()); }

  // copy a (zero-padded) into the slot's real view
  void load(int slot, const double* a, std::size_t la) {
    if (la > n_) throw std::invalid_argument("input longer than transform");
    double* buf = real(slot);
    std::copy(a, a + la, buf);
    std::fill(buf + la, buf + n_, 0.0);
  }

  // copy a reversed (a[la-1] first), zero-padded
  void load_reversed(int slot, const double* a, std::size_t la) {
    if (la > n_) throw std::invalid_argument("input longer than transform");
    double* buf = real(slot);
    std::reverse_copy(a, a + la, buf);
    std::fill(buf + la, buf + n_, 0.0);
  }

  // in-place forward transform of the slot
  void transform(int slot) {
    double* buf = real(slot);
    fftw_execute_dft_r2c(fwd_, buf, reinterpret_cast<fftw_complex*>(buf));
  }

  // dst = a .* b, or dst += a .* b; dst may alias a or b
  void spec_mul(int dst, int a, int b, bool accumulate) {
    auto* d = reinterpret_cast<fftw_complex*>(real(dst));
    const auto* x = reinterpret_cast<const fftw_complex*>(real(a));
    const auto* y = reinterpret_cast<const fftw_complex*>(real(b));
    for (std::size_t k = 0; k < nc_; ++k) {
      double re = x[k][0] * y[k][0] - x[k][1] * y[k][1];
      double im = x[k][0] * y[k][1] + x[k][1] * y[k][0];
      if (accumulate) {
        d[k][0] += re;
        d[k][1] += im;
      } else {
        d[k][0] = re;
        d[k][1] = im;
      }
    }
  }

  // in-place inverse transform of the slot, scaled by 1/n
  void inverse(int slot) {
    double* buf = real(slot);
    fftw_execute_dft_c2r(inv_, reinterpret_cast<fftw_complex*>(buf), buf);
    double s = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) buf[i] *= s;
  }

  double* real(int slot) {
    return slots_.at(static_cast<std::size_t>(slot));
  }
  const double* real(int slot) const {
    return slots_.at(static_cast<std::size_t>(slot));
  }

 private:
  std::size_t n_, nc_;
  std::vector<double*> slots_;
  fftw_plan fwd_, inv_;
};

}  // namespace longjump
