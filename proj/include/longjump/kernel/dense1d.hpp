#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <vector>

#include "longjump/group/element.hpp"
#include "longjump/group/group.hpp"
#include "longjump/kernel/fft.hpp"
#include "longjump/measure/measure.hpp"
#include "longjump/util/checked.hpp"

namespace longjump {

// Dense window kernel on a rank-one group: either the integer line (one
// array over offsets -W..W) or the infinite dihedral group (two such arrays,
// one per reflection parity).  Entries are certified lower bounds on the
// n-step distribution; `dropped` is exactly 1 - sum(entries), i.e. the mass
// the window and the roundoff guard do not account for.
struct DenseKernel {
  i64 W = 0;
  bool dihedral = false;
  u64 steps = 0;
  std::vector<double> a0;  // translations; index i <-> offset i - W
  std::vector<double> a1;  // reflections (dihedral only)
  double dropped = 0.0;

  std::size_t length() const { return a0.size(); }

  double at(i64 offset, int parity = 0) const {
    if (offset < -W || offset > W) return 0.0;
    std::size_t i = static_cast<std::size_t>(offset + W);
    return parity == 0 ? a0[i] : (dihedral ? a1[i] : 0.0);
  }

  double value_at(const Element& g) const {
    return dihedral ? at(g[0], static_cast<int>(g[1])) : at(g[0], 0);
  }

  double mass() const {
    double s = 0.0, c = 0.0;
    auto add = [&](double v) {
      double y = v - c;
      double t = s + y;
      c = (t - s) - y;
      s = t;
    };
    for (double v : a0) add(v);
    for (double v : a1) add(v);
    return s;
  }

  double sup() const {
    double m = 0.0;
    for (double v : a0) m = std::max(m, v);
    for (double v : a1) m = std::max(m, v);
    return m;
  }
};

// Convolution engine for dense window kernels.  Small windows use direct
// summation; large ones go through one shared FFT workspace.  After every
// product each retained entry is reduced by a roundoff allowance so that
// entries stay certified lower bounds, and everything that falls outside the
// window or below zero is absorbed into `dropped`.
class DenseEngine {
 public:
  DenseEngine(const Measure& measure, i64 W)
      : meas_(&measure), group_(measure.spec().group), W_(W) {
    if (W_ < 1) throw std::invalid_argument("window radius must be positive");
    GroupKind k = group_.kind();
    if (k == GroupKind::DihedralInf) {
      dihedral_ = true;
    } else if (k == GroupKind::ZK && group_.coords() == 1) {
      dihedral_ = false;
    } else {
      throw std::invalid_argument(
          "dense engine supports only the integer line and the infinite "
          "dihedral group");
    }
    L_ = static_cast<std::size_t>(2 * W_ + 1);
    if (L_ > kDirectCutoff) {
      std::size_t need = 2 * L_ - 1;
      std::size_t n = 1;
      while (n < need) n <<= 1;
      fft_ = std::make_unique<FftConvolver>(n, dihedral_ ? 6 : 2);
    }
  }

  const Measure& measure() const { return *meas_; }
  i64 window() const { return W_; }

  // exact one-step probabilities on the window
  DenseKernel one_step() const {
    DenseKernel k;
    k.W = W_;
    k.dihedral = dihedral_;
    k.steps = 1;
    k.a0.assign(L_, 0.0);
    if (dihedral_) k.a1.assign(L_, 0.0);
    for (i64 x = -W_; x <= W_; ++x) {
      std::size_t i = static_cast<std::size_t>(x + W_);
      if (dihedral_) {
        k.a0[i] = meas_->pmf(make_element({x, 0}));
        k.a1[i] = meas_->pmf(make_element({x, 1}));
      } else {
        k.a0[i] = meas_->pmf(make_element({x}));
      }
    }
    k.dropped = 1.0 - k.mass();
    return k;
  }

  // k <- k * k
  void square(DenseKernel& k) {
    if (dihedral_) {
      // translations/reflections multiply like (n,e)(m,f) = (n±m, e xor f);
      // with a0 even the four parity products reduce to the sums below
      std::vector<double> c0(2 * L_ - 1, 0.0), c1(2 * L_ - 1, 0.0);
      if (fft_) {
        fft_->load(0, k.a0.data(), L_);
        fft_->transform(0);
        fft_->load(1, k.a1.data(), L_);
        fft_->transform(1);
        fft_->load_reversed(2, k.a1.data(), L_);
        fft_->transform(2);
        fft_->spec_mul(3, 0, 0, false);
        fft_->spec_mul(3, 1, 2, true);
        fft_->inverse(3);
        std::copy(fft_->real(3), fft_->real(3) + c0.size(), c0.begin());
        fft_->spec_mul(3, 0, 1, false);
        fft_->spec_mul(3, 0, 1, true);
        fft_->inverse(3);
        std::copy(fft_->real(3), fft_->real(3) + c1.size(), c1.begin());
      } else {
        direct_conv(k.a0, k.a0, c0, false);
        direct_conv(k.a1, k.a1, c0, true);  // reversed second factor
        std::vector<double> t(2 * L_ - 1, 0.0);
        direct_conv(k.a0, k.a1, t, false);
        for (std::size_t i = 0; i < t.size(); ++i) c1[i] = 2.0 * t[i];
      }
      finish(k, c0, &c1);
    } else {
      std::vector<double> c0(2 * L_ - 1, 0.0);
      if (fft_) {
        fft_->load(0, k.a0.data(), L_);
        fft_->transform(0);
        fft_->spec_mul(1, 0, 0, false);
        fft_->inverse(1);
        std::copy(fft_->real(1), fft_->real(1) + c0.size(), c0.begin());
      } else {
        direct_conv(k.a0, k.a0, c0, false);
      }
      finish(k, c0, nullptr);
    }
    k.steps *= 2;
  }

  // k <- k * f; both factors must be distributions of a symmetric step law
  // (their translation parts are even), which holds for every power of the
  // step measure
  void multiply(DenseKernel& k, const DenseKernel& f) {
    if (f.W != W_ || f.dihedral != dihedral_)
      throw std::invalid_argument("kernel windows do not match");
    if (dihedral_) {
      std::vector<double> c0(2 * L_ - 1, 0.0), c1(2 * L_ - 1, 0.0);
      if (fft_) {
        fft_->load(0, k.a0.data(), L_);
        fft_->transform(0);
        fft_->load(1, k.a1.data(), L_);
        fft_->transform(1);
        fft_->load(2, f.a0.data(), L_);
        fft_->transform(2);
        fft_->load(3, f.a1.data(), L_);
        fft_->transform(3);
        fft_->load_reversed(4, f.a1.data(), L_);
        fft_->transform(4);
        fft_->spec_mul(5, 0, 2, false);
        fft_->spec_mul(5, 1, 4, true);
        fft_->inverse(5);
        std::copy(fft_->real(5), fft_->real(5) + c0.size(), c0.begin());
        fft_->spec_mul(5, 0, 3, false);
        fft_->spec_mul(5, 1, 2, true);
        fft_->inverse(5);
        std::copy(fft_->real(5), fft_->real(5) + c1.size(), c1.begin());
      } else {
        direct_conv(k.a0, f.a0, c0, false);
        direct_conv(k.a1, f.a1, c0, true);
        direct_conv(k.a0, f.a1, c1, false);
        std::vector<double> t(2 * L_ - 1, 0.0);
        direct_conv(k.a1, f.a0, t, false);  // k.a1 * rev(f.a0) = k.a1 * f.a0
        for (std::size_t i = 0; i < t.size(); ++i) c1[i] += t[i];
      }
      finish(k, c0, &c1);
    } else {
      std::vector<double> c0(2 * L_ - 1, 0.0);
      if (fft_) {
        fft_->load(0, k.a0.data(), L_);
        fft_->transform(0);
        fft_->load(1, f.a0.data(), L_);
        fft_->transform(1);
        fft_->spec_mul(0, 0, 1, false);
        fft_->inverse(0);
        std::copy(fft_->real(0), fft_->real(0) + c0.size(), c0.begin());
      } else {
        direct_conv(k.a0, f.a0, c0, false);
      }
      finish(k, c0, nullptr);
    }
    k.steps += f.steps;
    k.dropped = 1.0 - k.mass();
  }

  // n-step kernel by binary powering of the cached one-step kernel
  DenseKernel power(u64 n) {
    if (n == 0) {
      DenseKernel k;
      k.W = W_;
      k.dihedral = dihedral_;
      k.steps = 0;
      k.a0.assign(L_, 0.0);
      if (dihedral_) k.a1.assign(L_, 0.0);
      k.a0[static_cast<std::size_t>(W_)] = 1.0;
      return k;
    }
    if (!base_) base_ = std::make_unique<DenseKernel>(one_step());
    DenseKernel acc = *base_;
    int msb = 63;
    while (((n >> msb) & 1ULL) == 0ULL) --msb;
    for (int b = msb - 1; b >= 0; --b) {
      square(acc);
      if ((n >> b) & 1ULL) multiply(acc, *base_);
    }
    return acc;
  }

 private:
  static constexpr std::size_t kDirectCutoff = 4096;

  // c (+)= a conv b, or a conv reverse(b) when reversed is set; ascending
  // inner index keeps the summation order canonical
  static void direct_conv(const std::vector<double>& a,
                          const std::vector<double>& b, std::vector<double>& c,
                          bool reversed) {
    std::size_t la = a.size(), lb = b.size();
    for (std::size_t i = 0; i < la; ++i) {
      double ai = a[i];
      if (ai == 0.0) continue;
      for (std::size_t j = 0; j < lb; ++j) {
        double bj = reversed ? b[lb - 1 - j] : b[j];
        c[i + j] += ai * bj;
      }
    }
  }

  // clip the full product back to the window, subtract the roundoff
  // allowance, and restate dropped as 1 - mass
  void finish(DenseKernel& k, const std::vector<double>& c0,
              const std::vector<double>* c1) {
    double comp = roundoff_allowance();
    std::size_t off = static_cast<std::size_t>(W_);
    for (std::size_t i = 0; i < L_; ++i)
      k.a0[i] = std::max(0.0, c0[off + i] - comp);
    if (c1 != nullptr) {
      for (std::size_t i = 0; i < L_; ++i)
        k.a1[i] = std::max(0.0, (*c1)[off + i] - comp);
    }
    k.dropped = 1.0 - k.mass();
  }

  double roundoff_allowance() const {
    double bits = std::log2(static_cast<double>(2 * L_));
    return 1e-13 * bits;
  }

  const Measure* meas_;
  Group group_;
  i64 W_;
  std::size_t L_ = 0;
  bool dihedral_ = false;
  std::unique_ptr<FftConvolver> fft_;
  std::unique_ptr<DenseKernel> base_;
};

}  // namespace longjump
